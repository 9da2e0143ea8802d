#pragma once

// Small arithmetic-expression language used for inline immersions, level-set
// constraints and prescribed curvature functions.
//
// Grammar (whitespace insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right associative; exponent must be constant
//   primary := number | 'pi' | identifier | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt
//
// Expressions are stored in a hash-consed DAG so that symbolic derivatives
// share subterms; one linear sweep over the node list evaluates every output.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace umbilic::expr {

using NodeId = std::int32_t;

enum class Op : std::uint8_t { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Sqrt };

class Graph {
public:
    /// Parses `text` with the given variable names; throws Error(ExpressionInvalid)
    /// with the character offset of the problem.
    NodeId parse(std::string_view text, std::span<const std::string> variables);

    NodeId constant(double value);
    NodeId variable(int index);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId div(NodeId a, NodeId b);
    NodeId neg(NodeId a);
    NodeId pow(NodeId base, NodeId exponent);
    NodeId apply(Op fn, NodeId a);

    /// d(node)/d(variable `var`), memoized.
    NodeId derivative(NodeId node, int var);

    bool is_constant(NodeId node) const { return nodes_[node].op == Op::Const; }
    double constant_value(NodeId node) const { return nodes_[node].value; }
    std::size_t size() const { return nodes_.size(); }

    /// Evaluates nodes [0, count) into `values`; nodes are topologically ordered
    /// by construction so any node's value only depends on earlier entries.
    void evaluate(std::span<const double> variables, std::span<double> values, std::size_t count) const;

    /// Convenience single-output evaluation.
    double evaluate(NodeId node, std::span<const double> variables) const;

    std::string to_string(NodeId node) const;

private:
    struct Node {
        Op op;
        NodeId a = -1;
        NodeId b = -1;
        double value = 0.0;  // constant value or variable index
    };
    struct Key {
        Op op;
        NodeId a;
        NodeId b;
        std::uint64_t bits;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    NodeId intern(Op op, NodeId a, NodeId b, double value);

    std::vector<Node> nodes_;
    std::unordered_map<Key, NodeId, KeyHash> index_;
    std::unordered_map<std::uint64_t, NodeId> derivative_cache_;
};

/// A compiled scalar function of several variables.
class ScalarFunction {
public:
    ScalarFunction() = default;
    ScalarFunction(std::string_view text, std::vector<std::string> variables);

    double operator()(std::span<const double> args) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
    Graph graph_;
    NodeId root_ = -1;
};


/// A map R^m -> R^k given by one expression per output, with symbolic partial
/// derivatives up to `max_order` (at most 3). Partials are built only for
/// sorted index tuples and mirrored on read.
class VectorFunction {
public:
    VectorFunction(std::span<const std::string> outputs, std::vector<std::string> variables, int max_order);

    int inputs() const { return static_cast<int>(variables_.size()); }
    int outputs() const { return static_cast<int>(values_.size()); }
    int max_order() const { return max_order_; }
    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<std::string>& sources() const { return sources_; }

    /// Evaluates everything needed for derivatives up to `order` into `scratch`.
    void evaluate(std::span<const double> x, int order, std::vector<double>& scratch) const;

    double value(const std::vector<double>& s, int a) const { return s[values_[a]]; }
    double first(const std::vector<double>& s, int a, int i) const { return s[first_[a * inputs() + i]]; }
    double second(const std::vector<double>& s, int a, int i, int j) const;
    double third(const std::vector<double>& s, int a, int i, int j, int k) const;

private:
    std::vector<std::string> variables_;
    std::vector<std::string> sources_;
    int max_order_;
    Graph graph_;
    std::vector<NodeId> values_;
    std::vector<NodeId> first_;
    std::vector<NodeId> second_;  // indexed by (a, i<=j) packed as a*m*m + i*m + j
    std::vector<NodeId> third_;   // a*m^3 + (i*m+j)*m + k with i<=j<=k
    std::size_t extent_[4] = {0, 0, 0, 0};
};

}  // namespace umbilic::expr
