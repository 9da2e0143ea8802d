#include "umbilic/expression.hpp"

#include "umbilic/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace umbilic::expr {

namespace {

std::string describe(Op op) {
    switch (op) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Sqrt: return "sqrt";
        default: return "?";
    }
}

double apply_unary(Op op, double x) {
    switch (op) {
        case Op::Neg: return -x;
        case Op::Sin: return std::sin(x);
        case Op::Cos: return std::cos(x);
        case Op::Exp: return std::exp(x);
        case Op::Sqrt: return std::sqrt(x);
        default: return x;
    }
}

double apply_pow(double base, double exponent) {
    if (exponent == 2.0) return base * base;
    if (exponent == 3.0) return base * base * base;
    return std::pow(base, exponent);
}

class Parser {
public:
    Parser(Graph& graph, std::string_view text, std::span<const std::string> variables)
        : graph_(graph), text_(text), variables_(variables) {}

    NodeId run() {
        NodeId result = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return result;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        std::ostringstream os;
        os << message << " at offset " << pos_ << " in '" << text_ << "'";
        throw Error(ErrorKind::ExpressionInvalid, os.str());
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodeId expression() {
        NodeId lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = graph_.add(lhs, term());
            } else if (accept('-')) {
                lhs = graph_.sub(lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodeId term() {
        NodeId lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = graph_.mul(lhs, unary());
            } else if (accept('/')) {
                lhs = graph_.div(lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodeId unary() {
        if (accept('-')) return graph_.neg(unary());
        if (accept('+')) return unary();
        return power();
    }

    NodeId power() {
        NodeId base = primary();
        if (accept('^')) {
            const std::size_t at = pos_;
            NodeId exponent = unary();
            if (!graph_.is_constant(exponent)) {
                pos_ = at;
                fail("exponent must be a constant expression");
            }
            return graph_.pow(base, exponent);
        }
        return base;
    }

    NodeId primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodeId inner = expression();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodeId number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return graph_.constant(value);
    }

    NodeId identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            if (variables_[i] == name) return graph_.variable(static_cast<int>(i));
        }
        if (name == "pi") return graph_.constant(std::numbers::pi);
        Op fn;
        if (name == "sin") {
            fn = Op::Sin;
        } else if (name == "cos") {
            fn = Op::Cos;
        } else if (name == "exp") {
            fn = Op::Exp;
        } else if (name == "sqrt") {
            fn = Op::Sqrt;
        } else {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!accept('(')) fail("expected '(' after function name");
        NodeId arg = expression();
        if (!accept(')')) fail("expected ')'");
        return graph_.apply(fn, arg);
    }

    Graph& graph_;
    std::string_view text_;
    std::span<const std::string> variables_;
    std::size_t pos_ = 0;
};

}  // namespace

std::size_t Graph::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.op) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.a)) + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.b)) + 0x85EBCA77C2B2AE63ull + (h << 6) + (h >> 2);
    h ^= k.bits + 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

NodeId Graph::intern(Op op, NodeId a, NodeId b, double value) {
    const Key key{op, a, b, std::bit_cast<std::uint64_t>(value)};
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{op, a, b, value});
    index_.emplace(key, id);
    return id;
}

NodeId Graph::parse(std::string_view text, std::span<const std::string> variables) {
    return Parser(*this, text, variables).run();
}

NodeId Graph::constant(double value) {
    if (value == 0.0) value = 0.0;  // fold -0 into +0
    return intern(Op::Const, -1, -1, value);
}

NodeId Graph::variable(int index) { return intern(Op::Var, -1, -1, static_cast<double>(index)); }

NodeId Graph::add(NodeId a, NodeId b) {
    if (is_constant(a) && is_constant(b)) return constant(constant_value(a) + constant_value(b));
    if (is_constant(a) && constant_value(a) == 0.0) return b;
    if (is_constant(b) && constant_value(b) == 0.0) return a;
    if (nodes_[b].op == Op::Neg) return sub(a, nodes_[b].a);
    if (a > b) std::swap(a, b);
    return intern(Op::Add, a, b, 0.0);
}

NodeId Graph::sub(NodeId a, NodeId b) {
    if (is_constant(a) && is_constant(b)) return constant(constant_value(a) - constant_value(b));
    if (is_constant(b) && constant_value(b) == 0.0) return a;
    if (is_constant(a) && constant_value(a) == 0.0) return neg(b);
    if (a == b) return constant(0.0);
    if (nodes_[b].op == Op::Neg) return add(a, nodes_[b].a);
    return intern(Op::Sub, a, b, 0.0);
}

NodeId Graph::mul(NodeId a, NodeId b) {
    if (is_constant(a) && is_constant(b)) return constant(constant_value(a) * constant_value(b));
    if (is_constant(b)) std::swap(a, b);
    if (is_constant(a)) {
        const double v = constant_value(a);
        if (v == 0.0) return constant(0.0);
        if (v == 1.0) return b;
        if (v == -1.0) return neg(b);
    }
    if (nodes_[a].op == Op::Neg && nodes_[b].op == Op::Neg) return mul(nodes_[a].a, nodes_[b].a);
    if (nodes_[a].op == Op::Neg) return neg(mul(nodes_[a].a, b));
    if (nodes_[b].op == Op::Neg) return neg(mul(a, nodes_[b].a));
    if (!is_constant(a) && a > b) std::swap(a, b);
    return intern(Op::Mul, a, b, 0.0);
}

NodeId Graph::div(NodeId a, NodeId b) {
    if (is_constant(a) && is_constant(b)) return constant(constant_value(a) / constant_value(b));
    if (is_constant(a) && constant_value(a) == 0.0) return constant(0.0);
    if (is_constant(b) && constant_value(b) == 1.0) return a;
    if (is_constant(b)) return mul(constant(1.0 / constant_value(b)), a);
    return intern(Op::Div, a, b, 0.0);
}

NodeId Graph::neg(NodeId a) {
    if (is_constant(a)) return constant(-constant_value(a));
    if (nodes_[a].op == Op::Neg) return nodes_[a].a;
    return intern(Op::Neg, a, -1, 0.0);
}

NodeId Graph::pow(NodeId base, NodeId exponent) {
    if (!is_constant(exponent)) {
        throw Error(ErrorKind::ExpressionInvalid, "exponent must be a constant expression");
    }
    const double e = constant_value(exponent);
    if (e == 0.0) return constant(1.0);
    if (e == 1.0) return base;
    if (is_constant(base)) return constant(apply_pow(constant_value(base), e));
    return intern(Op::Pow, base, exponent, 0.0);
}

NodeId Graph::apply(Op fn, NodeId a) {
    if (is_constant(a)) return constant(apply_unary(fn, constant_value(a)));
    return intern(fn, a, -1, 0.0);
}

NodeId Graph::derivative(NodeId node, int var) {
    const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(node)) << 16) |
                              static_cast<std::uint64_t>(var & 0xFFFF);
    if (auto it = derivative_cache_.find(key); it != derivative_cache_.end()) return it->second;

    // Copy: recursive calls may grow nodes_ and invalidate references.
    const Node n = nodes_[node];
    NodeId result;
    switch (n.op) {
        case Op::Const:
            result = constant(0.0);
            break;
        case Op::Var:
            result = constant(static_cast<int>(n.value) == var ? 1.0 : 0.0);
            break;
        case Op::Add:
            result = add(derivative(n.a, var), derivative(n.b, var));
            break;
        case Op::Sub:
            result = sub(derivative(n.a, var), derivative(n.b, var));
            break;
        case Op::Mul:
            result = add(mul(derivative(n.a, var), n.b), mul(n.a, derivative(n.b, var)));
            break;
        case Op::Div: {
            const NodeId da = derivative(n.a, var);
            const NodeId db = derivative(n.b, var);
            // (a/b)' = a'/b - a b' / b^2
            result = sub(div(da, n.b), div(mul(n.a, db), mul(n.b, n.b)));
            break;
        }
        case Op::Neg:
            result = neg(derivative(n.a, var));
            break;
        case Op::Pow: {
            const double e = constant_value(n.b);
            const NodeId lowered = pow(n.a, constant(e - 1.0));
            result = mul(mul(constant(e), lowered), derivative(n.a, var));
            break;
        }
        case Op::Sin:
            result = mul(apply(Op::Cos, n.a), derivative(n.a, var));
            break;
        case Op::Cos:
            result = neg(mul(apply(Op::Sin, n.a), derivative(n.a, var)));
            break;
        case Op::Exp:
            result = mul(node, derivative(n.a, var));
            break;
        case Op::Sqrt:
            result = div(derivative(n.a, var), mul(constant(2.0), node));
            break;
        default:
            throw Error(ErrorKind::ExpressionInvalid, "unsupported node in derivative");
    }
    derivative_cache_.emplace(key, result);
    return result;
}

void Graph::evaluate(std::span<const double> variables, std::span<double> values, std::size_t count) const {
    for (std::size_t i = 0; i < count; ++i) {
        const Node& n = nodes_[i];
        double v;
        switch (n.op) {
            case Op::Const: v = n.value; break;
            case Op::Var: v = variables[static_cast<std::size_t>(n.value)]; break;
            case Op::Add: v = values[n.a] + values[n.b]; break;
            case Op::Sub: v = values[n.a] - values[n.b]; break;
            case Op::Mul: v = values[n.a] * values[n.b]; break;
            case Op::Div: v = values[n.a] / values[n.b]; break;
            case Op::Neg: v = -values[n.a]; break;
            case Op::Pow: v = apply_pow(values[n.a], values[n.b]); break;
            default: v = apply_unary(n.op, values[n.a]); break;
        }
        values[i] = v;
    }
}

double Graph::evaluate(NodeId node, std::span<const double> variables) const {
    thread_local std::vector<double> scratch;
    scratch.resize(nodes_.size());
    evaluate(variables, scratch, static_cast<std::size_t>(node) + 1);
    return scratch[node];
}

std::string Graph::to_string(NodeId node) const {
    const Node& n = nodes_[node];
    std::ostringstream os;
    os.precision(17);
    switch (n.op) {
        case Op::Const: os << n.value; break;
        case Op::Var: os << "x" << static_cast<int>(n.value); break;
        case Op::Add: os << "(" << to_string(n.a) << " + " << to_string(n.b) << ")"; break;
        case Op::Sub: os << "(" << to_string(n.a) << " - " << to_string(n.b) << ")"; break;
        case Op::Mul: os << "(" << to_string(n.a) << " * " << to_string(n.b) << ")"; break;
        case Op::Div: os << "(" << to_string(n.a) << " / " << to_string(n.b) << ")"; break;
        case Op::Neg: os << "-(" << to_string(n.a) << ")"; break;
        case Op::Pow: os << "(" << to_string(n.a) << ")^" << constant_value(n.b); break;
        default: os << describe(n.op) << "(" << to_string(n.a) << ")"; break;
    }
    return os.str();
}

ScalarFunction::ScalarFunction(std::string_view text, std::vector<std::string> variables)
    : text_(text) {
    root_ = graph_.parse(text, variables);
}

double ScalarFunction::operator()(std::span<const double> args) const { return graph_.evaluate(root_, args); }


VectorFunction::VectorFunction(std::span<const std::string> outputs, std::vector<std::string> variables,
                               int max_order)
    : variables_(std::move(variables)), sources_(outputs.begin(), outputs.end()), max_order_(max_order) {
    if (max_order < 0 || max_order > 3) {
        throw Error(ErrorKind::ExpressionInvalid, "derivative order must be between 0 and 3");
    }
    const int m = inputs();
    const int k = static_cast<int>(outputs.size());
    for (const auto& text : outputs) values_.push_back(graph_.parse(text, variables_));
    extent_[0] = graph_.size();
    if (max_order >= 1) {
        first_.resize(static_cast<std::size_t>(k * m));
        for (int a = 0; a < k; ++a)
            for (int i = 0; i < m; ++i) first_[a * m + i] = graph_.derivative(values_[a], i);
    }
    extent_[1] = graph_.size();
    if (max_order >= 2) {
        second_.assign(static_cast<std::size_t>(k * m * m), -1);
        for (int a = 0; a < k; ++a)
            for (int i = 0; i < m; ++i)
                for (int j = i; j < m; ++j) second_[(a * m + i) * m + j] = graph_.derivative(first_[a * m + i], j);
    }
    extent_[2] = graph_.size();
    if (max_order >= 3) {
        third_.assign(static_cast<std::size_t>(k * m * m * m), -1);
        for (int a = 0; a < k; ++a)
            for (int i = 0; i < m; ++i)
                for (int j = i; j < m; ++j)
                    for (int l = j; l < m; ++l)
                        third_[((a * m + i) * m + j) * m + l] = graph_.derivative(second_[(a * m + i) * m + j], l);
    }
    extent_[3] = graph_.size();
}

void VectorFunction::evaluate(std::span<const double> x, int order, std::vector<double>& scratch) const {
    if (order > max_order_) throw Error(ErrorKind::DerivativeUnavailable, "requested derivative order not built");
    const std::size_t count = extent_[std::max(0, order)];
    if (scratch.size() < graph_.size()) scratch.resize(graph_.size());
    graph_.evaluate(x, scratch, count);
}

double VectorFunction::second(const std::vector<double>& s, int a, int i, int j) const {
    const int m = inputs();
    if (i > j) std::swap(i, j);
    return s[second_[(a * m + i) * m + j]];
}

double VectorFunction::third(const std::vector<double>& s, int a, int i, int j, int k) const {
    const int m = inputs();
    int idx[3] = {i, j, k};
    std::sort(idx, idx + 3);
    return s[third_[((a * m + idx[0]) * m + idx[1]) * m + idx[2]]];
}

}  // namespace umbilic::expr
