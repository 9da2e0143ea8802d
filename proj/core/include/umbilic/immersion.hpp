#pragma once

#include "umbilic/linalg.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace umbilic {

/// Value, gradient and Hessian of a level-set constraint F: R^N -> R.
struct ConstraintJet {
    double value = 0.0;
    AmbientVec gradient;
    AmbientMat hessian;
};

/// The ambient manifold Q: flat R^N, or a regular level set {F = 0} of R^N.
/// For a level set the Levi-Civita connection of Q is the Euclidean derivative
/// followed by orthogonal projection onto TQ = ker dF.
class AmbientSpace {
public:
    using ConstraintFn = std::function<ConstraintJet(const AmbientVec&)>;

    static AmbientSpace euclidean(int dimension);
    static AmbientSpace level_set(int dimension, ConstraintFn constraint, std::string description);
    /// Level set of an expression in the variables x1..xN.
    static AmbientSpace level_set_expression(int dimension, std::string_view constraint);
    /// The sphere |x| = radius in R^dimension.
    static AmbientSpace round_sphere(int dimension, double radius = 1.0);

    bool is_level_set() const { return static_cast<bool>(constraint_); }
    int dimension() const { return dimension_; }
    const std::string& description() const { return description_; }

    ConstraintJet constraint(const AmbientVec& x) const;
    /// Unit normal grad F / |grad F| of Q at x. Level sets only.
    AmbientVec unit_normal(const AmbientVec& x) const;
    /// Orthogonal projection of v onto T_x Q (identity for Euclidean space).
    AmbientVec project_tangent(const AmbientVec& x, const AmbientVec& v) const;

    double containment_tolerance() const { return containment_tolerance_; }
    void set_containment_tolerance(double tol) { containment_tolerance_ = tol; }

    static constexpr double kGradientFloor = 1e-8;

private:
    int dimension_ = 0;
    ConstraintFn constraint_;
    std::string description_;
    double containment_tolerance_ = 1e-8;
};

/// Axis-aligned chart domain.
struct Box {
    ChartVec lower;
    ChartVec upper;

    bool contains(const ChartVec& u) const;
    ChartVec centre() const { return 0.5 * (lower + upper); }
};

enum class DerivativeMode { Analytic, FiniteDifference };

/// Position and partial derivatives of an immersion at a chart point.
struct Jet {
    int order = 0;
    AmbientVec position;
    FrameMat first;        // N x m, column i = d_i f
    SecondPartials second;  // N x m^2
    ThirdPartials third;    // N x m^3, filled only when order >= 3
};

/// Central-difference steps for position-only immersions. Second partials use
/// a larger step: at 1e-5 the second difference quotient loses about six
/// digits to cancellation.
struct FiniteDifferenceSteps {
    double first = 1e-5;
    double second = 1e-4;
};

/// A chart-domain map f: R^m -> R^N into an ambient space, with partial
/// derivatives up to order 2 (3 when available).
class ParametricImmersion {
public:
    /// Fills `jet` up to `order`; the callee may assume the point is in the domain.
    using JetFn = std::function<void(const ChartVec& u, int order, Jet& jet)>;
    using PositionFn = std::function<AmbientVec(const ChartVec& u)>;

    ParametricImmersion(std::string name, int dim, AmbientSpace ambient, Box domain, JetFn jet,
                        int max_order);

    /// Analytic derivatives obtained symbolically from one expression per
    /// ambient coordinate in the given chart variables.
    static ParametricImmersion from_expressions(std::string name, std::vector<std::string> variables,
                                                std::vector<std::string> position, AmbientSpace ambient,
                                                Box domain, int max_order = 3);
    /// Derivatives by central differences of a position-only map.
    static ParametricImmersion from_positions(std::string name, int dim, AmbientSpace ambient, Box domain,
                                              PositionFn position, FiniteDifferenceSteps steps = {});

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    int ambient_dim() const { return ambient_.dimension(); }
    const AmbientSpace& ambient() const { return ambient_; }
    const Box& domain() const { return domain_; }
    DerivativeMode mode() const { return mode_; }
    int max_order() const { return max_order_; }
    bool has_third_derivatives() const { return max_order_ >= 3; }

    bool in_domain(const ChartVec& u) const { return domain_.contains(u); }

    /// Throws DomainExceeded outside the domain box and DerivativeUnavailable
    /// for orders the source cannot provide.
    Jet jet(const ChartVec& u, int order = 2) const;
    AmbientVec position(const ChartVec& u) const { return jet(u, 0).position; }

    /// A copy whose image is scaled by `factor` about the origin; level-set
    /// ambients are not rescaled, so this is only meaningful for R^N.
    ParametricImmersion scaled(double factor) const;

private:
    std::string name_;
    int dim_;
    AmbientSpace ambient_;
    Box domain_;
    JetFn jet_;
    int max_order_;
    DerivativeMode mode_ = DerivativeMode::Analytic;
};

}  // namespace umbilic
