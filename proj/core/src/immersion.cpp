#include "umbilic/immersion.hpp"

#include "umbilic/error.hpp"
#include "umbilic/expression.hpp"

#include <sstream>

namespace umbilic {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::ContainmentViolated: return "ContainmentViolated";
        case ErrorKind::DomainExceeded: return "DomainExceeded";
        case ErrorKind::NormalOutsideBundle: return "NormalOutsideBundle";
        case ErrorKind::DerivativeUnavailable: return "DerivativeUnavailable";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::StepRejected: return "StepRejected";
        case ErrorKind::OutOfSpan: return "OutOfSpan";
        case ErrorKind::MeanCurvatureVanishes: return "MeanCurvatureVanishes";
        case ErrorKind::TauFloorViolated: return "TauFloorViolated";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::ExpressionInvalid: return "ExpressionInvalid";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// AmbientSpace

AmbientSpace AmbientSpace::euclidean(int dimension) {
    if (dimension < 1 || dimension > kMaxAmbientDim) {
        throw Error(ErrorKind::ConfigInvalid, "ambient dimension out of range");
    }
    AmbientSpace q;
    q.dimension_ = dimension;
    q.description_ = "R^" + std::to_string(dimension);
    return q;
}

AmbientSpace AmbientSpace::level_set(int dimension, ConstraintFn constraint, std::string description) {
    AmbientSpace q = euclidean(dimension);
    q.constraint_ = std::move(constraint);
    q.description_ = std::move(description);
    return q;
}

AmbientSpace AmbientSpace::level_set_expression(int dimension, std::string_view constraint) {
    std::vector<std::string> vars;
    for (int i = 1; i <= dimension; ++i) vars.push_back("x" + std::to_string(i));
    const std::string text(constraint);
    auto fn = std::make_shared<const expr::VectorFunction>(std::span<const std::string>(&text, 1), vars, 2);
    auto eval = [fn, dimension](const AmbientVec& x) {
        thread_local std::vector<double> scratch;
        fn->evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), 2, scratch);
        ConstraintJet jet;
        jet.value = fn->value(scratch, 0);
        jet.gradient.resize(dimension);
        jet.hessian.resize(dimension, dimension);
        for (int i = 0; i < dimension; ++i) {
            jet.gradient[i] = fn->first(scratch, 0, i);
            for (int j = 0; j < dimension; ++j) jet.hessian(i, j) = fn->second(scratch, 0, i, j);
        }
        return jet;
    };
    return level_set(dimension, eval, "{" + text + " = 0} in R^" + std::to_string(dimension));
}

AmbientSpace AmbientSpace::round_sphere(int dimension, double radius) {
    auto eval = [radius](const AmbientVec& x) {
        ConstraintJet jet;
        jet.value = x.squaredNorm() - radius * radius;
        jet.gradient = 2.0 * x;
        jet.hessian = 2.0 * AmbientMat::Identity(x.size(), x.size());
        return jet;
    };
    std::ostringstream os;
    os << "S^" << dimension - 1 << "(" << radius << ") in R^" << dimension;
    return level_set(dimension, eval, os.str());
}

ConstraintJet AmbientSpace::constraint(const AmbientVec& x) const {
    if (!constraint_) {
        ConstraintJet jet;
        jet.gradient = AmbientVec::Zero(dimension_);
        jet.hessian = AmbientMat::Zero(dimension_, dimension_);
        return jet;
    }
    return constraint_(x);
}

AmbientVec AmbientSpace::unit_normal(const AmbientVec& x) const {
    const ConstraintJet jet = constraint(x);
    const double norm = jet.gradient.norm();
    if (norm <= kGradientFloor) throw Error(ErrorKind::RankDeficient, "level-set gradient vanishes");
    return jet.gradient / norm;
}

AmbientVec AmbientSpace::project_tangent(const AmbientVec& x, const AmbientVec& v) const {
    if (!is_level_set()) return v;
    const AmbientVec n = unit_normal(x);
    return v - n.dot(v) * n;
}

// ---------------------------------------------------------------------------
// Box

bool Box::contains(const ChartVec& u) const {
    if (u.size() != lower.size()) return false;
    for (int i = 0; i < u.size(); ++i) {
        if (!(u[i] >= lower[i] && u[i] <= upper[i])) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// ParametricImmersion

ParametricImmersion::ParametricImmersion(std::string name, int dim, AmbientSpace ambient, Box domain, JetFn jet,
                                         int max_order)
    : name_(std::move(name)), dim_(dim), ambient_(std::move(ambient)), domain_(std::move(domain)),
      jet_(std::move(jet)), max_order_(max_order) {
    if (dim_ < 1 || dim_ > kMaxChartDim) throw Error(ErrorKind::ConfigInvalid, "chart dimension out of range");
    if (dim_ > ambient_.dimension()) throw Error(ErrorKind::ConfigInvalid, "chart dimension exceeds ambient");
    if (domain_.lower.size() != dim_ || domain_.upper.size() != dim_) {
        throw Error(ErrorKind::ConfigInvalid, "domain box dimension mismatch");
    }
    if (((domain_.upper - domain_.lower).array() <= 0.0).any()) {
        throw Error(ErrorKind::ConfigInvalid, "domain box must have positive extent");
    }
}

ParametricImmersion ParametricImmersion::from_expressions(std::string name, std::vector<std::string> variables,
                                                          std::vector<std::string> position,
                                                          AmbientSpace ambient, Box domain, int max_order) {
    const int m = static_cast<int>(variables.size());
    const int n = static_cast<int>(position.size());
    if (n != ambient.dimension()) {
        throw Error(ErrorKind::ConfigInvalid, "position expression count must equal the ambient dimension");
    }
    auto fn = std::make_shared<const expr::VectorFunction>(position, std::move(variables), max_order);
    auto eval = [fn, m, n](const ChartVec& u, int order, Jet& jet) {
        thread_local std::vector<double> s;
        fn->evaluate(std::span<const double>(u.data(), static_cast<std::size_t>(m)), order, s);
        for (int a = 0; a < n; ++a) jet.position[a] = fn->value(s, a);
        if (order >= 1) {
            for (int a = 0; a < n; ++a)
                for (int i = 0; i < m; ++i) jet.first(a, i) = fn->first(s, a, i);
        }
        if (order >= 2) {
            for (int a = 0; a < n; ++a)
                for (int i = 0; i < m; ++i)
                    for (int j = i; j < m; ++j) {
                        const double v = fn->second(s, a, i, j);
                        jet.second(a, i * m + j) = v;
                        jet.second(a, j * m + i) = v;
                    }
        }
        if (order >= 3) {
            for (int a = 0; a < n; ++a)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        for (int k = 0; k < m; ++k) jet.third(a, (i * m + j) * m + k) = fn->third(s, a, i, j, k);
        }
    };
    return ParametricImmersion(std::move(name), m, std::move(ambient), std::move(domain), eval, max_order);
}

ParametricImmersion ParametricImmersion::from_positions(std::string name, int dim, AmbientSpace ambient,
                                                        Box domain, PositionFn position,
                                                        FiniteDifferenceSteps steps) {
    auto eval = [position = std::move(position), steps, dim](const ChartVec& u, int order, Jet& jet) {
        jet.position = position(u);
        const int m = dim;
        if (order >= 1) {
            const double h = steps.first;
            for (int i = 0; i < m; ++i) {
                ChartVec up = u, dn = u;
                up[i] += h;
                dn[i] -= h;
                jet.first.col(i) = (position(up) - position(dn)) / (2.0 * h);
            }
        }
        if (order >= 2) {
            const double h = steps.second;
            for (int i = 0; i < m; ++i) {
                ChartVec up = u, dn = u;
                up[i] += h;
                dn[i] -= h;
                jet.second.col(i * m + i) = (position(up) - 2.0 * jet.position + position(dn)) / (h * h);
                for (int j = i + 1; j < m; ++j) {
                    ChartVec pp = u, pm = u, mp = u, mm = u;
                    pp[i] += h, pp[j] += h;
                    pm[i] += h, pm[j] -= h;
                    mp[i] -= h, mp[j] += h;
                    mm[i] -= h, mm[j] -= h;
                    const AmbientVec mixed = (position(pp) - position(pm) - position(mp) + position(mm)) / (4.0 * h * h);
                    jet.second.col(i * m + j) = mixed;
                    jet.second.col(j * m + i) = mixed;
                }
            }
        }
    };
    ParametricImmersion imm(std::move(name), dim, std::move(ambient), std::move(domain), eval, 2);
    imm.mode_ = DerivativeMode::FiniteDifference;
    return imm;
}

Jet ParametricImmersion::jet(const ChartVec& u, int order) const {
    if (u.size() != dim_) throw Error(ErrorKind::DomainExceeded, "chart point has wrong dimension");
    if (!domain_.contains(u)) {
        std::ostringstream os;
        os << "chart point (" << u.transpose() << ") outside the domain of " << name_;
        throw Error(ErrorKind::DomainExceeded, os.str());
    }
    if (order > max_order_) {
        throw Error(ErrorKind::DerivativeUnavailable,
                    name_ + " provides derivatives up to order " + std::to_string(max_order_));
    }
    const int n = ambient_dim();
    Jet jet;
    jet.order = order;
    jet.position.setZero(n);
    if (order >= 1) jet.first.setZero(n, dim_);
    if (order >= 2) jet.second.setZero(n, dim_ * dim_);
    if (order >= 3) jet.third.setZero(n, dim_ * dim_ * dim_);
    jet_(u, order, jet);
    if (!jet.position.allFinite()) throw Error(ErrorKind::StepRejected, "non-finite immersion value at " + name_);
    return jet;
}

ParametricImmersion ParametricImmersion::scaled(double factor) const {
    if (ambient_.is_level_set()) {
        throw Error(ErrorKind::ConfigInvalid, "scaling is only defined for Euclidean ambients");
    }
    auto inner = jet_;
    auto eval = [inner, factor](const ChartVec& u, int order, Jet& jet) {
        inner(u, order, jet);
        jet.position *= factor;
        if (order >= 1) jet.first *= factor;
        if (order >= 2) jet.second *= factor;
        if (order >= 3) jet.third *= factor;
    };
    ParametricImmersion copy(name_ + "*" + std::to_string(factor), dim_, ambient_, domain_, eval, max_order_);
    copy.mode_ = mode_;
    return copy;
}

}  // namespace umbilic
