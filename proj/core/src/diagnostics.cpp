#include "umbilic/diagnostics.hpp"

#include "umbilic/error.hpp"
#include "umbilic/numdiff.hpp"
#include "umbilic/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace umbilic {

std::string_view to_string(DefectVerdict verdict) {
    switch (verdict) {
        case DefectVerdict::Satisfied: return "satisfied";
        case DefectVerdict::Violated: return "violated";
        case DefectVerdict::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

DefectVerdict classify_defect(double value, const Thresholds& thresholds) {
    if (value <= thresholds.planar) return DefectVerdict::Satisfied;
    if (value >= thresholds.reject) return DefectVerdict::Violated;
    return DefectVerdict::Indeterminate;
}

namespace {

Eigen::Matrix3d random_rotation(Rng& rng) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    return q.toRotationMatrix();
}

// Columns e_a with e_a^T g e_b = delta_ab.
ChartMat orthonormal_basis(const ChartMat& g) {
    const ChartMat l = Eigen::LLT<ChartMat>(g).matrixL();
    return l.transpose().triangularView<Eigen::Upper>().solve(ChartMat::Identity(g.rows(), g.cols()));
}

// A unit vector of R^m orthogonal to w, from w's partner in the sample set.
ChartVec orthogonal_partner(const ChartVec& w, const ChartVec& other) {
    if (w.size() == 2) {
        ChartVec y(2);
        y << -w[1], w[0];
        return y;
    }
    ChartVec y = other - other.dot(w) * w;
    if (y.norm() < 1e-3) {
        int k = 0;
        w.cwiseAbs().minCoeff(&k);
        y = ChartVec::Unit(w.size(), k);
        y -= y.dot(w) * w;
    }
    return y.normalized();
}

}  // namespace

std::vector<ChartVec> sample_sphere(int m, const DirectionSampling& sampling) {
    const std::size_t n = sampling.count;
    std::vector<ChartVec> out;
    out.reserve(n);
    Rng rng(sampling.seed, "directions");
    if (m == 1) {
        for (std::size_t k = 0; k < n; ++k) out.push_back(ChartVec::Ones(1));
        return out;
    }
    if (m == 2) {
        const double phase = sampling.seed == 0 ? 0.0 : rng.uniform();
        for (std::size_t k = 0; k < n; ++k) {
            const double a = std::numbers::pi * (static_cast<double>(k) + phase) / static_cast<double>(n);
            ChartVec w(2);
            w << std::cos(a), std::sin(a);
            out.push_back(w);
        }
        return out;
    }
    if (m == 3) {
        const Eigen::Matrix3d rot = sampling.seed == 0 ? Eigen::Matrix3d::Identity() : random_rotation(rng);
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < n; ++k) {
            const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(k);
            const Eigen::Vector3d v = rot * Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), z);
            out.push_back(ChartVec(v));
        }
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        ChartVec w(m);
        for (int i = 0; i < m; ++i) w[i] = rng.normal();
        out.push_back(w.normalized());
    }
    return out;
}

std::vector<ChartVec> sample_unit_directions(const ChartMat& g, const DirectionSampling& sampling) {
    const ChartMat basis = orthonormal_basis(g);
    std::vector<ChartVec> out = sample_sphere(static_cast<int>(g.rows()), sampling);
    for (ChartVec& w : out) w = basis * w;
    return out;
}

std::vector<ChartVec> grid_points(const Box& box, int per_axis) {
    const int m = static_cast<int>(box.lower.size());
    std::vector<ChartVec> out;
    if (per_axis < 1) return out;
    std::size_t total = 1;
    for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(per_axis);
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        ChartVec u(m);
        std::size_t rest = idx;
        for (int i = 0; i < m; ++i) {
            const auto k = static_cast<double>(rest % static_cast<std::size_t>(per_axis));
            rest /= static_cast<std::size_t>(per_axis);
            const double s = per_axis == 1 ? 0.5 : k / static_cast<double>(per_axis - 1);
            u[i] = box.lower[i] + s * (box.upper[i] - box.lower[i]);
        }
        out.push_back(u);
    }
    return out;
}

double umbilicity_defect(const FramePacket& fp, const DirectionSampling& sampling) {
    const int m = fp.m();
    const ChartMat basis = orthonormal_basis(fp.g);
    double worst = 0.0;
    for (const ChartMat& a : fp.alpha_s) {
        // basis^T alpha basis is the operator g^{-1} alpha in orthonormal coordinates
        const ChartMat op = basis.transpose() * a * basis;
        const ChartMat traceless = op - (op.trace() / m) * ChartMat::Identity(m, m);
        worst = std::max(worst, traceless.norm());
    }
    if (m < 2) return worst;
    const std::vector<ChartVec> dirs = sample_sphere(m, sampling);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const ChartVec x = basis * dirs[k];
        const ChartVec y = basis * orthogonal_partner(dirs[k], dirs[(k + 1) % dirs.size()]);
        worst = std::max(worst, (fp.alpha(x, x) - fp.H).norm());
        worst = std::max(worst, fp.alpha(x, y).norm());
    }
    return worst;
}

double umbilicity_defect(const ParametricImmersion& imm, const ChartVec& u, const DirectionSampling& sampling) {
    return umbilicity_defect(frame_at(imm, u), sampling);
}

IsotropySample isotropy_defect(const FramePacket& fp, const DirectionSampling& sampling) {
    const int m = fp.m();
    const ChartMat basis = orthonormal_basis(fp.g);
    const std::vector<ChartVec> dirs = sample_sphere(m, sampling);
    IsotropySample out;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (const ChartVec& w : dirs) {
        const ChartVec x = basis * w;
        const AmbientVec axx = fp.alpha(x, x);
        // b_j = <alpha(x,x), alpha(x,e_j)>; its part orthogonal to w is the
        // largest |<alpha(x,x), alpha(x,y)>| over unit y orthogonal to x
        ChartVec b(m);
        for (int j = 0; j < m; ++j) b[j] = axx.dot(fp.alpha(x, basis.col(j)));
        out.defect = std::max(out.defect, (b - b.dot(w) * w).norm());
        const double sq = axx.squaredNorm();
        lo = std::min(lo, sq);
        hi = std::max(hi, sq);
        sum += sq;
    }
    if (!dirs.empty()) {
        out.lambda = sum / static_cast<double>(dirs.size());
        out.spread = hi - lo;
    }
    return out;
}

IsotropySample isotropy_defect(const ParametricImmersion& imm, const ChartVec& u, const DirectionSampling& sampling) {
    return isotropy_defect(frame_at(imm, u), sampling);
}

namespace {


}  // namespace

namespace {

// sup over interior samples of |grad-perp_T xi| for xi(t) = field(geometry at t).
template <class Field>
double normal_derivative_sup(const ParametricImmersion& imm, const CurveTrajectory& traj, Field&& field) {
    const std::size_t n = traj.size();
    std::vector<AmbientVec> values(n);
    std::vector<TangentGeometry> geoms;
    geoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        geoms.push_back(tangent_geometry(imm, traj.u[i]));
        values[i] = field(geoms.back(), i);
    }
    const std::vector<AmbientVec> d = differentiate_uniform(values, traj.h);
    double sup = 0.0;
    for (std::size_t i = kStencilMargin; i + kStencilMargin < n; ++i) {
        sup = std::max(sup, geoms[i].normal_part(d[i]).norm());
    }
    return sup;
}

}  // namespace

double parallel_normalized_H_defect(const ParametricImmersion& imm, const CurveTrajectory& traj) {
    return normal_derivative_sup(imm, traj, [&](const TangentGeometry& geom, std::size_t i) -> AmbientVec {
        const AmbientVec h = mean_curvature_vector(geom);
        const double norm = h.norm();
        if (norm < kMeanCurvatureFloor) {
            std::ostringstream os;
            os << "|H| = " << norm << " at t = " << traj.t[i];
            throw Error(ErrorKind::MeanCurvatureVanishes, os.str());
        }
        return h / norm;
    });
}

double extrinsic_sphere_defect(const ParametricImmersion& imm, const CurveTrajectory& traj) {
    return normal_derivative_sup(
        imm, traj, [](const TangentGeometry& geom, std::size_t) { return mean_curvature_vector(geom); });
}

NormalEquationResiduals normal_equation_residuals(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                                  const CurveKinematics& kin, double tau_floor) {
    const std::size_t n = kin.size();
    if (n < 2 * kSecondOrderMargin + 1) {
        throw Error(ErrorKind::InsufficientSamples, "curve too short for the normal-equation residuals");
    }
    const std::vector<AmbientVec> d_alpha = normal_derivative_along(imm, traj.u, kin.alpha_tt, traj.h);

    NormalEquationResiduals res;
    res.tau_floor = tau_floor;
    double kmax = 0.0;
    double r_tangent = 0.0, r_normal = 0.0, r_pg_tangent = 0.0, r_pg_normal = 0.0, r_um_tangent = 0.0,
           r_um_normal = 0.0;
    std::size_t evaluated = 0;
    for (std::size_t i = kSecondOrderMargin; i + kSecondOrderMargin < n; ++i) {
        ++res.samples_used;
        const FramePacket fp = frame_at(imm, traj.u[i]);
        const ChartVec& T = traj.T[i];
        const ChartVec& W = kin.W[i];
        const AmbientVec& a_tt = kin.alpha_tt[i];
        const double k = kin.kappa[i];
        const double tau = kin.tau[i];
        const double k2t2 = k * k + tau * tau;
        kmax = std::max(kmax, kin.kappa_tilde[i]);
        if (kin.kappa_tilde[i] < tau_floor) {
            ++res.samples_excluded;
            continue;
        }
        const double tau_prime = tau > 0.0 ? a_tt.dot(d_alpha[i]) / tau : 0.0;
        const double r = std::sqrt(k2t2) >= tau_floor ? (k * kin.kappa_prime[i] + tau * tau_prime) / k2t2 : 0.0;

        const ChartVec a_T = shape_operator_at(fp, a_tt) * T;
        const AmbientVec a_tw = fp.alpha(T, W);
        r_tangent = std::max(r_tangent, g_norm(fp.g, kin.DW[i] + a_T + k2t2 * T - r * W));
        r_normal = std::max(r_normal, (a_tw + d_alpha[i] - r * a_tt).norm());
        r_pg_tangent = std::max(r_pg_tangent, g_norm(fp.g, a_T + tau * tau * T));
        r_um_tangent = std::max(r_um_tangent, g_norm(fp.g, kin.DW[i] + k * k * T - r * W));
        if (tau < tau_floor) {
            ++res.samples_excluded;
            continue;
        }
        ++evaluated;
        r_pg_normal = std::max(r_pg_normal, (a_tw + d_alpha[i] - (tau_prime / tau) * a_tt).norm());
        const AmbientVec abar = a_tt / tau;
        const AmbientVec d_abar = (d_alpha[i] - tau_prime * abar) / tau;
        r_um_normal = std::max(r_um_normal, (tau * d_abar + tau_prime * abar - tau * r * abar).norm());
    }
    if (evaluated == 0 && kmax >= tau_floor) {
        throw Error(ErrorKind::TauFloorViolated, "tau stays below the floor on every interior sample");
    }
    const double scale = kmax * kmax + kResidualScaleFloor;
    res.tangent = r_tangent / scale;
    res.normal = r_normal / scale;
    res.pg_tangent = r_pg_tangent / scale;
    res.pg_normal = r_pg_normal / scale;
    res.umbilic_tangent = r_um_tangent / scale;
    res.umbilic_normal = r_um_normal / scale;
    return res;
}

NormalEquationResiduals normal_equation_residuals(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                                  double tau_floor) {
    return normal_equation_residuals(imm, traj, curve_kinematics(imm, traj), tau_floor);
}

DefectReport make_defect_report(std::string name, std::vector<ChartVec> points, std::vector<double> values,
                                const DirectionSampling& directions, const Thresholds& thresholds) {
    DefectReport report;
    report.name = std::move(name);
    report.points = std::move(points);
    report.values = std::move(values);
    report.directions = directions;
    report.thresholds = thresholds;
    double sum = 0.0;
    for (double v : report.values) {
        report.sup = std::max(report.sup, v);
        sum += v;
    }
    if (!report.values.empty()) report.mean = sum / static_cast<double>(report.values.size());
    report.verdict = classify_defect(report.sup, thresholds);
    return report;
}

DefectReport umbilicity_report(const ParametricImmersion& imm, const std::vector<ChartVec>& points,
                               const DirectionSampling& directions, const Thresholds& thresholds) {
    std::vector<double> values;
    values.reserve(points.size());
    for (const ChartVec& u : points) values.push_back(umbilicity_defect(imm, u, directions));
    return make_defect_report("umbilicity", points, std::move(values), directions, thresholds);
}

DefectReport isotropy_report(const ParametricImmersion& imm, const std::vector<ChartVec>& points,
                             std::vector<double>* lambda, const DirectionSampling& directions,
                             const Thresholds& thresholds) {
    std::vector<double> values;
    values.reserve(points.size());
    if (lambda) lambda->clear();
    for (const ChartVec& u : points) {
        const IsotropySample s = isotropy_defect(imm, u, directions);
        values.push_back(std::max(s.defect, s.spread));
        if (lambda) lambda->push_back(s.lambda);
    }
    return make_defect_report("isotropy", points, std::move(values), directions, thresholds);
}

}  // namespace umbilic
