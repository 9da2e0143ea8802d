#include "umbilic/development.hpp"

#include "umbilic/error.hpp"
#include "umbilic/numdiff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace umbilic {

std::string_view to_string(PlanarityVerdict verdict) {
    switch (verdict) {
        case PlanarityVerdict::Planar: return "planar";
        case PlanarityVerdict::NonPlanar: return "non-planar";
        case PlanarityVerdict::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

PlanarityVerdict classify(double residual_ode, double residual_fit, const Thresholds& thresholds) {
    if (std::max(residual_ode, residual_fit) < thresholds.planar) return PlanarityVerdict::Planar;
    if (std::min(residual_ode, residual_fit) > thresholds.reject) return PlanarityVerdict::NonPlanar;
    return PlanarityVerdict::Indeterminate;
}

double plane_fit_defect(const Eigen::MatrixXd& points) {
    const Eigen::VectorXd s = centred_singular_values(points);
    if (s.size() < 3 || s[0] == 0.0) return 0.0;
    return s[2] / s[0];
}

// ---------------------------------------------------------------------------
// LinearTransport

LinearTransport::LinearTransport(double t0, double h, std::vector<AmbientMat> coefficients)
    : t0_(t0), h_(h), m_(std::move(coefficients)) {
    if (m_.size() < 2) throw Error(ErrorKind::InsufficientSamples, "transport needs at least two samples");
}

AmbientMat LinearTransport::coefficient(double t) const {
    const double x = (t - t0_) / h_;
    const std::size_t n = m_.size();
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < 1e-12 && nearest >= 0.0 && nearest <= static_cast<double>(n - 1)) {
        return m_[static_cast<std::size_t>(nearest)];
    }
    if (n < 4) {
        const std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(x))), n - 2);
        const double w = x - static_cast<double>(i);
        return (1.0 - w) * m_[i] + w * m_[i + 1];
    }
    const long last = static_cast<long>(n) - 4;
    const long j0 = std::clamp(static_cast<long>(std::floor(x)) - 1, 0L, last);
    const double s = x - static_cast<double>(j0);
    const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    const auto j = static_cast<std::size_t>(j0);
    return w0 * m_[j] + w1 * m_[j + 1] + w2 * m_[j + 2] + w3 * m_[j + 3];
}

AmbientMat LinearTransport::step(const AmbientMat& v, double s0, double s1) const {
    const double dt = s1 - s0;
    const AmbientMat a0 = coefficient(s0);
    const AmbientMat am = coefficient(s0 + 0.5 * dt);
    const AmbientMat a1 = coefficient(s1);
    const AmbientMat k1 = -(a0 * v);
    const AmbientMat k2 = -(am * (v + 0.5 * dt * k1));
    const AmbientMat k3 = -(am * (v + 0.5 * dt * k2));
    const AmbientMat k4 = -(a1 * (v + dt * k3));
    return v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

AmbientMat LinearTransport::propagate(const AmbientMat& v, double t_a, double t_b) const {
    const double tol = 1e-9 * h_;
    if (t_a < t_begin() - tol || t_a > t_end() + tol || t_b < t_begin() - tol || t_b > t_end() + tol) {
        std::ostringstream os;
        os << "transport between " << t_a << " and " << t_b << " leaves the span [" << t_begin() << ", " << t_end()
           << "]";
        throw Error(ErrorKind::OutOfSpan, os.str());
    }
    if (t_a == t_b) return v;
    const double dir = t_b > t_a ? 1.0 : -1.0;
    AmbientMat out = v;
    double s = t_a;
    while (dir * (t_b - s) > tol) {
        // next grid point strictly beyond s in the direction of travel
        const double x = (s - t0_) / h_;
        double next_index = dir > 0 ? std::floor(x + 1e-9) + 1.0 : std::ceil(x - 1e-9) - 1.0;
        double next = t0_ + next_index * h_;
        if (dir * (next - t_b) > 0.0) next = t_b;
        out = step(out, s, next);
        s = next;
    }
    return out;
}

std::vector<AmbientMat> LinearTransport::sweep(const AmbientMat& v, std::size_t base_index) const {
    std::vector<AmbientMat> out(m_.size());
    out[base_index] = v;
    auto node = [&](std::size_t i) { return t0_ + h_ * static_cast<double>(i); };
    for (std::size_t i = base_index + 1; i < m_.size(); ++i) out[i] = step(out[i - 1], node(i - 1), node(i));
    for (std::size_t i = base_index; i-- > 0;) out[i] = step(out[i + 1], node(i + 1), node(i));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Coefficient of the transport equation v' = -Gamma(T, v) in chart components.
LinearTransport chart_transport(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                std::vector<ChartMat>* metrics = nullptr) {
    std::vector<AmbientMat> coefficients(traj.size());
    const int m = imm.dim();
    if (metrics) metrics->resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const TangentGeometry geom = tangent_geometry(imm, traj.u[i]);
        if (metrics) (*metrics)[i] = geom.g;
        AmbientMat a(m, m);
        for (int k = 0; k < m; ++k) a.row(k) = traj.T[i].transpose() * geom.gamma[k];
        coefficients[i] = a;
    }
    return LinearTransport(traj.t.front(), traj.h, std::move(coefficients));
}

AmbientMat orthonormal_frame(const ChartMat& g) {
    // columns e_a with E^T g E = I: E = L^{-T}
    const ChartMat l = Eigen::LLT<ChartMat>(g).matrixL();
    return l.transpose().triangularView<Eigen::Upper>().solve(ChartMat::Identity(g.rows(), g.cols()));
}

}  // namespace

std::vector<Eigen::VectorXd> cumulative_integral(const std::vector<Eigen::VectorXd>& f, double h,
                                                 std::size_t base_index) {
    const std::size_t n = f.size();
    std::vector<Eigen::VectorXd> out(n);
    if (n == 0) return out;
    auto interval = [&](std::size_t i) -> Eigen::VectorXd {  // integral over [t_i, t_{i+1}]
        if (n < 4) return 0.5 * h * (f[i] + f[i + 1]);
        if (i == 0) return h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        if (i == n - 2) return h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]);
        return h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    };
    out[base_index] = Eigen::VectorXd::Zero(f[base_index].size());
    for (std::size_t i = base_index + 1; i < n; ++i) out[i] = out[i - 1] + interval(i - 1);
    for (std::size_t i = base_index; i-- > 0;) out[i] = out[i + 1] - interval(i);
    return out;
}

ChartVec parallel_transport(const ParametricImmersion& imm, const CurveTrajectory& traj, const ChartVec& v,
                            double t_a, double t_b) {
    if (traj.size() < 2) throw Error(ErrorKind::OutOfSpan, "trajectory has fewer than two samples");
    const LinearTransport transport = chart_transport(imm, traj);
    const AmbientMat col = v;
    return transport.propagate(col, t_a, t_b).col(0);
}

DevelopedCurve cartan_development(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                  std::size_t base_index) {
    if (base_index >= traj.size()) throw Error(ErrorKind::OutOfSpan, "development base outside the trajectory");
    std::vector<ChartMat> metrics;
    const LinearTransport transport = chart_transport(imm, traj, &metrics);
    const AmbientMat frame0 = orthonormal_frame(metrics[base_index]);
    const std::vector<AmbientMat> frames = transport.sweep(frame0, base_index);

    const std::size_t n = traj.size();
    const int m = imm.dim();
    std::vector<Eigen::VectorXd> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = frames[i].transpose() * (metrics[i] * traj.T[i]);
    }
    const std::vector<Eigen::VectorXd> points = cumulative_integral(coords, traj.h, base_index);

    DevelopedCurve dev;
    dev.base_index = base_index;
    dev.base_point = traj.u[base_index];
    dev.g_base = metrics[base_index];
    dev.t = traj.t;
    dev.position.resize(n);
    dev.velocity.resize(n);
    dev.orthonormal_points.resize(static_cast<Eigen::Index>(n), m);
    for (std::size_t i = 0; i < n; ++i) {
        dev.orthonormal_points.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
        dev.position[i] = frame0 * points[i];
        dev.velocity[i] = frame0 * coords[i];
    }
    return dev;
}

DevelopedCurve cartan_development(const ParametricImmersion& imm, const CurveTrajectory& traj) {
    return cartan_development(imm, traj, traj.origin);
}

Eigen::MatrixXd ambient_development(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                    std::size_t base_index) {
    const AmbientSpace& q = imm.ambient();
    if (!q.is_level_set()) throw Error(ErrorKind::ConfigInvalid, "ambient development needs a level-set ambient");
    if (base_index >= traj.size()) throw Error(ErrorKind::OutOfSpan, "development base outside the trajectory");
    const std::size_t n = traj.size();
    const int dim = imm.ambient_dim();

    // V' = -n (xdot^T Hess F V) / |grad F| keeps V tangent to Q without
    // tangential rotation
    std::vector<AmbientMat> coefficients(n);
    std::vector<AmbientVec> velocity(n);
    AmbientVec base_normal;
    for (std::size_t i = 0; i < n; ++i) {
        const TangentGeometry geom = tangent_geometry(imm, traj.u[i]);
        velocity[i] = geom.tangent(traj.T[i]);
        coefficients[i] = geom.q_normal * (velocity[i].transpose() * geom.q_hessian) / geom.q_grad_norm;
        if (i == base_index) base_normal = geom.q_normal;
    }
    const LinearTransport transport(traj.t.front(), traj.h, std::move(coefficients));

    AmbientMat frame0(dim, dim - 1);
    {
        AmbientMat basis(dim, dim);
        basis.col(0) = base_normal;
        int count = 1;
        while (count < dim) {
            int best = 0;
            double best_norm = -1.0;
            AmbientVec best_vec;
            for (int k = 0; k < dim; ++k) {
                AmbientVec e = AmbientVec::Unit(dim, k);
                for (int sweep = 0; sweep < 2; ++sweep) {
                    for (int c = 0; c < count; ++c) e -= basis.col(c).dot(e) * basis.col(c);
                }
                if (e.norm() > best_norm + 1e-14) best_norm = e.norm(), best = k, best_vec = e;
            }
            (void)best;
            basis.col(count++) = best_vec / best_norm;
        }
        frame0 = basis.rightCols(dim - 1);
    }
    const std::vector<AmbientMat> frames = transport.sweep(frame0, base_index);
    std::vector<Eigen::VectorXd> coords(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = frames[i].transpose() * velocity[i];
    const std::vector<Eigen::VectorXd> points = cumulative_integral(coords, traj.h, base_index);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), dim - 1);
    for (std::size_t i = 0; i < n; ++i) out.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    return out;
}

PlanarityReport intrinsic_planarity_residual(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                             const CurveKinematics& kin, const Thresholds& thresholds) {
    const std::size_t n = kin.size();
    if (n < 2 * kSecondOrderMargin + 1) {
        throw Error(ErrorKind::InsufficientSamples, "curve too short for the planarity residual");
    }
    double kmax = 0.0;
    for (std::size_t i = kSecondOrderMargin; i + kSecondOrderMargin < n; ++i) kmax = std::max(kmax, kin.kappa_tilde[i]);
    double worst = 0.0;
    for (std::size_t i = kSecondOrderMargin; i + kSecondOrderMargin < n; ++i) {
        const double k = kin.kappa[i];
        const ChartVec r = k * kin.DW[i] + k * k * k * traj.T[i] - kin.kappa_prime[i] * kin.W[i];
        worst = std::max(worst, g_norm(kin.g[i], r));
    }
    PlanarityReport report;
    report.thresholds = thresholds;
    report.samples_used = n - 2 * kSecondOrderMargin;
    report.residual_ode = worst / (kmax * kmax * kmax + kResidualScaleFloor);
    report.residual_fit = plane_fit_defect(cartan_development(imm, traj).orthonormal_points);
    report.verdict = classify(report.residual_ode, report.residual_fit, thresholds);
    return report;
}

PlanarityReport intrinsic_planarity_residual(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                             const Thresholds& thresholds) {
    return intrinsic_planarity_residual(imm, traj, curve_kinematics(imm, traj), thresholds);
}

PlanarityReport ambient_planarity_residual(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                           const CurveKinematics& kin, const Thresholds& thresholds) {
    const std::size_t n = kin.size();
    if (n < 2 * kSecondOrderMargin + 1) {
        throw Error(ErrorKind::InsufficientSamples, "curve too short for the planarity residual");
    }
    const std::vector<AmbientVec> accel_dot = differentiate_uniform(kin.accel, traj.h);
    const AmbientSpace& q = imm.ambient();
    double kmax = 0.0;
    for (std::size_t i = kSecondOrderMargin; i + kSecondOrderMargin < n; ++i) kmax = std::max(kmax, kin.kappa_tilde[i]);
    double worst = 0.0;
    for (std::size_t i = kSecondOrderMargin; i + kSecondOrderMargin < n; ++i) {
        const AmbientVec d_accel = q.project_tangent(traj.x[i], accel_dot[i]);
        const double k = kin.kappa_tilde[i];
        const double k_prime = k > 0.0 ? kin.accel[i].dot(d_accel) / k : 0.0;
        const AmbientVec r = k * d_accel + k * k * k * kin.velocity[i] - k_prime * kin.accel[i];
        worst = std::max(worst, r.norm());
    }
    PlanarityReport report;
    report.thresholds = thresholds;
    report.samples_used = n - 2 * kSecondOrderMargin;
    report.residual_ode = worst / (kmax * kmax * kmax + kResidualScaleFloor);
    if (q.is_level_set()) {
        report.residual_fit = plane_fit_defect(ambient_development(imm, traj, traj.origin));
    } else {
        Eigen::MatrixXd points(static_cast<Eigen::Index>(n), imm.ambient_dim());
        for (std::size_t i = 0; i < n; ++i) points.row(static_cast<Eigen::Index>(i)) = traj.x[i].transpose();
        report.residual_fit = plane_fit_defect(points);
    }
    report.verdict = classify(report.residual_ode, report.residual_fit, thresholds);
    return report;
}

PlanarityReport ambient_planarity_residual(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                           const Thresholds& thresholds) {
    return ambient_planarity_residual(imm, traj, curve_kinematics(imm, traj), thresholds);
}

}  // namespace umbilic
