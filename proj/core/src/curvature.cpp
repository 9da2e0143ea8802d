#include "umbilic/curvature.hpp"

#include "umbilic/error.hpp"
#include "umbilic/numdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace umbilic {

CurveKinematics curve_kinematics(const ParametricImmersion& imm, const CurveTrajectory& traj) {
    const std::size_t n = traj.size();
    if (n < 5) throw Error(ErrorKind::InsufficientSamples, "curve has fewer than five samples");
    CurveKinematics kin;
    kin.h = traj.h;
    kin.g.resize(n);
    kin.W.resize(n);
    kin.DW.resize(n);
    kin.velocity.resize(n);
    kin.accel.resize(n);
    kin.alpha_tt.resize(n);
    kin.kappa.resize(n);
    kin.kappa_prime.resize(n);
    kin.tau.resize(n);
    kin.kappa_tilde.resize(n);

    // Derivatives are taken of ambient vectors, which stay smooth where chart
    // components of T do not (near coordinate singularities).
    struct Basis {
        FrameMat E;
        ChartMat g_inv;
        ChartVec tangent_components(const AmbientVec& v) const { return g_inv * (E.transpose() * v); }
        AmbientVec tangent(const ChartVec& x) const { return E * x; }
    };
    std::vector<Basis> geom(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TangentGeometry tg = tangent_geometry(imm, traj.u[i]);
        geom[i] = Basis{tg.E, tg.g_inv};
        kin.g[i] = tg.g;
        kin.velocity[i] = tg.tangent(traj.T[i]);
        kin.alpha_tt[i] = tg.alpha(traj.T[i], traj.T[i]);
        kin.tau[i] = kin.alpha_tt[i].norm();
    }
    const std::vector<AmbientVec> dv = differentiate_uniform(kin.velocity, traj.h);
    std::vector<AmbientVec> w_ambient(n);
    for (std::size_t i = 0; i < n; ++i) {
        kin.W[i] = geom[i].tangent_components(dv[i]);
        w_ambient[i] = geom[i].tangent(kin.W[i]);
        // Gauss formula: the ambient acceleration splits exactly into grad_T T and alpha(T, T)
        kin.accel[i] = w_ambient[i] + kin.alpha_tt[i];
        kin.kappa[i] = g_norm(kin.g[i], kin.W[i]);
        kin.kappa_tilde[i] = kin.accel[i].norm();
    }
    const std::vector<AmbientVec> dw = differentiate_uniform(w_ambient, traj.h);
    for (std::size_t i = 0; i < n; ++i) {
        kin.DW[i] = geom[i].tangent_components(dw[i]);
        // kappa' = <W, grad_T W> / kappa stays smooth through kappa -> 0,
        // where differencing |W| would not
        kin.kappa_prime[i] = kin.kappa[i] > 0.0 ? g_inner(kin.g[i], kin.W[i], kin.DW[i]) / kin.kappa[i] : 0.0;
    }
    return kin;
}

double CurvatureProfile::pythagoras_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!interior(i)) continue;
        worst = std::max(worst, std::abs(kappa_tilde[i] * kappa_tilde[i] - kappa[i] * kappa[i] - tau[i] * tau[i]));
    }
    return worst;
}

CurvatureProfile curvature_profile(const CurveTrajectory& traj, const CurveKinematics& kin) {
    CurvatureProfile p;
    p.t = traj.t;
    p.kappa = kin.kappa;
    p.tau = kin.tau;
    p.kappa_tilde = kin.kappa_tilde;
    p.theta.resize(kin.size());
    for (std::size_t i = 0; i < kin.size(); ++i) {
        if (kin.kappa_tilde[i] > p.theta_floor) {
            p.theta[i] = std::atan2(kin.kappa[i], kin.tau[i]);
        } else {
            p.theta[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return p;
}

CurvatureProfile curvature_profile(const ParametricImmersion& imm, const CurveTrajectory& traj) {
    return curvature_profile(traj, curve_kinematics(imm, traj));
}

ExtrinsicShape extrinsic_shape(const ParametricImmersion& imm, const CurveTrajectory& traj) {
    ExtrinsicShape shape;
    shape.t = traj.t;
    shape.position = traj.x;
    const std::size_t n = traj.size();
    shape.velocity.resize(n);
    shape.acceleration.resize(n);
    const CurveKinematics kin = curve_kinematics(imm, traj);
    shape.velocity = kin.velocity;
    shape.acceleration = kin.accel;
    return shape;
}

double masked_stdev(const std::vector<double>& values, const std::vector<bool>& mask) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (mask[i]) sum += values[i], ++count;
    }
    if (count == 0) return 0.0;
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (mask[i]) sq += (values[i] - mean) * (values[i] - mean);
    }
    return std::sqrt(sq / static_cast<double>(count));
}

}  // namespace umbilic
