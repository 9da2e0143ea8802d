#pragma once

#include "umbilic/immersion.hpp"
#include "umbilic/numdiff.hpp"
#include "umbilic/trajectory.hpp"

#include <cmath>
#include <vector>

namespace umbilic {

/// Samples at each end whose values involve a twice-differentiated quantity
/// with one-sided stencils; residual sup-norms skip them.
inline constexpr std::size_t kSecondOrderMargin = 2 * kStencilMargin;

/// Per-sample derivative data of a trajectory, shared by the curvature
/// profile, the planarity residuals and the diagnostics.
struct CurveKinematics {
    double h = 0.0;
    std::vector<ChartMat> g;
    std::vector<ChartVec> W;           // grad_T T
    std::vector<ChartVec> DW;          // grad_T grad_T T
    std::vector<AmbientVec> velocity;  // E T
    std::vector<AmbientVec> accel;     // grad_T T + alpha(T, T) as an ambient vector
    std::vector<AmbientVec> alpha_tt;  // alpha(T, T)
    std::vector<double> kappa;
    std::vector<double> kappa_prime;
    std::vector<double> tau;
    std::vector<double> kappa_tilde;

    std::size_t size() const { return kappa.size(); }
};

/// Throws InsufficientSamples for trajectories shorter than five samples.
CurveKinematics curve_kinematics(const ParametricImmersion& imm, const CurveTrajectory& traj);

struct CurvatureProfile {
    std::vector<double> t;
    std::vector<double> kappa;
    std::vector<double> tau;
    std::vector<double> kappa_tilde;
    /// Angle between the ambient acceleration and the normal space (the
    /// Wunderlich angle for surfaces in R^3); NaN where kappa_tilde is below
    /// theta_floor.
    std::vector<double> theta;
    double theta_floor = 1e-6;
    /// Leading and trailing samples computed with one-sided stencils.
    std::size_t margin = kStencilMargin;

    std::size_t size() const { return t.size(); }
    bool theta_defined(std::size_t i) const { return !std::isnan(theta[i]); }
    bool interior(std::size_t i) const { return i >= margin && i + margin < size(); }
    /// max |kappa_tilde^2 - kappa^2 - tau^2| over interior samples.
    double pythagoras_defect() const;
};

CurvatureProfile curvature_profile(const ParametricImmersion& imm, const CurveTrajectory& traj);
CurvatureProfile curvature_profile(const CurveTrajectory& traj, const CurveKinematics& kin);

struct ExtrinsicShape {
    std::vector<double> t;
    std::vector<AmbientVec> position;
    std::vector<AmbientVec> velocity;
    /// Ambient covariant acceleration grad_T T + alpha(T, T).
    std::vector<AmbientVec> acceleration;
};

/// Throws InsufficientSamples below five samples.
ExtrinsicShape extrinsic_shape(const ParametricImmersion& imm, const CurveTrajectory& traj);

/// Population standard deviation of values[i] over indices with mask[i].
double masked_stdev(const std::vector<double>& values, const std::vector<bool>& mask);

}  // namespace umbilic
