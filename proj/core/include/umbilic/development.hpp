#pragma once

#include "umbilic/curvature.hpp"
#include "umbilic/immersion.hpp"
#include "umbilic/trajectory.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace umbilic {

/// Verdict bands shared by every planarity and defect test.
struct Thresholds {
    double planar = 1e-6;
    double reject = 1e-4;
};

enum class PlanarityVerdict { Planar, NonPlanar, Indeterminate };

std::string_view to_string(PlanarityVerdict verdict);

/// Planar iff max(ode, fit) < planar; non-planar iff min(ode, fit) > reject.
PlanarityVerdict classify(double residual_ode, double residual_fit, const Thresholds& thresholds);

struct PlanarityReport {
    double residual_ode = 0.0;
    double residual_fit = 0.0;
    PlanarityVerdict verdict = PlanarityVerdict::Indeterminate;
    Thresholds thresholds;
    std::size_t samples_used = 0;
};

/// Normalisation offset of the residual functionals; keeps geodesics (zero
/// curvature) at residual zero instead of 0/0.
inline constexpr double kResidualScaleFloor = 1e-12;

/// Ratio s3/s1 of the singular values of the centred point cloud (rows are
/// points); 0 when the cloud spans fewer than three dimensions.
double plane_fit_defect(const Eigen::MatrixXd& points);

/// Solves V' = -M(t) V on a uniform grid of coefficient samples; M between
/// grid points is cubic Lagrange interpolation of the samples.
class LinearTransport {
public:
    LinearTransport(double t0, double h, std::vector<AmbientMat> coefficients);

    AmbientMat coefficient(double t) const;
    /// RK4 from t_a to t_b, stepping through every grid point in between.
    AmbientMat propagate(const AmbientMat& v, double t_a, double t_b) const;
    /// V at every grid point, starting from V(t_base_index) = v.
    std::vector<AmbientMat> sweep(const AmbientMat& v, std::size_t base_index) const;

    double t_begin() const { return t0_; }
    double t_end() const { return t0_ + h_ * static_cast<double>(m_.size() - 1); }

private:
    AmbientMat step(const AmbientMat& v, double s0, double s1) const;

    double t0_;
    double h_;
    std::vector<AmbientMat> m_;
};

/// Parallel transport of tangent vector v (chart components) from parameter
/// t_a to t_b along the trajectory. Throws OutOfSpan.
ChartVec parallel_transport(const ParametricImmersion& imm, const CurveTrajectory& traj, const ChartVec& v,
                            double t_a, double t_b);

struct DevelopedCurve {
    std::size_t base_index = 0;
    ChartVec base_point;
    ChartMat g_base;
    std::vector<double> t;
    /// gamma*(t) and (gamma*)'(t) as chart components at the base point.
    std::vector<ChartVec> position;
    std::vector<ChartVec> velocity;
    /// The same points in a g(base)-orthonormal frame; rows are samples.
    Eigen::MatrixXd orthonormal_points;
};

/// Cartan development into T_pM with p = gamma(t[base_index]).
DevelopedCurve cartan_development(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                  std::size_t base_index);
DevelopedCurve cartan_development(const ParametricImmersion& imm, const CurveTrajectory& traj);

/// Cartan development of the extrinsic shape inside a level-set ambient Q,
/// as points in an orthonormal frame of T_{x(base)} Q (rows are samples).
Eigen::MatrixXd ambient_development(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                    std::size_t base_index);

/// Residual of kappa grad^2 T + kappa^3 T - kappa' grad T together with a plane
/// fit of the Cartan development.
PlanarityReport intrinsic_planarity_residual(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                             const Thresholds& thresholds = {});
PlanarityReport intrinsic_planarity_residual(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                             const CurveKinematics& kin, const Thresholds& thresholds = {});

/// The same test for the extrinsic shape in Q: ambient covariant derivatives
/// and a plane fit of the positions (R^N) or of the development in Q.
PlanarityReport ambient_planarity_residual(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                           const Thresholds& thresholds = {});
PlanarityReport ambient_planarity_residual(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                           const CurveKinematics& kin, const Thresholds& thresholds = {});

/// Cumulative integral of uniformly sampled values with F(base) = 0, fourth
/// order for four or more samples.
std::vector<Eigen::VectorXd> cumulative_integral(const std::vector<Eigen::VectorXd>& f, double h,
                                                 std::size_t base_index);

}  // namespace umbilic
