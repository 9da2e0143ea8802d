#pragma once

#include "umbilic/curvature.hpp"
#include "umbilic/development.hpp"
#include "umbilic/frame.hpp"
#include "umbilic/immersion.hpp"
#include "umbilic/trajectory.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace umbilic {

/// Verdict of a defect against the shared bands: satisfied at or below
/// `planar`, violated at or above `reject`.
enum class DefectVerdict { Satisfied, Violated, Indeterminate };

std::string_view to_string(DefectVerdict verdict);
DefectVerdict classify_defect(double value, const Thresholds& thresholds);

inline constexpr double kTauFloor = 1e-6;
inline constexpr double kMeanCurvatureFloor = 1e-8;

/// Deterministic unit directions. m = 2: equally spaced half-circle angles
/// (directions and their negatives give identical defects); m = 3: Fibonacci
/// sphere; otherwise normalised Gaussian samples. A nonzero seed shifts or
/// rotates the set.
struct DirectionSampling {
    std::size_t count = 64;
    std::uint64_t seed = 0;
};

/// Euclidean unit vectors of R^m.
std::vector<ChartVec> sample_sphere(int m, const DirectionSampling& sampling);
/// g-unit chart vectors: the sphere samples mapped through a g-orthonormal frame.
std::vector<ChartVec> sample_unit_directions(const ChartMat& g, const DirectionSampling& sampling);

/// Uniform grid of `per_axis` points along each axis of the box (the centre
/// when per_axis is 1).
std::vector<ChartVec> grid_points(const Box& box, int per_axis);

/// max over normals of |A_s - (tr A_s / m) I|_F for the g-self-adjoint operator
/// A_s = g^{-1} alpha^s, together with the sampled sup of |alpha(X,X) - H| and
/// |alpha(X,Y)| over orthonormal pairs; the larger value is returned.
double umbilicity_defect(const FramePacket& fp, const DirectionSampling& sampling = {});
double umbilicity_defect(const ParametricImmersion& imm, const ChartVec& u, const DirectionSampling& sampling = {});

struct IsotropySample {
    /// max over sampled orthonormal (x, y) of |<alpha(x,x), alpha(x,y)>|
    double defect = 0.0;
    /// mean of |alpha(x,x)|^2
    double lambda = 0.0;
    /// max - min of |alpha(x,x)|^2
    double spread = 0.0;
};

IsotropySample isotropy_defect(const FramePacket& fp, const DirectionSampling& sampling = {});
IsotropySample isotropy_defect(const ParametricImmersion& imm, const ChartVec& u,
                               const DirectionSampling& sampling = {});

/// sup |grad-perp_T (H / |H|)| over interior samples. Throws
/// MeanCurvatureVanishes where |H| < kMeanCurvatureFloor.
double parallel_normalized_H_defect(const ParametricImmersion& imm, const CurveTrajectory& traj);
/// sup |grad-perp_T H| over interior samples.
double extrinsic_sphere_defect(const ParametricImmersion& imm, const CurveTrajectory& traj);

/// Sup-norms of the tangent and normal parts of the extrinsic planarity
/// equation and of its pseudo-geodesic and umbilic specialisations, each
/// divided by (kappa_tilde_max^2 + 1e-12).
///
///   tangent          grad^2 T + A_{alpha(T,T)} T + (k^2 + t^2) T - r grad T
///   normal           alpha(T, grad T) + grad-perp alpha(T,T) - r alpha(T,T)
///   pg_tangent       A_{alpha(T,T)} T + t^2 T
///   pg_normal        alpha(T, grad T) + grad-perp alpha(T,T) - (t'/t) alpha(T,T)
///   umbilic_tangent  grad^2 T + k^2 T - r grad T
///   umbilic_normal   t grad-perp abar + t' abar - t r abar,  abar = alpha(T,T)/t
///
/// with r = (k k' + t t') / (k^2 + t^2).
struct NormalEquationResiduals {
    double tangent = 0.0;
    double normal = 0.0;
    double pg_tangent = 0.0;
    double pg_normal = 0.0;
    double umbilic_tangent = 0.0;
    double umbilic_normal = 0.0;
    double tau_floor = kTauFloor;
    std::size_t samples_used = 0;
    /// Interior samples skipped by the tau-divided equations.
    std::size_t samples_excluded = 0;
};

/// Samples with tau below the floor are skipped by the equations that divide
/// by tau; where kappa_tilde is also below it every term vanishes. Throws
/// TauFloorViolated when curvature is present but every sample is skipped.
NormalEquationResiduals normal_equation_residuals(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                                  double tau_floor = kTauFloor);
NormalEquationResiduals normal_equation_residuals(const ParametricImmersion& imm, const CurveTrajectory& traj,
                                                  const CurveKinematics& kin, double tau_floor = kTauFloor);

struct DefectReport {
    std::string name;
    std::vector<ChartVec> points;
    std::vector<double> values;
    double sup = 0.0;
    double mean = 0.0;
    DirectionSampling directions;
    Thresholds thresholds;
    DefectVerdict verdict = DefectVerdict::Indeterminate;
};

DefectReport make_defect_report(std::string name, std::vector<ChartVec> points, std::vector<double> values,
                                const DirectionSampling& directions, const Thresholds& thresholds);

DefectReport umbilicity_report(const ParametricImmersion& imm, const std::vector<ChartVec>& points,
                               const DirectionSampling& directions = {}, const Thresholds& thresholds = {});

/// Isotropy over a grid: the report carries the pointwise defects; `lambda`
/// receives the per-point estimates.
DefectReport isotropy_report(const ParametricImmersion& imm, const std::vector<ChartVec>& points,
                             std::vector<double>* lambda, const DirectionSampling& directions = {},
                             const Thresholds& thresholds = {});

}  // namespace umbilic
