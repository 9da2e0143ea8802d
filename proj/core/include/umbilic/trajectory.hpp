#pragma once

#include "umbilic/frame.hpp"
#include "umbilic/immersion.hpp"

#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace umbilic {

enum class CurveKind { Geodesic, PseudoGeodesic, PrescribedKappa, Sampled };

std::string_view to_string(CurveKind kind);

/// Initial data of a planar c-pseudo-geodesic: position, g-orthonormal (x, y),
/// constant c, parameter span containing 0 and step.
struct PseudoGeodesicSpec {
    ChartVec p;
    ChartVec x;
    ChartVec y;
    double c = 0.0;
    double t_min = -std::numbers::pi;
    double t_max = std::numbers::pi;
    double h = 1e-3;
};

/// Throws ConfigInvalid unless (x, y) is g-orthonormal at p to 1e-10, the span
/// contains 0 and h > 0.
void validate(const ParametricImmersion& imm, const PseudoGeodesicSpec& spec);

/// Builds a valid spec from arbitrary directions: x is normalised and y is
/// Gram-Schmidt orthogonalised against it in the metric at p. An empty y
/// selects a deterministic complement (positively oriented when m = 2).
PseudoGeodesicSpec make_spec(const ParametricImmersion& imm, const ChartVec& p, const ChartVec& x,
                             const ChartVec& y, double c, double t_min = -std::numbers::pi,
                             double t_max = std::numbers::pi, double h = 1e-3);

/// A unit vector g-orthogonal to x, chosen from the coordinate directions.
ChartVec orthogonal_complement(const ChartMat& g, const ChartVec& x);

struct CurveTrajectory {
    CurveKind kind = CurveKind::Geodesic;
    double c = 0.0;
    std::function<double(double)> prescribed_kappa;
    double h = 0.0;

    std::vector<double> t;
    std::vector<ChartVec> u;
    std::vector<ChartVec> T;
    std::vector<ChartVec> Y;
    std::vector<AmbientVec> x;
    /// Index of the sample at t = 0.
    std::size_t origin = 0;

    bool truncated = false;
    std::string truncation;
    /// Parameter values where sigma(T, T) changes sign (hypersurfaces) or its
    /// norm drops below 1e-6 (higher codimension).
    std::vector<double> tau_events;
    /// Largest deviation of |T|_g, |Y|_g, <T,Y>_g from (1, 1, 0) before each
    /// renormalisation.
    double max_drift = 0.0;

    std::size_t size() const { return t.size(); }
    /// Reverses the direction of travel: t -> -t, T -> -T.
    CurveTrajectory reversed() const;
};

CurveTrajectory integrate_geodesic(const ParametricImmersion& imm, const ChartVec& p, const ChartVec& x,
                                   double t_min = -std::numbers::pi, double t_max = std::numbers::pi,
                                   double h = 1e-3);

/// Integrates grad_T T = c s Y, grad_T Y = -c s T with s the signed normal
/// curvature sigma(T,T) for hypersurfaces of Q and |alpha(T,T)| otherwise.
CurveTrajectory integrate_planar_pseudo_geodesic(const ParametricImmersion& imm, const PseudoGeodesicSpec& spec);

/// Integrates the planar curve system grad_T T = kappa(t) Y, grad_T Y = -kappa(t) T.
CurveTrajectory integrate_planar_prescribed_kappa(const ParametricImmersion& imm, const ChartVec& p,
                                                  const ChartVec& x, const ChartVec& y,
                                                  std::function<double(double)> kappa,
                                                  double t_min = -std::numbers::pi,
                                                  double t_max = std::numbers::pi, double h = 1e-3);

/// Signed normal curvature for hypersurfaces of Q, |alpha(X,X)| otherwise,
/// 0 in codimension 0.
double pseudo_geodesic_sigma(const TangentGeometry& geom, const ChartVec& x);

/// Sup-norms over interior samples of the integrated equations, using
/// differentiated samples: |grad_T T - k Y|_g and |grad_T Y + k T|_g.
struct OdeResidual {
    double acceleration = 0.0;
    double frame = 0.0;
};
OdeResidual ode_residual(const ParametricImmersion& imm, const CurveTrajectory& traj);

/// Sample a curve given in chart coordinates u(sigma) with derivative
/// du/dsigma, reparametrised by arc length with 0 at sigma0.
CurveTrajectory trajectory_from_chart_curve(const ParametricImmersion& imm,
                                            const std::function<ChartVec(double)>& curve,
                                            const std::function<ChartVec(double)>& derivative, double sigma0,
                                            double t_min, double t_max, double h);

/// Sample an ambient curve x(sigma) lying on the image of the immersion,
/// reparametrised by arc length and pulled back to the chart by Gauss-Newton
/// continuation from `u_guess`.
CurveTrajectory trajectory_from_ambient_curve(const ParametricImmersion& imm,
                                              const std::function<AmbientVec(double)>& curve,
                                              const std::function<AmbientVec(double)>& derivative,
                                              double sigma0, const ChartVec& u_guess, double t_min, double t_max,
                                              double h);

/// Chart point whose image is closest to `target`, by Gauss-Newton from `guess`.
ChartVec invert_chart(const ParametricImmersion& imm, const AmbientVec& target, ChartVec guess);

}  // namespace umbilic
