#pragma once

#include "umbilic/immersion.hpp"
#include "umbilic/linalg.hpp"

#include <span>
#include <vector>

namespace umbilic {

inline constexpr double kRankTolerance = 1e-8;

/// Metric-level data at a chart point: everything needed by the integrators
/// without building a normal frame.
struct TangentGeometry {
    ChartVec u;
    AmbientVec position;
    FrameMat E;               // N x m, columns d_i f
    SecondPartials second;    // raw d_i d_j f
    SecondPartials second_q;  // d_i d_j f projected onto T Q
    ThirdPartials third;      // empty unless requested
    ChartMat g;
    ChartMat g_inv;
    ChartMat g_chol;  // lower Cholesky factor of g
    Christoffel gamma;

    // Level-set ambients only (empty / zero otherwise).
    AmbientVec q_normal;
    double q_grad_norm = 0.0;
    AmbientMat q_hessian;

    int m() const { return static_cast<int>(E.cols()); }
    int N() const { return static_cast<int>(E.rows()); }
    bool level_set() const { return q_normal.size() > 0; }

    AmbientVec tangent(const ChartVec& x) const { return E * x; }
    /// Chart components of the M-tangential part of an ambient vector.
    ChartVec tangent_components(const AmbientVec& v) const { return g_inv * (E.transpose() * v); }
    AmbientVec project_q(const AmbientVec& v) const;
    /// Orthogonal projection onto the normal space of M inside T Q.
    AmbientVec normal_part(const AmbientVec& v) const;
    ChartVec christoffel(const ChartVec& x, const ChartVec& y) const { return contract_christoffel(gamma, x, y); }
    /// Second fundamental form alpha(X, Y) as an ambient vector.
    AmbientVec alpha(const ChartVec& x, const ChartVec& y) const;
    /// Ambient covariant acceleration of a curve with velocity X and chart
    /// acceleration Xdot: the T Q projection of E Xdot + d2f(X, X).
    AmbientVec ambient_acceleration(const ChartVec& x, const ChartVec& xdot) const;
};

/// Evaluates metric-level data; `order` 3 also fills third partials.
/// Throws RankDeficient, ContainmentViolated, DomainExceeded.
TangentGeometry tangent_geometry(const ParametricImmersion& imm, const ChartVec& u, int order = 2);

/// H = (1/m) g^{ij} alpha(E_i, E_j), without building a normal frame.
AmbientVec mean_curvature_vector(const TangentGeometry& geom);

/// Unit normal of a hypersurface of Q, oriented so that
/// det[E_1..E_m, N (, grad F)] > 0.
AmbientVec oriented_hypersurface_normal(const TangentGeometry& geom);

struct FramePacket : TangentGeometry {
    AmbientMat normals;            // N x n, orthonormal, spanning N_pM within T_pQ
    std::vector<ChartMat> alpha_s;  // alpha^s_ij = <d_i d_j f, normal_s>
    AmbientVec H;
    double H_norm = 0.0;

    int codim() const { return static_cast<int>(normals.cols()); }
    /// Components <v, normal_s>.
    AmbientVec normal_components(const AmbientVec& v) const { return normals.transpose() * v; }
};

FramePacket frame_at(const ParametricImmersion& imm, const ChartVec& u, int order = 2);
FramePacket frame_from(TangentGeometry geom);

/// Shape operator in chart components under the convention that A_eta X is the
/// tangential part of the ambient derivative of eta, so that
/// <alpha(X,Y), eta> + <A_eta X, Y>_g = 0. Throws NormalOutsideBundle.
ChartMat shape_operator_at(const FramePacket& fp, const AmbientVec& eta);

enum class DerivativeRoute { Automatic, ThirdPartials, FiniteDifference };

/// (nabla*_X alpha)(Y, Z): normal connection derivative of the second
/// fundamental form. The third-partials route needs order-3 jets; the finite
/// difference route differentiates alpha(Y_t, Z_t) along the geodesic with
/// initial velocity X, with Y and Z parallel transported.
AmbientVec nabla_star_alpha(const ParametricImmersion& imm, const ChartVec& u, const ChartVec& x,
                            const ChartVec& y, const ChartVec& z,
                            DerivativeRoute route = DerivativeRoute::Automatic);

/// Normal connection derivative of a normal field sampled on a uniform grid
/// along a chart curve. Throws InsufficientSamples below three samples.
std::vector<AmbientVec> normal_derivative_along(const ParametricImmersion& imm, std::span<const ChartVec> u,
                                                std::span<const AmbientVec> xi, double step);

}  // namespace umbilic
