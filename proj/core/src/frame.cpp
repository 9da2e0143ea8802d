#include "umbilic/frame.hpp"

#include "umbilic/error.hpp"
#include "umbilic/numdiff.hpp"

#include <sstream>

namespace umbilic {

namespace {

double smallest_eigenvalue(const ChartMat& g) {
    const int m = static_cast<int>(g.rows());
    if (m == 1) return g(0, 0);
    if (m == 2) {
        const double mean = 0.5 * (g(0, 0) + g(1, 1));
        const double half = 0.5 * (g(0, 0) - g(1, 1));
        return mean - std::hypot(half, g(0, 1));
    }
    Eigen::SelfAdjointEigenSolver<ChartMat> eig(g, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

ChartMat small_inverse(const ChartMat& g, const Eigen::LLT<ChartMat>& llt) {
    switch (g.rows()) {
        case 1: return ChartMat::Constant(1, 1, 1.0 / g(0, 0));
        case 2: return Eigen::Matrix2d(g).inverse();
        case 3: return Eigen::Matrix3d(g).inverse();
        case 4: return Eigen::Matrix4d(g).inverse();
        default: return llt.solve(ChartMat::Identity(g.rows(), g.cols()));
    }
}

// Appends v to the orthonormal columns basis[0..count) if its residual is
// large enough; two Gram-Schmidt sweeps keep orthogonality near round-off.
bool append_orthonormal(AmbientMat& basis, int& count, AmbientVec v, double floor) {
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (int k = 0; k < count; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    }
    const double norm = v.norm();
    if (norm <= floor) return false;
    basis.col(count++) = v / norm;
    return true;
}

// Closed-form determinants for the common small sizes; LU otherwise.
double determinant(const AmbientMat& a) {
    switch (a.rows()) {
        case 2: return Eigen::Matrix2d(a).determinant();
        case 3: return Eigen::Matrix3d(a).determinant();
        case 4: return Eigen::Matrix4d(a).determinant();
        default: return a.determinant();
    }
}

struct GeodesicState {
    ChartVec u, v, y, z;
};

GeodesicState geodesic_rhs(const ParametricImmersion& imm, const GeodesicState& s) {
    const TangentGeometry geom = tangent_geometry(imm, s.u);
    GeodesicState d;
    d.u = s.v;
    d.v = -geom.christoffel(s.v, s.v);
    d.y = -geom.christoffel(s.v, s.y);
    d.z = -geom.christoffel(s.v, s.z);
    return d;
}

GeodesicState axpy(const GeodesicState& s, double a, const GeodesicState& d) {
    return {s.u + a * d.u, s.v + a * d.v, s.y + a * d.y, s.z + a * d.z};
}

GeodesicState rk4_step(const ParametricImmersion& imm, const GeodesicState& s, double h) {
    const GeodesicState k1 = geodesic_rhs(imm, s);
    const GeodesicState k2 = geodesic_rhs(imm, axpy(s, 0.5 * h, k1));
    const GeodesicState k3 = geodesic_rhs(imm, axpy(s, 0.5 * h, k2));
    const GeodesicState k4 = geodesic_rhs(imm, axpy(s, h, k3));
    GeodesicState out = s;
    out.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    out.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    out.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    out.z += h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    return out;
}

AmbientVec nabla_star_third(const ParametricImmersion& imm, const ChartVec& u, const ChartVec& x,
                            const ChartVec& y, const ChartVec& z) {
    const TangentGeometry geom = tangent_geometry(imm, u, 3);
    const ChartVec gxy = geom.christoffel(x, y);
    const ChartVec gxz = geom.christoffel(x, z);
    const ChartVec gyz = geom.christoffel(y, z);
    AmbientVec out = geom.normal_part(contract3(geom.third, x, y, z)) - geom.alpha(x, gyz) - geom.alpha(gxy, z) -
                     geom.alpha(y, gxz);
    if (geom.level_set()) {
        // derivative of the T Q projection applied to d2f(Y, Z)
        const AmbientVec w = contract2(geom.second, y, z);
        const AmbientVec dn = geom.q_hessian * geom.tangent(x) / geom.q_grad_norm;
        out -= geom.q_normal.dot(w) * geom.normal_part(dn);
    }
    return out;
}

AmbientVec nabla_star_fd(const ParametricImmersion& imm, const ChartVec& u, const ChartVec& x, const ChartVec& y,
                         const ChartVec& z) {
    const TangentGeometry base = tangent_geometry(imm, u);
    const double speed = g_norm(base.g, x);
    if (speed == 0.0) return AmbientVec::Zero(base.N());
    const double delta = 1e-3 / speed;
    std::vector<AmbientVec> samples(5);
    samples[2] = base.alpha(y, z);
    try {
        for (int dir : {1, -1}) {
            GeodesicState s{u, x, y, z};
            for (int k = 1; k <= 2; ++k) {
                s = rk4_step(imm, s, dir * delta);
                samples[2 + dir * k] = tangent_geometry(imm, s.u).alpha(s.y, s.z);
            }
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::DomainExceeded) {
            throw Error(ErrorKind::DerivativeUnavailable, "finite-difference stencil leaves the chart domain");
        }
        throw;
    }
    const AmbientVec d = (samples[0] - 8.0 * samples[1] + 8.0 * samples[3] - samples[4]) / (12.0 * delta);
    return base.normal_part(d);
}

}  // namespace

AmbientVec mean_curvature_vector(const TangentGeometry& geom) {
    const int m = geom.m();
    AmbientVec trace = AmbientVec::Zero(geom.N());
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) trace += geom.g_inv(i, j) * geom.second.col(i * m + j);
    }
    return geom.normal_part(trace) / m;
}

AmbientVec TangentGeometry::project_q(const AmbientVec& v) const {
    if (!level_set()) return v;
    return v - q_normal.dot(v) * q_normal;
}

AmbientVec TangentGeometry::normal_part(const AmbientVec& v) const {
    const AmbientVec w = project_q(v);
    return w - E * tangent_components(w);
}

AmbientVec TangentGeometry::alpha(const ChartVec& x, const ChartVec& y) const {
    return contract2(second_q, x, y) - E * christoffel(x, y);
}

AmbientVec TangentGeometry::ambient_acceleration(const ChartVec& x, const ChartVec& xdot) const {
    return E * xdot + contract2(second_q, x, x);
}

TangentGeometry tangent_geometry(const ParametricImmersion& imm, const ChartVec& u, int order) {
    const Jet jet = imm.jet(u, std::max(order, 2));
    const int m = imm.dim();
    const AmbientSpace& q = imm.ambient();

    TangentGeometry geom;
    geom.u = u;
    geom.position = jet.position;
    geom.E = jet.first;
    geom.second = jet.second;
    if (order >= 3) geom.third = jet.third;

    if (q.is_level_set()) {
        const ConstraintJet c = q.constraint(jet.position);
        if (!(std::abs(c.value) < q.containment_tolerance())) {
            std::ostringstream os;
            os << "|F| = " << std::abs(c.value) << " at the image of (" << u.transpose() << ") on " << imm.name();
            throw Error(ErrorKind::ContainmentViolated, os.str());
        }
        geom.q_grad_norm = c.gradient.norm();
        if (geom.q_grad_norm <= AmbientSpace::kGradientFloor) {
            throw Error(ErrorKind::RankDeficient, "level-set gradient vanishes on " + imm.name());
        }
        geom.q_normal = c.gradient / geom.q_grad_norm;
        geom.q_hessian = c.hessian;
        geom.second_q = geom.second - geom.q_normal * (geom.q_normal.transpose() * geom.second);
    } else {
        geom.second_q = geom.second;
    }

    geom.g = geom.E.transpose() * geom.E;
    if (!geom.g.allFinite()) throw Error(ErrorKind::StepRejected, "non-finite tangent vectors on " + imm.name());
    if (smallest_eigenvalue(geom.g) <= kRankTolerance * kRankTolerance) {
        std::ostringstream os;
        os << imm.name() << " is degenerate at (" << u.transpose() << ")";
        throw Error(ErrorKind::RankDeficient, os.str());
    }
    Eigen::LLT<ChartMat> llt(geom.g);
    geom.g_chol = llt.matrixL();
    geom.g_inv = small_inverse(geom.g, llt);
    geom.g_inv = 0.5 * (geom.g_inv + geom.g_inv.transpose()).eval();

    // Gamma^k_ij = g^{kl} <d_i d_j f, E_l>, symmetric in (i, j)
    double lowered[kMaxChartDim][kMaxChartDim][kMaxChartDim];
    for (int l = 0; l < m; ++l) {
        for (int i = 0; i < m; ++i) {
            for (int j = i; j < m; ++j) lowered[l][i][j] = geom.E.col(l).dot(geom.second.col(i * m + j));
        }
    }
    for (int k = 0; k < m; ++k) {
        geom.gamma[k].resize(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = i; j < m; ++j) {
                double sum = 0.0;
                for (int l = 0; l < m; ++l) sum += geom.g_inv(k, l) * lowered[l][i][j];
                geom.gamma[k](i, j) = sum;
                geom.gamma[k](j, i) = sum;
            }
        }
    }
    return geom;
}

AmbientVec oriented_hypersurface_normal(const TangentGeometry& geom) {
    const int n = geom.N();
    const int m = geom.m();
    const int extra = geom.level_set() ? 1 : 0;
    if (n - m - extra != 1) throw Error(ErrorKind::ConfigInvalid, "not a hypersurface of its ambient space");
    if (n <= 4) {
        // cofactor vector c_k = det[M, e_k] of M = [E, q]; det[M, c] = |c|^2 > 0
        AmbientMat a(n, n);
        a.leftCols(m) = geom.E;
        if (extra) a.col(m) = geom.q_normal;
        AmbientVec c(n);
        for (int k = 0; k < n; ++k) {
            a.col(n - 1) = AmbientVec::Unit(n, k);
            c[k] = determinant(a);
        }
        const double norm = c.norm();
        if (norm > 0.0) return (extra ? -c : c) / norm;
    }
    AmbientMat basis(n, n);
    int count = 0;
    for (int i = 0; i < m; ++i) append_orthonormal(basis, count, geom.E.col(i), 0.0);
    if (extra) append_orthonormal(basis, count, geom.q_normal, 0.0);
    int best = 0;
    double best_norm = -1.0;
    for (int k = 0; k < n; ++k) {
        AmbientVec e = AmbientVec::Unit(n, k);
        for (int c = 0; c < count; ++c) e -= basis.col(c).dot(e) * basis.col(c);
        if (e.norm() > best_norm) best_norm = e.norm(), best = k;
    }
    append_orthonormal(basis, count, AmbientVec::Unit(n, best), 0.0);
    AmbientVec normal = basis.col(count - 1);
    AmbientMat oriented(n, n);
    oriented.leftCols(m) = geom.E;
    oriented.col(m) = normal;
    if (extra) oriented.col(m + 1) = geom.q_normal;
    if (determinant(oriented) < 0.0) normal = -normal;
    return normal;
}

FramePacket frame_from(TangentGeometry geom) {
    FramePacket fp;
    static_cast<TangentGeometry&>(fp) = std::move(geom);
    const int n = fp.N();
    const int m = fp.m();
    const int extra = fp.level_set() ? 1 : 0;
    const int codim = n - m - extra;

    if (codim == 1) {
        fp.normals = oriented_hypersurface_normal(fp);
    } else {
        AmbientMat basis(n, n);
        int count = 0;
        for (int i = 0; i < m; ++i) append_orthonormal(basis, count, fp.E.col(i), 0.0);
        if (extra) append_orthonormal(basis, count, fp.q_normal, 0.0);
        const int start = count;
        // pivoted Gram-Schmidt of the canonical basis: take the candidate with
        // the largest residual each round
        while (count < n) {
            int best = -1;
            double best_norm = 0.0;
            for (int k = 0; k < n; ++k) {
                AmbientVec e = AmbientVec::Unit(n, k);
                for (int c = 0; c < count; ++c) e -= basis.col(c).dot(e) * basis.col(c);
                const double r = e.norm();
                if (r > best_norm + 1e-14) best_norm = r, best = k;
            }
            if (best < 0 || !append_orthonormal(basis, count, AmbientVec::Unit(n, best), 1e-12)) break;
        }
        fp.normals = basis.middleCols(start, count - start);
    }

    fp.alpha_s.resize(static_cast<std::size_t>(fp.codim()));
    fp.H = AmbientVec::Zero(n);
    for (int s = 0; s < fp.codim(); ++s) {
        const Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxChartDim * kMaxChartDim> row =
            fp.normals.col(s).transpose() * fp.second;
        ChartMat a(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) a(i, j) = row(i * m + j);
        }
        fp.alpha_s[static_cast<std::size_t>(s)] = a;
        fp.H += ((fp.g_inv.cwiseProduct(a)).sum() / m) * fp.normals.col(s);
    }
    fp.H_norm = fp.H.norm();
    return fp;
}

FramePacket frame_at(const ParametricImmersion& imm, const ChartVec& u, int order) {
    return frame_from(tangent_geometry(imm, u, order));
}

ChartMat shape_operator_at(const FramePacket& fp, const AmbientVec& eta) {
    const AmbientVec comps = fp.normal_components(eta);
    const double off = (eta - fp.normals * comps).norm();
    if (off > 1e-8 * std::max(1.0, eta.norm())) {
        std::ostringstream os;
        os << "vector has component " << off << " outside the normal bundle";
        throw Error(ErrorKind::NormalOutsideBundle, os.str());
    }
    const int m = fp.m();
    ChartMat weighted = ChartMat::Zero(m, m);
    for (int s = 0; s < fp.codim(); ++s) weighted += comps[s] * fp.alpha_s[static_cast<std::size_t>(s)];
    return -(fp.g_inv * weighted);
}

AmbientVec nabla_star_alpha(const ParametricImmersion& imm, const ChartVec& u, const ChartVec& x,
                            const ChartVec& y, const ChartVec& z, DerivativeRoute route) {
    if (route == DerivativeRoute::Automatic) {
        route = imm.has_third_derivatives() ? DerivativeRoute::ThirdPartials : DerivativeRoute::FiniteDifference;
    }
    if (route == DerivativeRoute::ThirdPartials) {
        if (!imm.has_third_derivatives()) {
            throw Error(ErrorKind::DerivativeUnavailable, imm.name() + " has no third partial derivatives");
        }
        return nabla_star_third(imm, u, x, y, z);
    }
    return nabla_star_fd(imm, u, x, y, z);
}

std::vector<AmbientVec> normal_derivative_along(const ParametricImmersion& imm, std::span<const ChartVec> u,
                                                std::span<const AmbientVec> xi, double step) {
    if (u.size() != xi.size()) throw Error(ErrorKind::InsufficientSamples, "sample count mismatch");
    const std::vector<AmbientVec> values(xi.begin(), xi.end());
    std::vector<AmbientVec> d = differentiate_uniform(values, step);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = tangent_geometry(imm, u[i]).normal_part(d[i]);
    return d;
}

}  // namespace umbilic
