#include "support.hpp"

#include "umbilic/catalog.hpp"
#include "umbilic/error.hpp"
#include "umbilic/frame.hpp"
#include "umbilic/numdiff.hpp"
#include "umbilic/random.hpp"
#include "umbilic/trajectory.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace {

using namespace umbilic;
using namespace umbilic::test;

using Map = std::function<Eigen::Vector3d(double, double)>;

// Metric, Christoffel symbols and second fundamental form of a surface in R^3
// from central differences of the position map alone.
struct SurfaceOracle {
    Eigen::Matrix2d g;
    Eigen::Matrix2d gamma[2];
    Eigen::Vector3d alpha[2][2];
    Eigen::Vector3d d1[2];

    SurfaceOracle(const Map& f, double u, double v, double h = 1e-4) {
        auto at = [&](int i, double s) { return i == 0 ? f(u + s, v) : f(u, v + s); };
        for (int i = 0; i < 2; ++i) d1[i] = (at(i, h) - at(i, -h)) / (2 * h);
        Eigen::Vector3d d2[2][2];
        d2[0][0] = (f(u + h, v) - 2 * f(u, v) + f(u - h, v)) / (h * h);
        d2[1][1] = (f(u, v + h) - 2 * f(u, v) + f(u, v - h)) / (h * h);
        d2[0][1] = d2[1][0] = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4 * h * h);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = d1[i].dot(d1[j]);
        Eigen::Matrix<double, 3, 2> E;
        E << d1[0], d1[1];
        const Eigen::Matrix3d P = E * g.inverse() * E.transpose();
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const Eigen::Vector2d lowered(d2[i][j].dot(d1[0]), d2[i][j].dot(d1[1]));
                const Eigen::Vector2d k = g.inverse() * lowered;
                gamma[0](i, j) = k[0];
                gamma[1](i, j) = k[1];
                alpha[i][j] = d2[i][j] - P * d2[i][j];
            }
        }
    }
};

Eigen::Vector3d sphere_map(double t, double p) {
    return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
}

TEST(FrameAt, PlaneIsFlat) {
    const FramePacket fp = frame_at(imm("plane"), cv({0.3, -2.0}));
    EXPECT_TRUE(fp.g.isApprox(ChartMat::Identity(2, 2)));
    for (int k = 0; k < 2; ++k) EXPECT_EQ(fp.gamma[k].norm(), 0.0);
    EXPECT_EQ(fp.alpha_s[0].norm(), 0.0);
    EXPECT_EQ(fp.H.norm(), 0.0);
}

TEST(FrameAt, SphereAtSixtyDegreesMatchesClosedFormAndDifferences) {
    const double t = kPi / 3, p = 0.4;
    const FramePacket fp = frame_at(imm("sphere2"), cv({t, p}));
    const SurfaceOracle fd(sphere_map, t, p);

    EXPECT_NEAR(fp.g(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(fp.g(1, 1), 0.75, 1e-14);
    EXPECT_NEAR(fp.g(0, 1), 0.0, 1e-14);
    EXPECT_NEAR(fp.gamma[0](1, 1), -std::sqrt(3.0) / 4, 1e-14);
    EXPECT_NEAR(fd.gamma[0](1, 1), -std::sqrt(3.0) / 4, 1e-7);

    // Outward normal: alpha^1 = -g and H is the inward unit vector.
    ASSERT_EQ(fp.codim(), 1);
    const Eigen::Vector3d x = sphere_map(t, p);
    EXPECT_NEAR(fp.normals.col(0).dot(x), 1.0, 1e-14);
    EXPECT_TRUE((fp.alpha_s[0] + fp.g).norm() < 1e-14);
    EXPECT_NEAR((fp.H + AmbientVec(x)).norm(), 0.0, 1e-14);

    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            EXPECT_NEAR(fp.g(i, j), fd.g(i, j), 1e-8);
            for (int k = 0; k < 2; ++k) EXPECT_NEAR(fp.gamma[k](i, j), fd.gamma[k](i, j), 1e-7);
            const AmbientVec a = fp.alpha(cv({i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0}),
                                          cv({j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0}));
            EXPECT_NEAR((a - AmbientVec(fd.alpha[i][j])).norm(), 0.0, 1e-7);
        }
    }
}

TEST(FrameAt, CylinderPrincipalCurvaturesAgainstInwardNormal) {
    for (double u : {0.0, 1.3, -2.2}) {
        const FramePacket fp = frame_at(imm("cylinder"), cv({u, 0.7}));
        const AmbientVec inward = av({-std::cos(u), -std::sin(u), 0.0});
        ChartMat b(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) b(i, j) = fp.alpha(ChartVec::Unit(2, i), ChartVec::Unit(2, j)).dot(inward);
        Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(fp.g_inv * b));
        std::vector<double> k{es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
        std::sort(k.begin(), k.end());
        EXPECT_NEAR(k[0], 0.0, 1e-14);
        EXPECT_NEAR(k[1], 1.0, 1e-14);
    }
}

TEST(ShapeOperator, PlaneIsZero) {
    const FramePacket fp = frame_at(imm("plane"), cv({1, 1}));
    EXPECT_EQ(shape_operator_at(fp, fp.normals.col(0)).norm(), 0.0);
}

TEST(ShapeOperator, SphereOutwardNormalIsIdentity) {
    const ChartVec u = cv({1.1, 0.3});
    const FramePacket fp = frame_at(imm("sphere2"), u);
    const AmbientVec N = imm("sphere2").position(u);
    EXPECT_TRUE(shape_operator_at(fp, N).isApprox(ChartMat::Identity(2, 2), 1e-13));
    const ChartVec x = g_unit(imm("sphere2"), u, cv({0.3, 1.0}));
    EXPECT_NEAR(fp.alpha(x, x).dot(N), -1.0, 1e-13);

    // Against differences of the normal field N = f: the tangential part of
    // d_x N is x itself.
    const double d = 1e-6;
    const AmbientVec dN = (imm("sphere2").position(u + d * x) - imm("sphere2").position(u - d * x)) / (2 * d);
    EXPECT_NEAR((fp.tangent_components(dN) - shape_operator_at(fp, N) * x).norm(), 0.0, 1e-8);
}

TEST(ShapeOperator, CylinderInwardNormalEigenvalues) {
    const FramePacket fp = frame_at(imm("cylinder"), cv({0.5, 0.0}));
    const AmbientVec inward = av({-std::cos(0.5), -std::sin(0.5), 0.0});
    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(shape_operator_at(fp, inward)));
    std::vector<double> k{es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
    std::sort(k.begin(), k.end());
    EXPECT_NEAR(k[0], -1.0, 1e-14);
    EXPECT_NEAR(k[1], 0.0, 1e-14);
}

TEST(ShapeOperator, RejectsTangentVectors) {
    const FramePacket fp = frame_at(imm("sphere2"), cv({1.0, 0.0}));
    try {
        shape_operator_at(fp, fp.tangent(cv({1, 0})));
        ADD_FAILURE() << "tangent vector accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NormalOutsideBundle);
    }
}

ChartVec random_point(Rng& rng, const Box& box) {
    ChartVec u(box.lower.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.uniform(box.lower[i], box.upper[i]);
    return u;
}

ChartVec random_vector(Rng& rng, int m) {
    ChartVec x(m);
    for (int i = 0; i < m; ++i) x[i] = rng.normal();
    return x;
}

TEST(FrameInvariants, WeingartenCompatibilityOnEveryEntry) {
    for (const CatalogEntry& e : catalog()) {
        Rng rng(11, e.name);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const FramePacket fp = frame_at(e.immersion, random_point(rng, e.seed_box));
            const ChartVec x = random_vector(rng, fp.m());
            const ChartVec y = random_vector(rng, fp.m());
            AmbientVec eta = AmbientVec::Zero(fp.N());
            for (int s = 0; s < fp.codim(); ++s) eta += rng.normal() * fp.normals.col(s);
            const ChartMat A = shape_operator_at(fp, eta);
            worst = std::max(worst, std::abs(fp.alpha(x, y).dot(eta) + g_inner(fp.g, A * x, y)));
            // g A is symmetric.
            const ChartMat gA = fp.g * A;
            EXPECT_LT((gA - gA.transpose()).norm(), 1e-9) << e.name;
        }
        EXPECT_LT(worst, 1e-8) << e.name;
    }
}

TEST(FrameInvariants, OrthonormalNormalsInsideTangentSpaceOfAmbient) {
    for (const CatalogEntry& e : catalog()) {
        const FramePacket fp = frame_at(e.immersion, e.seed_box.centre());
        const int n = fp.codim();
        EXPECT_EQ(n, e.immersion.ambient_dim() - e.immersion.dim() - (e.immersion.ambient().is_level_set() ? 1 : 0))
            << e.name;
        EXPECT_LT((fp.normals.transpose() * fp.normals - AmbientMat::Identity(n, n)).norm(), 1e-12) << e.name;
        EXPECT_LT((fp.E.transpose() * fp.normals).norm(), 1e-12) << e.name;
        if (fp.level_set()) EXPECT_LT((fp.normals.transpose() * fp.q_normal).norm(), 1e-12) << e.name;
    }
}

// Gauss formula: the normal part of the ambient acceleration of f(u(t)) is
// alpha(u', u') when u'' = -Gamma(u', u') (a geodesic start).
TEST(FrameInvariants, GaussFormulaAgainstAmbientSecondDifference) {
    for (const char* name : {"sphere2", "ellipsoid-1-1-2", "torus-2-1", "sphere3", "cylinder", "veronese-in-R5"}) {
        const CatalogEntry& e = catalog_entry(name);
        const ChartVec u = e.seed_box.centre() + 0.1 * ChartVec::Ones(e.immersion.dim());
        const TangentGeometry geo = tangent_geometry(e.immersion, u);
        ChartVec x = ChartVec::Ones(geo.m());
        x[0] = 0.4;
        const ChartVec acc = -geo.christoffel(x, x);
        auto pos = [&](double t) { return AmbientVec(e.immersion.position(u + t * x + 0.5 * t * t * acc)); };
        const double h = 1e-3;
        const AmbientVec d2 =
            (-pos(2 * h) + 16 * pos(h) - 30 * pos(0) + 16 * pos(-h) - pos(-2 * h)) / (12 * h * h);
        const AmbientVec normal = d2 - geo.E * geo.tangent_components(d2);
        EXPECT_LT((normal - geo.alpha(x, x)).norm(), 1e-8) << name;
        EXPECT_LT(geo.tangent_components(d2).norm(), 1e-8) << name;
    }
}

TEST(FrameInvariants, FiniteDifferenceModeMatchesAnalytic) {
    const double steps = 1e-4;
    for (const char* name : {"ellipsoid-1-1-2", "torus-2-1", "sphere3", "veronese-in-R5"}) {
        const ParametricImmersion& exact = imm(name);
        const ParametricImmersion fd = ParametricImmersion::from_positions(
            std::string(name) + "-fd", exact.dim(), exact.ambient(), exact.domain(),
            [&exact](const ChartVec& u) { return exact.position(u); });
        ASSERT_EQ(fd.mode(), DerivativeMode::FiniteDifference);
        const ChartVec u = catalog_entry(name).seed_box.centre() + 0.13 * ChartVec::Ones(exact.dim());
        const FramePacket a = frame_at(exact, u);
        const FramePacket b = frame_at(fd, u);
        const double scale = steps * steps * 100;
        EXPECT_LT((a.g - b.g).norm() / a.g.norm(), scale) << name;
        for (int k = 0; k < a.m(); ++k) EXPECT_LT((a.gamma[k] - b.gamma[k]).norm(), scale) << name;
        for (int i = 0; i < a.m(); ++i)
            for (int j = 0; j < a.m(); ++j) {
                const ChartVec ei = ChartVec::Unit(a.m(), i), ej = ChartVec::Unit(a.m(), j);
                EXPECT_LT((a.alpha(ei, ej) - b.alpha(ei, ej)).norm(), scale) << name;
            }
    }
}

TEST(FrameErrors, DomainRankAndContainment) {
    auto kind_of = [](const std::function<void()>& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::ConfigInvalid;
    };
    EXPECT_EQ(kind_of([] { frame_at(imm("sphere2"), cv({0.0, 0.0})); }), ErrorKind::DomainExceeded);

    const Box box{cv({-1, -1}), cv({1, 1})};
    const auto folded = ParametricImmersion::from_expressions("folded", {"u", "v"}, {"u", "u", "0"},
                                                              AmbientSpace::euclidean(3), box);
    EXPECT_EQ(kind_of([&] { frame_at(folded, cv({0.2, 0.1})); }), ErrorKind::RankDeficient);

    const auto off = ParametricImmersion::from_expressions("off-sphere", {"u", "v"}, {"2*cos(u)", "2*sin(u)", "v"},
                                                           AmbientSpace::round_sphere(3), box);
    EXPECT_EQ(kind_of([&] { frame_at(off, cv({0.2, 0.1})); }), ErrorKind::ContainmentViolated);

    const auto fd = ParametricImmersion::from_positions("fd", 2, AmbientSpace::euclidean(3), box,
                                                        [](const ChartVec& u) { return av({u[0], u[1], 0.0}); });
    EXPECT_EQ(kind_of([&] { fd.jet(cv({0, 0}), 3); }), ErrorKind::DerivativeUnavailable);
}

TEST(FrameAt, HypersurfaceOrientationIsPositive) {
    for (const char* name : {"sphere2", "cylinder", "ellipsoid-1-1-2", "torus-2-1"}) {
        const FramePacket fp = frame_at(imm(name), catalog_entry(name).seed_box.centre());
        Eigen::Matrix3d M;
        M << fp.E.col(0), fp.E.col(1), fp.normals.col(0);
        EXPECT_GT(M.determinant(), 0.0) << name;
    }
    const FramePacket fp = frame_at(imm("clifford-in-S3"), cv({0.2, 0.5}));
    Eigen::Matrix4d M;
    M << fp.E.col(0), fp.E.col(1), fp.normals.col(0), fp.q_normal;
    EXPECT_GT(M.determinant(), 0.0);
}

TEST(NablaStarAlpha, VanishesOnSphereAndPlane) {
    const ChartVec u = cv({1.2, 0.4});
    const ChartVec x = cv({0.6, -0.3}), y = cv({0.1, 1.0}), z = cv({-0.8, 0.5});
    for (DerivativeRoute route : {DerivativeRoute::ThirdPartials, DerivativeRoute::FiniteDifference}) {
        EXPECT_LT(nabla_star_alpha(imm("sphere2"), u, x, y, z, route).norm(), 1e-7);
        EXPECT_LT(nabla_star_alpha(imm("plane"), u, x, y, z, route).norm(), 1e-12);
    }
}

TEST(NablaStarAlpha, EllipsoidIsNonzeroAndRoutesAgree) {
    const ParametricImmersion& e = imm("ellipsoid-1-1-2");
    const ChartVec u = cv({1.1, 0.3});
    const ChartVec x = g_unit(e, u, cv({0.5, 0.8}));
    const AmbientVec exact = nabla_star_alpha(e, u, x, x, x, DerivativeRoute::ThirdPartials);
    const AmbientVec fd = nabla_star_alpha(e, u, x, x, x, DerivativeRoute::FiniteDifference);
    EXPECT_GT(exact.norm(), 1e-2);
    EXPECT_LT((exact - fd).norm(), 1e-6 * std::max(1.0, exact.norm()));

    // Normal, symmetric in the last two slots and linear.
    const FramePacket fp = frame_at(e, u);
    const ChartVec y = cv({0.2, -0.7}), z = cv({1.0, 0.4});
    const AmbientVec xyz = nabla_star_alpha(e, u, x, y, z);
    EXPECT_LT((fp.E.transpose() * xyz).norm(), 1e-6);
    EXPECT_LT((xyz - nabla_star_alpha(e, u, x, z, y)).norm(), 1e-8);
    EXPECT_LT((nabla_star_alpha(e, u, 2.0 * x, y, z) - 2.0 * xyz).norm(), 1e-8);
    EXPECT_LT((nabla_star_alpha(e, u, x, y + z, z) - xyz - nabla_star_alpha(e, u, x, z, z)).norm(), 1e-8);
}

struct NormalFieldCase {
    CurveTrajectory traj;
    std::vector<FramePacket> frames;
};

NormalFieldCase along_geodesic(const ParametricImmersion& m, const ChartVec& p, const ChartVec& x) {
    NormalFieldCase c{integrate_geodesic(m, p, g_unit(m, p, x), -1.0, 1.0, 1e-3), {}};
    for (const ChartVec& u : c.traj.u) c.frames.push_back(frame_at(m, u));
    return c;
}

double sup_interior(const std::vector<AmbientVec>& v) {
    double s = 0.0;
    for (std::size_t i = 2; i + 2 < v.size(); ++i) s = std::max(s, v[i].norm());
    return s;
}

TEST(NormalDerivative, UnitNormalOfSphereIsParallel) {
    const NormalFieldCase c = along_geodesic(imm("sphere2"), cv({1.2, 0.1}), cv({0.4, 1.0}));
    std::vector<AmbientVec> xi;
    for (const FramePacket& fp : c.frames) xi.push_back(fp.normals.col(0));
    EXPECT_LT(sup_interior(normal_derivative_along(imm("sphere2"), c.traj.u, xi, c.traj.h)), 1e-9);
}

TEST(NormalDerivative, NormalizedMeanCurvatureOfSphereInR4IsParallel) {
    const NormalFieldCase c = along_geodesic(imm("sphere2-in-R4"), cv({1.4, 0.2}), cv({1.0, 0.6}));
    std::vector<AmbientVec> xi;
    for (const FramePacket& fp : c.frames) xi.push_back(fp.H / fp.H.norm());
    EXPECT_LT(sup_interior(normal_derivative_along(imm("sphere2-in-R4"), c.traj.u, xi, c.traj.h)), 1e-9);
}

TEST(NormalDerivative, LeibnizRule) {
    const ParametricImmersion& e = imm("ellipsoid-1-1-2");
    const NormalFieldCase c = along_geodesic(e, cv({1.3, 0.2}), cv({0.5, 1.0}));
    std::vector<AmbientVec> xi, scaled;
    for (std::size_t i = 0; i < c.traj.size(); ++i) {
        xi.push_back(c.frames[i].alpha(c.traj.T[i], c.traj.T[i]));
        scaled.push_back((2.0 + std::sin(c.traj.t[i])) * xi.back());
    }
    const auto d = normal_derivative_along(e, c.traj.u, xi, c.traj.h);
    const auto ds = normal_derivative_along(e, c.traj.u, scaled, c.traj.h);
    EXPECT_GT(sup_interior(d), 1e-2);
    std::vector<AmbientVec> defect;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const double t = c.traj.t[i];
        defect.push_back(ds[i] - (2.0 + std::sin(t)) * d[i] - std::cos(t) * xi[i]);
    }
    EXPECT_LT(sup_interior(defect), 1e-9);
}

TEST(NormalDerivative, NeedsThreeSamples) {
    const std::vector<ChartVec> u{cv({1, 0}), cv({1, 0.001})};
    const std::vector<AmbientVec> xi{av({0, 0, 1}), av({0, 0, 1})};
    try {
        normal_derivative_along(imm("sphere2"), u, xi, 1e-3);
        ADD_FAILURE() << "two samples accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientSamples);
    }
}

TEST(MetricCompatibility, ProductRuleForCovariantDerivative) {
    // d/dt <V, W>_g = <grad_T V, W>_g + <V, grad_T W>_g for arbitrary fields
    // along an arbitrary chart curve, with grad_T V = V' + Gamma(u', V).
    const ParametricImmersion& t = imm("torus-2-1");
    const double h = 1e-3;
    std::vector<double> ip;
    std::vector<ChartVec> u, du, V, W, dV, dW;
    for (int i = -200; i <= 200; ++i) {
        const double s = i * h;
        u.push_back(cv({0.2 + s + 0.3 * s * s, 0.3 - 0.5 * s}));
        du.push_back(cv({1.0 + 0.6 * s, -0.5}));
        V.push_back(cv({std::cos(s), 1.0 + s * s}));
        dV.push_back(cv({-std::sin(s), 2.0 * s}));
        W.push_back(cv({std::exp(s), -s}));
        dW.push_back(cv({std::exp(s), -1.0}));
        ip.push_back(g_inner(tangent_geometry(t, u.back()).g, V.back(), W.back()));
    }
    const std::vector<double> dip = differentiate_uniform(ip, h);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < u.size(); ++i) {
        const TangentGeometry geo = tangent_geometry(t, u[i]);
        const ChartVec nV = dV[i] + geo.christoffel(du[i], V[i]);
        const ChartVec nW = dW[i] + geo.christoffel(du[i], W[i]);
        worst = std::max(worst, std::abs(dip[i] - g_inner(geo.g, nV, W[i]) - g_inner(geo.g, V[i], nW)));
    }
    EXPECT_LT(worst, 1e-9);
}

}  // namespace
