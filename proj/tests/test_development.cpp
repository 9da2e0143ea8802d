#include "support.hpp"

#include "umbilic/catalog.hpp"
#include "umbilic/development.hpp"
#include "umbilic/error.hpp"
#include "umbilic/trajectory.hpp"

#include <gtest/gtest.h>

#include <Eigen/Cholesky>

#include <cmath>
#include <utility>
#include <vector>

namespace {

using namespace umbilic;
using namespace umbilic::test;

CurveTrajectory ellipsoid_pg() {
    const PseudoGeodesicSpec spec =
        make_spec(imm("ellipsoid-1-1-2"), cv({1.3, 0.2}), cv({1.0, 0.8}), ChartVec(), 1.0, -2.0, 2.0);
    return integrate_planar_pseudo_geodesic(imm("ellipsoid-1-1-2"), spec);
}

TEST(Transport, PlaneIsIdentity) {
    const CurveTrajectory traj = integrate_planar_prescribed_kappa(imm("plane"), cv({0, 0}), cv({1, 0}), cv({0, 1}),
                                                                   [](double t) { return 1.0 + 0.5 * t; });
    const ChartVec v = cv({0.3, -0.7});
    EXPECT_LT((parallel_transport(imm("plane"), traj, v, -1.0, 2.5) - v).norm(), 1e-12);
}

TEST(Transport, EquatorQuarterTurnKeepsNorthward) {
    const CurveTrajectory traj = integrate_geodesic(imm("sphere2"), cv({kPi / 2, 0.0}), cv({0.0, 1.0}));
    const ChartVec north = cv({-1.0, 0.0});
    EXPECT_LT((parallel_transport(imm("sphere2"), traj, north, 0.0, kPi / 2) - north).norm(), 1e-10);
}

TEST(Transport, GeodesicTangentIsParallel) {
    const CurveTrajectory traj = integrate_geodesic(imm("torus-2-1"), cv({0.1, 0.4}), cv({1.0, 0.9}));
    const std::size_t a = traj.origin - 800, b = traj.origin + 1500;
    const ChartVec moved = parallel_transport(imm("torus-2-1"), traj, traj.T[a], traj.t[a], traj.t[b]);
    EXPECT_LT((moved - traj.T[b]).norm(), 1e-9);
}

TEST(Transport, IsometryLinearityAndRoundTrip) {
    const CurveTrajectory traj = ellipsoid_pg();
    const ParametricImmersion& e = imm("ellipsoid-1-1-2");
    const ChartVec v = cv({0.4, -1.1}), w = cv({1.3, 0.2});
    const double ta = -1.7, tb = 1.9;
    const ChartVec pv = parallel_transport(e, traj, v, ta, tb);
    const ChartVec pw = parallel_transport(e, traj, w, ta, tb);
    auto metric_at = [&](double t) {
        const std::size_t i = static_cast<std::size_t>(std::llround((t - traj.t.front()) / traj.h));
        return tangent_geometry(e, traj.u[i]).g;
    };
    EXPECT_NEAR(g_inner(metric_at(tb), pv, pw), g_inner(metric_at(ta), v, w), 1e-8);
    EXPECT_NEAR(g_norm(metric_at(tb), pv), g_norm(metric_at(ta), v), 1e-8);
    EXPECT_LT((parallel_transport(e, traj, 2.0 * v - 3.0 * w, ta, tb) - (2.0 * pv - 3.0 * pw)).norm(), 1e-12);
    EXPECT_LT((parallel_transport(e, traj, pv, tb, ta) - v).norm(), 1e-8);
}

TEST(Transport, OutsideSpanThrows) {
    const CurveTrajectory traj = ellipsoid_pg();
    try {
        parallel_transport(imm("ellipsoid-1-1-2"), traj, cv({1, 0}), 0.0, 3.0);
        ADD_FAILURE() << "transported past the end";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfSpan);
    }
}

TEST(LinearTransport, ConstantGeneratorIsRotation) {
    AmbientMat M(2, 2);
    M << 0, -1, 1, 0;
    const LinearTransport lt(0.0, 0.01, std::vector<AmbientMat>(301, M));
    const AmbientMat V = lt.propagate(AmbientMat::Identity(2, 2), 0.0, 3.0);
    AmbientMat exact(2, 2);
    exact << std::cos(3.0), std::sin(3.0), -std::sin(3.0), std::cos(3.0);
    EXPECT_LT((V - exact).norm(), 1e-9);
}

TEST(CumulativeIntegral, FourthOrderWithBase) {
    const double h = 1e-2;
    std::vector<Eigen::VectorXd> f;
    for (int i = 0; i <= 400; ++i) f.push_back(Eigen::VectorXd::Constant(1, std::cos(-2.0 + i * h)));
    const auto F = cumulative_integral(f, h, 150);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i)
        worst = std::max(worst, std::abs(F[i][0] - (std::sin(-2.0 + i * h) - std::sin(-2.0 + 150 * h))));
    EXPECT_LT(worst, 1e-9);
}

TEST(PlaneFit, DefectIsSmallestOverLargestSingularValue) {
    Eigen::MatrixXd box(8, 3);
    int r = 0;
    for (int a : {-1, 1})
        for (int b : {-1, 1})
            for (int c : {-1, 1}) box.row(r++) << 4.0 * a, 2.0 * b, 1.0 * c;
    EXPECT_NEAR(plane_fit_defect(box), 0.25, 1e-14);
    box.col(2).setConstant(3.0);
    EXPECT_LT(plane_fit_defect(box), 1e-15);
    EXPECT_EQ(plane_fit_defect(Eigen::MatrixXd::Zero(5, 3)), 0.0);
}

TEST(Development, GeodesicDevelopsToStraightLine) {
    const CurveTrajectory traj = integrate_geodesic(imm("ellipsoid-1-1-2"), cv({1.2, 0.1}), cv({1.0, 0.5}));
    const DevelopedCurve dev = cartan_development(imm("ellipsoid-1-1-2"), traj);
    const ChartVec T0 = traj.T[traj.origin];
    double worst = 0.0;
    for (std::size_t i = 0; i < dev.t.size(); ++i)
        worst = std::max(worst, (dev.position[i] - dev.t[i] * T0).norm());
    EXPECT_LT(worst, 1e-9);
}

TEST(Development, SphereUnitCircleDevelopsToUnitCircleAndCloses) {
    const ChartVec p = cv({1.2, 0.0});
    const PseudoGeodesicSpec frame = make_spec(imm("sphere2"), p, cv({0.0, 1.0}), ChartVec(), 0.0);
    const std::size_t period = 6000;
    const double h = 2 * kPi / static_cast<double>(period);
    const CurveTrajectory traj = integrate_planar_prescribed_kappa(
        imm("sphere2"), p, frame.x, frame.y, [](double) { return 1.0; }, -0.5, 2 * kPi + 0.5, h);
    const DevelopedCurve dev = cartan_development(imm("sphere2"), traj);
    // Closed form of (T*)' = Y*, (Y*)' = -T*: a unit circle centred at Y*(0).
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(Eigen::MatrixXd(dev.g_base)).matrixL();
    const Eigen::VectorXd centre = L.transpose() * Eigen::VectorXd(traj.Y[traj.origin]);
    double radius_error = 0.0;
    for (Eigen::Index i = 0; i < dev.orthonormal_points.rows(); ++i)
        radius_error = std::max(radius_error, std::abs((dev.orthonormal_points.row(i).transpose() - centre).norm() - 1));
    EXPECT_LT(radius_error, 1e-9);
    double gap = 0.0;
    for (std::size_t i = 0; i + period < dev.t.size(); i += 50)
        gap = std::max(gap, (dev.position[i + period] - dev.position[i]).norm());
    EXPECT_LE(gap, 1e-6);
}

TEST(Development, PlaneCurveIsTranslatedCopy) {
    const CurveTrajectory traj = integrate_planar_prescribed_kappa(
        imm("plane"), cv({2.0, 1.0}), cv({0.6, 0.8}), cv({-0.8, 0.6}), [](double t) { return 0.5 + 0.3 * std::sin(t); });
    const DevelopedCurve dev = cartan_development(imm("plane"), traj);
    double worst = 0.0;
    for (std::size_t i = 0; i < dev.t.size(); ++i)
        worst = std::max(worst, (dev.position[i] - (traj.u[i] - traj.u[traj.origin])).norm());
    EXPECT_LT(worst, 1e-9);
}

TEST(IntrinsicPlanarity, PrescribedCurvatureCurvesArePlanar) {
    for (const char* name : {"ellipsoid-1-1-2", "torus-2-1", "sphere3"}) {
        const CatalogEntry& e = catalog_entry(name);
        const PseudoGeodesicSpec frame =
            make_spec(e.immersion, e.seed_box.centre(), ChartVec::Ones(e.immersion.dim()), ChartVec(), 0.0, -2, 2);
        const CurveTrajectory traj = integrate_planar_prescribed_kappa(
            e.immersion, frame.p, frame.x, frame.y, [](double t) { return 0.6 + 0.3 * std::sin(2 * t); }, -2, 2);
        const PlanarityReport r = intrinsic_planarity_residual(e.immersion, traj);
        EXPECT_LE(r.residual_ode, 1e-6) << name;
        EXPECT_LE(r.residual_fit, 1e-6) << name;
        EXPECT_EQ(r.verdict, PlanarityVerdict::Planar) << name;
    }
}

TEST(IntrinsicPlanarity, GeodesicResidualVanishes) {
    const CurveTrajectory traj = integrate_geodesic(imm("torus-2-1"), cv({0.3, 0.2}), cv({1.0, 0.4}));
    const PlanarityReport r = intrinsic_planarity_residual(imm("torus-2-1"), traj);
    EXPECT_LT(r.residual_ode, 1e-9);
    EXPECT_LT(r.residual_fit, 1e-9);
    EXPECT_EQ(r.verdict, PlanarityVerdict::Planar);
}

CurveTrajectory flat_helix() {
    const double n = std::sqrt(1.25);
    return trajectory_from_chart_curve(
        imm("flat3"), [n](double s) { return cv({std::cos(s) / n, std::sin(s) / n, s / (2 * n)}); },
        [n](double s) { return cv({-std::sin(s) / n, std::cos(s) / n, 1 / (2 * n)}); }, 0.0, -kPi, kPi, 1e-3);
}

TEST(IntrinsicPlanarity, HelixInFlatSpaceIsNotPlanar) {
    const PlanarityReport r = intrinsic_planarity_residual(imm("flat3"), flat_helix());
    EXPECT_GE(r.residual_fit, 0.05);
    EXPECT_GE(r.residual_ode, 0.05);
    EXPECT_EQ(r.verdict, PlanarityVerdict::NonPlanar);
}

TEST(IntrinsicPlanarity, OdeAndFitVerdictsAgree) {
    std::vector<CurveTrajectory> curves;
    curves.push_back(flat_helix());
    curves.push_back(integrate_geodesic(imm("ellipsoid-1-1-2"), cv({1.0, 0.0}), cv({1.0, 1.0})));
    curves.push_back(ellipsoid_pg());
    const std::vector<const char*> owners{"flat3", "ellipsoid-1-1-2", "ellipsoid-1-1-2"};
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const PlanarityReport r = intrinsic_planarity_residual(imm(owners[k]), curves[k]);
        const bool ode_planar = r.residual_ode < r.thresholds.planar;
        const bool fit_planar = r.residual_fit < r.thresholds.planar;
        EXPECT_EQ(ode_planar, fit_planar) << k;
        EXPECT_NE(r.verdict, PlanarityVerdict::Indeterminate) << k;
    }
}

TEST(AmbientPlanarity, SphereGeodesicIsGreatCircle) {
    const CurveTrajectory traj = integrate_geodesic(imm("sphere2"), cv({1.2, 0.3}), cv({0.7, 1.0}));
    const PlanarityReport r = ambient_planarity_residual(imm("sphere2"), traj);
    EXPECT_LE(r.residual_fit, 1e-8);
    EXPECT_EQ(r.verdict, PlanarityVerdict::Planar);
}

TEST(AmbientPlanarity, EllipsoidGeodesicThirtyDegreesOffEquator) {
    const ParametricImmersion& e = imm("ellipsoid-1-1-2");
    const ChartVec p = cv({kPi / 2, 0.0});
    // |d_theta f| = 2 and |d_phi f| = 1 at the equator.
    const ChartVec x = cv({std::sin(kPi / 6) / 2.0, std::cos(kPi / 6)});
    const CurveTrajectory traj = integrate_geodesic(e, p, x);
    const PlanarityReport r = ambient_planarity_residual(e, traj);
    EXPECT_GE(r.residual_fit, 1e-3);
    EXPECT_EQ(r.verdict, PlanarityVerdict::NonPlanar);
}

TEST(AmbientPlanarity, CliffordTorusGeneratorsAndGenericGeodesics) {
    const ParametricImmersion& c = imm("clifford-in-S3");
    const CurveTrajectory generator = integrate_geodesic(c, cv({0.2, 0.5}), cv({1.0, 0.0}));
    const PlanarityReport g = ambient_planarity_residual(c, generator);
    EXPECT_LE(g.residual_fit, 1e-6);
    EXPECT_EQ(g.verdict, PlanarityVerdict::Planar);

    const CurveTrajectory generic = integrate_geodesic(c, cv({0.2, 0.5}), cv({1.0, 0.37}));
    const PlanarityReport n = ambient_planarity_residual(c, generic);
    EXPECT_GE(n.residual_fit, 1e-4);
    EXPECT_EQ(n.verdict, PlanarityVerdict::NonPlanar);
}

TEST(AmbientPlanarity, VerdictsAreScaleInvariant) {
    for (const char* name : {"sphere2", "ellipsoid-1-1-2"}) {
        const ParametricImmersion& base = imm(name);
        for (double lambda : {0.5, 3.0}) {
            const ParametricImmersion big = base.scaled(lambda);
            const ChartVec p = cv({1.3, 0.1}), x = cv({1.0, 1.0});
            // The same chart curve: arc length and curvature scale with lambda.
            const PseudoGeodesicSpec a = make_spec(base, p, x, ChartVec(), 1.0, -2.0, 2.0, 1e-3);
            const PseudoGeodesicSpec b =
                make_spec(big, p, x, ChartVec(), 1.0, -2.0 * lambda, 2.0 * lambda, 1e-3 * lambda);
            const PlanarityReport ra = ambient_planarity_residual(base, integrate_planar_pseudo_geodesic(base, a));
            const PlanarityReport rb = ambient_planarity_residual(big, integrate_planar_pseudo_geodesic(big, b));
            EXPECT_EQ(ra.verdict, rb.verdict) << name << " " << lambda;
            EXPECT_NEAR(ra.residual_fit, rb.residual_fit, 1e-9 + 1e-6 * ra.residual_fit) << name << " " << lambda;
        }
    }
}

TEST(AmbientPlanarity, StraightLinesArePlanar) {
    const CurveTrajectory line = integrate_geodesic(imm("plane"), cv({0.1, 0.2}), cv({1.0, 0.5}));
    const CurveTrajectory ruling = integrate_geodesic(imm("cylinder"), cv({0.3, 0.0}), cv({0.0, 1.0}));
    for (const auto& [name, traj] : {std::pair{"plane", &line}, std::pair{"cylinder", &ruling}}) {
        const PlanarityReport a = ambient_planarity_residual(imm(name), *traj);
        const PlanarityReport i = intrinsic_planarity_residual(imm(name), *traj);
        EXPECT_EQ(a.verdict, PlanarityVerdict::Planar) << name << " " << a.residual_ode << " " << a.residual_fit;
        EXPECT_EQ(i.verdict, PlanarityVerdict::Planar) << name << " " << i.residual_ode << " " << i.residual_fit;
    }
}

TEST(Classify, BandsAndIndeterminateGap) {
    const Thresholds t;
    EXPECT_EQ(classify(1e-7, 5e-7, t), PlanarityVerdict::Planar);
    EXPECT_EQ(classify(1e-7, 2e-6, t), PlanarityVerdict::Indeterminate);
    EXPECT_EQ(classify(2e-4, 3e-4, t), PlanarityVerdict::NonPlanar);
    EXPECT_EQ(classify(2e-4, 5e-5, t), PlanarityVerdict::Indeterminate);
}

}  // namespace
