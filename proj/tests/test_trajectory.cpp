#include "support.hpp"

#include "umbilic/catalog.hpp"
#include "umbilic/error.hpp"
#include "umbilic/trajectory.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

using namespace umbilic;
using namespace umbilic::test;

// Distance of every ambient sample from the centroid of one full period, and
// the centroid's distance from the origin.
struct CircleFit {
    double radius_error = 0.0;
    double centre_norm = 0.0;
};

CircleFit fit_circle(const CurveTrajectory& traj, double period, double radius) {
    std::size_t count = 0;
    AmbientVec centre = AmbientVec::Zero(traj.x.front().size());
    const std::size_t first = traj.origin;
    const std::size_t per = static_cast<std::size_t>(std::llround(period / traj.h));
    for (std::size_t i = first; i < first + per; ++i, ++count) centre += traj.x[i];
    centre /= static_cast<double>(count);
    CircleFit fit{0.0, centre.norm()};
    for (std::size_t i = 0; i < traj.size(); ++i)
        fit.radius_error = std::max(fit.radius_error, std::abs((traj.x[i] - centre).norm() - radius));
    return fit;
}

TEST(Geodesic, PlaneIsStraightLine) {
    const ChartVec p = cv({0.3, -0.2}), x = cv({0.6, 0.8});
    const CurveTrajectory traj = integrate_geodesic(imm("plane"), p, x);
    ASSERT_FALSE(traj.truncated);
    for (std::size_t i = 0; i < traj.size(); i += 97)
        EXPECT_LT((traj.u[i] - (p + traj.t[i] * x)).norm(), 1e-12) << traj.t[i];
}

TEST(Geodesic, SphereEquatorIsGreatCircle) {
    const CurveTrajectory traj = integrate_geodesic(imm("sphere2"), cv({kPi / 2, 0.0}), cv({0.0, 1.0}));
    for (std::size_t i = 0; i < traj.size(); i += 101) {
        const double t = traj.t[i];
        EXPECT_LT((traj.x[i] - av({std::cos(t), std::sin(t), 0.0})).norm(), 1e-10) << t;
    }
}

TEST(Geodesic, UnitSpeedAndOrigin) {
    const CurveTrajectory traj = integrate_geodesic(imm("ellipsoid-1-1-2"), cv({1.2, 0.3}), cv({2.0, 1.0}));
    EXPECT_EQ(traj.t[traj.origin], 0.0);
    EXPECT_LT((traj.u[traj.origin] - cv({1.2, 0.3})).norm(), 1e-15);
    for (std::size_t i = 0; i < traj.size(); i += 113) {
        const TangentGeometry geo = tangent_geometry(imm("ellipsoid-1-1-2"), traj.u[i]);
        EXPECT_NEAR(g_norm(geo.g, traj.T[i]), 1.0, 1e-12);
    }
    EXPECT_LT(traj.max_drift, 1e-10);
}

TEST(PseudoGeodesic, ZeroConstantReproducesGeodesic) {
    for (const char* name : {"ellipsoid-1-1-2", "torus-2-1", "sphere3", "clifford-in-S3"}) {
        const CatalogEntry& e = catalog_entry(name);
        const ChartVec p = e.seed_box.centre();
        ChartVec x = ChartVec::Ones(p.size());
        x[0] = 0.3;
        const PseudoGeodesicSpec spec = make_spec(e.immersion, p, x, ChartVec(), 0.0, -1.5, 1.5);
        const CurveTrajectory pg = integrate_planar_pseudo_geodesic(e.immersion, spec);
        const CurveTrajectory geo = integrate_geodesic(e.immersion, p, x, -1.5, 1.5);
        ASSERT_EQ(pg.size(), geo.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < pg.size(); ++i) worst = std::max(worst, (pg.u[i] - geo.u[i]).norm());
        EXPECT_LT(worst, 1e-10) << name;
    }
}

TEST(PseudoGeodesic, SphereGivesSmallCircleWithCotRadiusC) {
    for (double c : {0.5, 1.0, 2.0, -1.0}) {
        const double r = std::atan(1.0 / std::abs(c));
        const double period = 2 * kPi * std::sin(r);
        const double h = period / 4000;
        const PseudoGeodesicSpec spec =
            make_spec(imm("sphere2"), cv({1.2, 0.4}), cv({0.3, 1.0}), ChartVec(), c, -0.5, period + 0.5, h);
        const CurveTrajectory traj = integrate_planar_pseudo_geodesic(imm("sphere2"), spec);
        ASSERT_FALSE(traj.truncated) << traj.truncation;
        const CircleFit fit = fit_circle(traj, period, std::sin(r));
        EXPECT_LT(fit.radius_error, 1e-9) << c;
        EXPECT_NEAR(fit.centre_norm, std::cos(r), 1e-9) << c;
        // Closes after one period.
        EXPECT_LT((traj.x[traj.origin + 4000] - traj.x[traj.origin]).norm(), 1e-9) << c;
    }
}

TEST(PseudoGeodesic, PlaneGivesStraightLine) {
    const PseudoGeodesicSpec spec = make_spec(imm("plane"), cv({0.0, 0.0}), cv({1.0, 2.0}), ChartVec(), 3.0);
    const CurveTrajectory traj = integrate_planar_pseudo_geodesic(imm("plane"), spec);
    for (std::size_t i = 0; i < traj.size(); i += 89)
        EXPECT_LT((traj.u[i] - traj.t[i] * spec.x).norm(), 1e-12);
}

TEST(PseudoGeodesic, StepHalvingAgreesToFourthOrder) {
    const ParametricImmersion& t = imm("torus-2-1");
    for (double h : {4e-3, 2e-3}) {
        const PseudoGeodesicSpec a = make_spec(t, cv({0.2, 0.5}), cv({1.0, 0.6}), ChartVec(), 1.5, -1.0, 1.0, h);
        PseudoGeodesicSpec b = a;
        b.h = h / 2;
        const CurveTrajectory ta = integrate_planar_pseudo_geodesic(t, a);
        const CurveTrajectory tb = integrate_planar_pseudo_geodesic(t, b);
        const double diff = (ta.u.back() - tb.u.back()).norm();
        EXPECT_LT(diff, 50 * std::pow(h, 4)) << h;
    }
}

TEST(PseudoGeodesic, OdeResidualIsSmall) {
    const PseudoGeodesicSpec spec =
        make_spec(imm("ellipsoid-1-1-2"), cv({1.3, 0.1}), cv({1.0, 1.0}), ChartVec(), 1.0);
    const CurveTrajectory traj = integrate_planar_pseudo_geodesic(imm("ellipsoid-1-1-2"), spec);
    const OdeResidual r = ode_residual(imm("ellipsoid-1-1-2"), traj);
    EXPECT_LT(r.acceleration, 1e-8);
    EXPECT_LT(r.frame, 1e-8);
}

TEST(PseudoGeodesic, SpecValidation) {
    PseudoGeodesicSpec spec = make_spec(imm("sphere2"), cv({1.0, 0.0}), cv({1.0, 0.0}), ChartVec(), 1.0);
    EXPECT_NO_THROW(validate(imm("sphere2"), spec));
    PseudoGeodesicSpec skew = spec;
    skew.y = cv({1.0, 1.0});
    EXPECT_THROW(validate(imm("sphere2"), skew), Error);
    PseudoGeodesicSpec span = spec;
    span.t_min = 0.5;
    EXPECT_THROW(validate(imm("sphere2"), span), Error);
    PseudoGeodesicSpec step = spec;
    step.h = 0.0;
    EXPECT_THROW(validate(imm("sphere2"), step), Error);
}

TEST(PrescribedKappa, PlaneUnitCircle) {
    const ChartVec p = cv({0.5, 0.5}), x = cv({1.0, 0.0}), y = cv({0.0, 1.0});
    const CurveTrajectory traj =
        integrate_planar_prescribed_kappa(imm("plane"), p, x, y, [](double) { return 1.0; });
    for (std::size_t i = 0; i < traj.size(); i += 71) {
        const double t = traj.t[i];
        EXPECT_LT((traj.u[i] - (p + std::sin(t) * x + (1 - std::cos(t)) * y)).norm(), 1e-11) << t;
    }
}

TEST(PrescribedKappa, SphereUnitCurvatureHasRadiusQuarterPi) {
    const double r = kPi / 4;
    const double period = 2 * kPi * std::sin(r);
    const ChartVec p = cv({1.2, 0.0});
    const PseudoGeodesicSpec frame = make_spec(imm("sphere2"), p, cv({0.0, 1.0}), ChartVec(), 0.0);
    const CurveTrajectory traj = integrate_planar_prescribed_kappa(
        imm("sphere2"), p, frame.x, frame.y, [](double) { return 1.0; }, -0.2, period + 0.2, period / 4000);
    const CircleFit fit = fit_circle(traj, period, std::sin(r));
    EXPECT_LT(fit.radius_error, 1e-9);
    EXPECT_NEAR(fit.centre_norm, std::cos(r), 1e-9);
}

TEST(PrescribedKappa, ZeroCurvatureIsGeodesic) {
    const ParametricImmersion& e = imm("ellipsoid-1-1-2");
    const ChartVec p = cv({1.3, 0.2});
    const PseudoGeodesicSpec frame = make_spec(e, p, cv({1.0, 0.4}), ChartVec(), 0.0);
    const CurveTrajectory a = integrate_planar_prescribed_kappa(e, p, frame.x, frame.y, [](double) { return 0.0; });
    const CurveTrajectory b = integrate_geodesic(e, p, frame.x);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a.u[i] - b.u[i]).norm());
    EXPECT_LT(worst, 1e-12);
}

TEST(Truncation, LeavingTheChartIsFlagged) {
    // Heads for the pole, outside the polar chart box.
    const CurveTrajectory traj = integrate_geodesic(imm("sphere2"), cv({0.5, 0.0}), cv({-1.0, 0.0}), -0.2, 3.0);
    EXPECT_TRUE(traj.truncated);
    EXPECT_FALSE(traj.truncation.empty());
    EXPECT_LT(traj.t.back(), 3.0);
    EXPECT_TRUE(imm("sphere2").in_domain(traj.u.back()));
}

TEST(Reversal, ReversesTimeAndVelocity) {
    const PseudoGeodesicSpec spec = make_spec(imm("torus-2-1"), cv({0.1, 0.2}), cv({1.0, 0.3}), ChartVec(), 0.5,
                                              -1.0, 2.0);
    const CurveTrajectory traj = integrate_planar_pseudo_geodesic(imm("torus-2-1"), spec);
    const CurveTrajectory rev = traj.reversed();
    ASSERT_EQ(rev.size(), traj.size());
    EXPECT_DOUBLE_EQ(rev.t.front(), -2.0);
    EXPECT_EQ(rev.t[rev.origin], 0.0);
    EXPECT_TRUE(rev.T.front().isApprox(-traj.T.back()));
    EXPECT_TRUE(rev.u.back().isApprox(traj.u.front()));
}

TEST(ChartCurve, ArcLengthSampling) {
    // Latitude circle at polar angle 1 sampled from its chart description.
    const CurveTrajectory traj = trajectory_from_chart_curve(
        imm("sphere2"), [](double s) { return cv({1.0, s}); }, [](double) { return cv({0.0, 1.0}); }, 0.0, -1.0,
        1.0, 1e-3);
    const double speed = std::sin(1.0);
    for (std::size_t i = 0; i < traj.size(); i += 50) EXPECT_NEAR(traj.u[i][1], traj.t[i] / speed, 1e-9);
}

TEST(ChartInverse, RecoversChartPoint) {
    const ChartVec u = cv({1.1, -0.4});
    const AmbientVec x = imm("ellipsoid-1-1-2").position(u);
    EXPECT_LT((invert_chart(imm("ellipsoid-1-1-2"), x, cv({1.0, -0.3})) - u).norm(), 1e-12);
}

}  // namespace
