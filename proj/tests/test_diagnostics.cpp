#include "support.hpp"

#include "umbilic/catalog.hpp"
#include "umbilic/development.hpp"
#include "umbilic/diagnostics.hpp"
#include "umbilic/error.hpp"
#include "umbilic/trajectory.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

using namespace umbilic;
using namespace umbilic::test;

CurveTrajectory geodesic_on(const char* name, ChartVec x = cv({1.0, 0.6})) {
    const CatalogEntry& e = catalog_entry(name);
    return integrate_geodesic(e.immersion, e.seed_box.centre() + 0.05 * ChartVec::Ones(x.size()), x, -2.0, 2.0);
}

CurveTrajectory pg_on(const char* name, double c, ChartVec p, ChartVec x, double span = 2.0) {
    const PseudoGeodesicSpec spec = make_spec(imm(name), p, x, ChartVec(), c, -span, span);
    return integrate_planar_pseudo_geodesic(imm(name), spec);
}

TEST(Umbilicity, RoundSpheresVanish) {
    for (const char* name : {"sphere2", "sphere3", "sphere2-in-R4"}) {
        for (const ChartVec& u : grid_points(catalog_entry(name).seed_box, 3))
            EXPECT_LE(umbilicity_defect(imm(name), u), 1e-10) << name;
    }
}

TEST(Umbilicity, CylinderIsOneOverRootTwo) {
    EXPECT_NEAR(umbilicity_defect(imm("cylinder"), cv({0.4, -0.3})), 1 / std::sqrt(2.0), 1e-12);
}

TEST(Umbilicity, EllipsoidAtFatPole) {
    // Principal curvatures 1 and 1/4 at (1, 0, 0): |diag(3/8, -3/8)|_F.
    EXPECT_NEAR(umbilicity_defect(imm("ellipsoid-1-1-2"), cv({kPi / 2, 0.0})), 3 * std::sqrt(2.0) / 8, 1e-12);
}

TEST(Umbilicity, CliffordTorusIsNotUmbilic) {
    EXPECT_GE(umbilicity_defect(imm("clifford-in-S3"), cv({0.3, 0.1})), 0.1);
}

TEST(Umbilicity, EvenInTheNormalFrame) {
    FramePacket fp = frame_at(imm("ellipsoid-1-1-2"), cv({1.1, 0.4}));
    const double before = umbilicity_defect(fp);
    const IsotropySample iso = isotropy_defect(fp);
    fp.normals.col(0) *= -1.0;
    fp.alpha_s[0] *= -1.0;
    EXPECT_EQ(umbilicity_defect(fp), before);
    const IsotropySample flipped = isotropy_defect(fp);
    EXPECT_EQ(flipped.defect, iso.defect);
    EXPECT_EQ(flipped.spread, iso.spread);
}

TEST(Isotropy, RoundSpheresHaveLambdaOneOverRadiusSquared) {
    const IsotropySample s = isotropy_defect(imm("sphere2"), cv({1.0, 0.2}));
    EXPECT_LE(s.defect, 1e-12);
    EXPECT_NEAR(s.lambda, 1.0, 1e-12);
    EXPECT_LE(s.spread, 1e-12);
    const ParametricImmersion big = imm("sphere2").scaled(2.0);
    const IsotropySample b = isotropy_defect(big, cv({1.0, 0.2}));
    EXPECT_NEAR(b.lambda, 0.25, 1e-12);
    EXPECT_LE(b.spread, 1e-12);
    const IsotropySample s3 = isotropy_defect(imm("sphere3"), cv({1.2, 1.4, 0.3}));
    EXPECT_NEAR(s3.lambda, 1.0, 1e-12);
}

TEST(Isotropy, CylinderSpreadIsOne) {
    // |alpha(x, x)|^2 = cos^4 of the angle to the circular direction.
    DirectionSampling dense;
    dense.count = 720;
    const IsotropySample s = isotropy_defect(imm("cylinder"), cv({0.0, 0.0}), dense);
    EXPECT_NEAR(s.spread, 1.0, 1e-12);
    EXPECT_GE(s.defect, 0.1);
}

TEST(Isotropy, VeroneseIsConstantIsotropic) {
    std::vector<double> lambda;
    const DefectReport r =
        isotropy_report(imm("veronese-in-S4"), grid_points(catalog_entry("veronese-in-S4").seed_box, 5), &lambda);
    EXPECT_EQ(r.points.size(), 25u);
    EXPECT_LE(r.sup, 1e-8);
    ASSERT_EQ(lambda.size(), 25u);
    const auto [lo, hi] = std::minmax_element(lambda.begin(), lambda.end());
    EXPECT_LE(*hi - *lo, 1e-8);
    EXPECT_GT(*lo, 0.1);
    for (const ChartVec& u : r.points) EXPECT_LE(isotropy_defect(imm("veronese-in-S4"), u).spread, 1e-8);
}

TEST(ParallelNormalizedH, HypersurfaceIsAutomatic) {
    EXPECT_LE(parallel_normalized_H_defect(imm("ellipsoid-1-1-2"), geodesic_on("ellipsoid-1-1-2")), 1e-7);
    EXPECT_LE(parallel_normalized_H_defect(imm("torus-2-1"), geodesic_on("torus-2-1")), 1e-7);
}

TEST(ParallelNormalizedH, SphereInFourSpace) {
    EXPECT_LE(parallel_normalized_H_defect(imm("sphere2-in-R4"), geodesic_on("sphere2-in-R4")), 1e-7);
}

TEST(ParallelNormalizedH, VeroneseInFiveSpace) {
    EXPECT_LE(parallel_normalized_H_defect(imm("veronese-in-R5"), geodesic_on("veronese-in-R5")), 1e-6);
}

TEST(ParallelNormalizedH, VanishingMeanCurvatureThrows) {
    for (const char* name : {"plane", "veronese-in-S4"}) {
        try {
            parallel_normalized_H_defect(imm(name), geodesic_on(name));
            ADD_FAILURE() << name;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::MeanCurvatureVanishes) << name;
        }
    }
}

TEST(ExtrinsicSphere, SphereAndCylinderPassEllipsoidFails) {
    EXPECT_LE(extrinsic_sphere_defect(imm("sphere2"), geodesic_on("sphere2")), 1e-7);
    EXPECT_LE(extrinsic_sphere_defect(imm("cylinder"), geodesic_on("cylinder")), 1e-7);
    EXPECT_GE(extrinsic_sphere_defect(imm("ellipsoid-1-1-2"), geodesic_on("ellipsoid-1-1-2")), 1e-3);
}

TEST(NormalResiduals, SpherePseudoGeodesicSatisfiesEveryEquation) {
    const CurveTrajectory traj = pg_on("sphere2", 1.0, cv({1.2, 0.1}), cv({0.4, 1.0}));
    const NormalEquationResiduals r = normal_equation_residuals(imm("sphere2"), traj);
    for (double v : {r.tangent, r.normal, r.pg_tangent, r.pg_normal, r.umbilic_tangent, r.umbilic_normal})
        EXPECT_LE(v, 1e-6);
    EXPECT_GT(r.samples_used, 1000u);
    EXPECT_EQ(r.samples_excluded, 0u);
}

TEST(NormalResiduals, PlaneIsIdenticallyZero) {
    const NormalEquationResiduals r = normal_equation_residuals(imm("plane"), pg_on("plane", 1.0, cv({0, 0}), cv({1, 2})));
    for (double v : {r.tangent, r.normal, r.pg_tangent, r.pg_normal, r.umbilic_tangent, r.umbilic_normal})
        EXPECT_EQ(v, 0.0);
}

TEST(NormalResiduals, EllipsoidFailureIsIsolatedToTheNormalEquation) {
    const CurveTrajectory traj = pg_on("ellipsoid-1-1-2", 1.0, cv({1.2, 0.1}), cv({1.0, 1.0}));
    const PlanarityReport intrinsic = intrinsic_planarity_residual(imm("ellipsoid-1-1-2"), traj);
    EXPECT_LE(intrinsic.residual_ode, 1e-6);
    EXPECT_LE(intrinsic.residual_fit, 1e-6);
    const NormalEquationResiduals r = normal_equation_residuals(imm("ellipsoid-1-1-2"), traj);
    EXPECT_GE(r.pg_normal, 1e-3);
    EXPECT_GE(r.normal, 1e-3);
}

TEST(NormalResiduals, CylinderGeodesicsAreEverywhereNonAsymptoticExceptRulings) {
    // A ruling has alpha(T, T) = 0 everywhere: tau-divided equations skip every
    // sample, and with no curvature at all the result is zero, not an error.
    const CurveTrajectory ruling = integrate_geodesic(imm("cylinder"), cv({0.0, 0.0}), cv({0.0, 1.0}));
    const NormalEquationResiduals r = normal_equation_residuals(imm("cylinder"), ruling);
    EXPECT_EQ(r.pg_normal, 0.0);
}

TEST(Invariance, ReversingTheCurveLeavesDefectsUnchanged) {
    const CurveTrajectory traj = pg_on("ellipsoid-1-1-2", 0.5, cv({1.2, 0.1}), cv({1.0, 0.5}));
    const CurveTrajectory rev = traj.reversed();
    const ParametricImmersion& e = imm("ellipsoid-1-1-2");
    const PlanarityReport a = ambient_planarity_residual(e, traj), b = ambient_planarity_residual(e, rev);
    EXPECT_NEAR(a.residual_ode, b.residual_ode, 1e-10);
    EXPECT_NEAR(a.residual_fit, b.residual_fit, 1e-10);
    const PlanarityReport ai = intrinsic_planarity_residual(e, traj), bi = intrinsic_planarity_residual(e, rev);
    EXPECT_NEAR(ai.residual_ode, bi.residual_ode, 1e-10);
    EXPECT_NEAR(ai.residual_fit, bi.residual_fit, 1e-10);
    const NormalEquationResiduals na = normal_equation_residuals(e, traj), nb = normal_equation_residuals(e, rev);
    EXPECT_NEAR(na.normal, nb.normal, 1e-10);
    EXPECT_NEAR(na.pg_normal, nb.pg_normal, 1e-10);
    EXPECT_NEAR(na.tangent, nb.tangent, 1e-10);
    EXPECT_NEAR(extrinsic_sphere_defect(e, traj), extrinsic_sphere_defect(e, rev), 1e-10);
    EXPECT_NEAR(parallel_normalized_H_defect(e, traj), parallel_normalized_H_defect(e, rev), 1e-10);
}

TEST(Invariance, FlippingYLeavesDefectsUnchanged) {
    const CurveTrajectory traj = pg_on("torus-2-1", 1.0, cv({0.2, 0.3}), cv({1.0, 0.5}));
    CurveTrajectory flipped = traj;
    for (ChartVec& y : flipped.Y) y = -y;
    const ParametricImmersion& t = imm("torus-2-1");
    const PlanarityReport a = ambient_planarity_residual(t, traj), b = ambient_planarity_residual(t, flipped);
    EXPECT_EQ(a.residual_ode, b.residual_ode);
    EXPECT_EQ(a.residual_fit, b.residual_fit);
    const NormalEquationResiduals na = normal_equation_residuals(t, traj), nb = normal_equation_residuals(t, flipped);
    EXPECT_EQ(na.normal, nb.normal);
    EXPECT_EQ(na.umbilic_normal, nb.umbilic_normal);
}

TEST(AsymptoticPoints, FlatDirectionsCarryNoSecondForm) {
    // Where every unit x is asymptotic the sampled second form vanishes.
    for (const ChartVec& u : grid_points(catalog_entry("plane").seed_box, 3)) {
        const FramePacket fp = frame_at(imm("plane"), u);
        for (const ChartVec& x : sample_unit_directions(fp.g, {}))
            for (const ChartVec& y : sample_unit_directions(fp.g, {16, 3})) EXPECT_EQ(fp.alpha(x, y).norm(), 0.0);
    }
}

TEST(Sampling, DirectionsAreUnitAndDeterministic) {
    for (int m : {2, 3, 4}) {
        const auto a = sample_sphere(m, {64, 7});
        const auto b = sample_sphere(m, {64, 7});
        ASSERT_EQ(a.size(), 64u);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(a[i].norm(), 1.0, 1e-14);
            EXPECT_EQ(a[i], b[i]);
        }
    }
    const ChartMat g = tangent_geometry(imm("ellipsoid-1-1-2"), cv({1.0, 0.3})).g;
    for (const ChartVec& x : sample_unit_directions(g, {})) EXPECT_NEAR(g_norm(g, x), 1.0, 1e-14);
}

TEST(Sampling, GridPoints) {
    const Box box{cv({0, 10}), cv({1, 12})};
    const auto pts = grid_points(box, 3);
    ASSERT_EQ(pts.size(), 9u);
    EXPECT_EQ(pts.front(), cv({0, 10}));
    EXPECT_EQ(pts.back(), cv({1, 12}));
    EXPECT_EQ(grid_points(box, 1).front(), box.centre());
}

TEST(DefectVerdicts, Bands) {
    const Thresholds t;
    EXPECT_EQ(classify_defect(1e-6, t), DefectVerdict::Satisfied);
    EXPECT_EQ(classify_defect(1e-5, t), DefectVerdict::Indeterminate);
    EXPECT_EQ(classify_defect(1e-4, t), DefectVerdict::Violated);
    const DefectReport r = make_defect_report("x", {cv({0, 0}), cv({1, 1})}, {1e-9, 3e-9}, {}, t);
    EXPECT_EQ(r.sup, 3e-9);
    EXPECT_EQ(r.mean, 2e-9);
    EXPECT_EQ(r.verdict, DefectVerdict::Satisfied);
}

}  // namespace
