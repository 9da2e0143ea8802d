#include "umbilic/catalog.hpp"
#include "umbilic/curvature.hpp"
#include "umbilic/development.hpp"
#include "umbilic/diagnostics.hpp"
#include "umbilic/frame.hpp"
#include "umbilic/trajectory.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

namespace {

using namespace umbilic;

const char* const kEntries[] = {"sphere2", "ellipsoid-1-1-2", "torus-2-1", "sphere3", "veronese-in-S4"};

ChartVec midpoint(const CatalogEntry& e) { return 0.5 * (e.seed_box.lower + e.seed_box.upper); }

ChartVec first_axis(const CatalogEntry& e) {
    ChartVec x = ChartVec::Zero(e.immersion.dim());
    x[0] = 1.0;
    x[e.immersion.dim() - 1] += 0.3;
    return x;
}

void BM_FrameAt(benchmark::State& state) {
    const CatalogEntry& e = catalog_entry(kEntries[state.range(0)]);
    const ChartVec u = midpoint(e);
    for (auto _ : state) benchmark::DoNotOptimize(frame_at(e.immersion, u));
    state.SetLabel(e.name);
}
BENCHMARK(BM_FrameAt)->DenseRange(0, 4);

void BM_Geodesic(benchmark::State& state) {
    const CatalogEntry& e = catalog_entry(kEntries[state.range(0)]);
    const ChartVec p = midpoint(e), x = first_axis(e);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_geodesic(e.immersion, p, x, -1.0, 1.0));
    state.SetLabel(e.name);
}
BENCHMARK(BM_Geodesic)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_PseudoGeodesic(benchmark::State& state) {
    const CatalogEntry& e = catalog_entry(kEntries[state.range(0)]);
    const PseudoGeodesicSpec spec = make_spec(e.immersion, midpoint(e), first_axis(e), ChartVec(), 1.0, -1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_planar_pseudo_geodesic(e.immersion, spec));
    state.SetLabel(e.name);
}
BENCHMARK(BM_PseudoGeodesic)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_PlanarityResiduals(benchmark::State& state) {
    const CatalogEntry& e = catalog_entry(kEntries[state.range(0)]);
    const CurveTrajectory traj = integrate_geodesic(e.immersion, midpoint(e), first_axis(e), -1.0, 1.0);
    const CurveKinematics kin = curve_kinematics(e.immersion, traj);
    for (auto _ : state) {
        benchmark::DoNotOptimize(intrinsic_planarity_residual(e.immersion, traj, kin));
        benchmark::DoNotOptimize(ambient_planarity_residual(e.immersion, traj, kin));
    }
    state.SetLabel(e.name);
}
BENCHMARK(BM_PlanarityResiduals)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_UmbilicityGrid(benchmark::State& state) {
    const CatalogEntry& e = catalog_entry(kEntries[state.range(0)]);
    const std::vector<ChartVec> points = grid_points(e.seed_box, 5);
    for (auto _ : state) benchmark::DoNotOptimize(umbilicity_report(e.immersion, points));
    state.SetLabel(e.name);
}
BENCHMARK(BM_UmbilicityGrid)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
