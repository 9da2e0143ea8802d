#pragma once

#include "umbilic/lab/config.hpp"
#include "umbilic/theorems.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace umbilic::lab {

inline constexpr const char* kToolName = "umbilic-lab";
const char* tool_version();

struct CurveOutcome {
    std::string immersion;
    SeedRecord record;
};

struct RunResult {
    SuiteResult suite;
    std::vector<CurveOutcome> curves;
    /// report.json contents; contains no timestamps, so equal inputs give
    /// byte-identical text regardless of thread count.
    std::string report;
    /// Paths written, relative to the output directory, in emission order.
    std::vector<std::string> files;
    double wall_clock_seconds = 0.0;

    bool all_consistent() const { return suite.all_consistent(); }
};

/// Runs the theorem suite and the explicit curves. With `write_files`, writes
/// report.json, manifest.json and (if enabled) trajectories/*.csv under
/// config.output.dir. Per-seed failures are recorded, not thrown.
RunResult run_scenario(const ScenarioConfig& config, bool write_files = true);

/// Thread count: explicit value, else UMBILIC_LAB_THREADS, else the config.
/// 0 means the hardware concurrency. Throws ConfigInvalid for a malformed
/// environment value.
unsigned resolve_threads(std::optional<unsigned> flag, unsigned configured);

struct ConvergenceSeries {
    std::string immersion;
    std::string curve;
    std::vector<double> h;
    /// sup over the common grid of the state difference between steps h and h/2
    std::vector<double> residual;
    /// Least-squares slope of log residual against log h; absent at the floor.
    std::optional<double> slope;
    /// Residuals at rounding level, where no order can be measured.
    bool floor = false;
    std::string error;

    bool in_band() const { return error.empty() && (floor || (slope && *slope >= 3.5 && *slope <= 4.5)); }
};

struct ConvergenceTable {
    std::vector<ConvergenceSeries> series;
    std::string csv;
    std::string report;

    bool all_in_band() const;
};

inline constexpr double kConvergenceFloor = 1e-11;

/// For each explicit curve, integrates at every step h in `steps` and at h/2
/// over the suite span and fits the order. Needs at least three steps forming
/// a geometric ladder. With `write_files`, writes convergence.csv and
/// convergence.json under config.output.dir.
ConvergenceTable convergence_study(const ScenarioConfig& config, const std::vector<double>& steps,
                                   bool write_files = true);

/// Sup-norm difference of (u, T, Y) at the common grid points of a run at h
/// and one at h/2. Throws when either run is truncated before the span ends.
double step_halving_difference(const CatalogEntry& entry, const CurveRequest& request, double t_min, double t_max,
                               double h);

struct CatalogListing {
    std::string name;
    std::string description;
    int dim = 0;
    int ambient_dim = 0;
    std::string ambient;
    GroundTruth flags;
};

/// Catalog entries in their fixed order.
std::vector<CatalogListing> list_catalog();

}  // namespace umbilic::lab
