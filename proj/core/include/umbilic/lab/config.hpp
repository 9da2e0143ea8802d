#pragma once

#include "umbilic/catalog.hpp"
#include "umbilic/theorems.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace umbilic::lab {

/// An immersion defined inline in a scenario file.
struct CustomImmersion {
    std::string name;
    std::string description;
    std::vector<std::string> variables;
    /// One expression per ambient coordinate.
    std::vector<std::string> position;
    /// "euclidean", "sphere" or "level-set"
    std::string ambient = "euclidean";
    double radius = 1.0;
    /// Level-set constraint in x1..xN.
    std::string constraint;
    Box domain;
    Box seed_box;
    bool analytic = true;
    GroundTruth flags;
};

/// Either a catalog name or an inline definition.
struct ImmersionRef {
    std::string name;
    std::optional<CustomImmersion> custom;
};

struct CurveConfig {
    std::string immersion;
    CurveRequest request;
};

struct OutputConfig {
    std::filesystem::path dir = "umbilic-lab-out";
    bool trajectories = true;
    /// Every stride-th sample is written, plus the last.
    std::size_t csv_stride = 10;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    std::vector<ImmersionRef> immersions;
    std::vector<CurveConfig> curves;
    SuiteConfig suite;
    /// Step ladder for convergence studies, largest first.
    std::vector<double> convergence_steps{4e-3, 2e-3, 1e-3};
    OutputConfig output;
};

/// Parses and validates a scenario document. Throws ConfigInvalid with a
/// "line L, column C" prefix for malformed JSON and a JSON-pointer prefix for
/// schema violations. `origin` names the source in messages.
ScenarioConfig parse_scenario(std::string_view text, std::string_view origin = "<config>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Names of the scenarios compiled into the tool.
std::vector<std::string> builtin_scenarios();
bool has_builtin_scenario(std::string_view name);
ScenarioConfig builtin_scenario(std::string_view name);

/// An existing file is loaded; anything else must be a built-in name.
ScenarioConfig resolve_scenario(std::string_view name_or_path);

/// Semantic checks shared by the parser and by programmatic callers: names
/// resolve, h > 0, planar < reject, curves reference known immersions.
void validate(const ScenarioConfig& config);

/// Canonical JSON of the experiment (fixed key order, numbers at 17
/// significant digits) and its SHA-256. Output options and the thread count
/// do not change results and are left out.
std::string canonical_json(const ScenarioConfig& config);
std::string config_hash(const ScenarioConfig& config);

CatalogEntry make_entry(const CustomImmersion& custom);
/// Resolves a catalog or inline immersion name used by the scenario.
CatalogEntry resolve_immersion(const ScenarioConfig& config, std::string_view name);
/// Entries for the theorem suite, in configuration order.
std::vector<CatalogEntry> build_ensemble(const ScenarioConfig& config);

}  // namespace umbilic::lab
