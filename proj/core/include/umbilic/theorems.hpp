#pragma once

#include "umbilic/catalog.hpp"
#include "umbilic/curvature.hpp"
#include "umbilic/development.hpp"
#include "umbilic/diagnostics.hpp"
#include "umbilic/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace umbilic {

enum class TheoremId { MainThForward, MainThConverse, Corollary, PlanarImpliesPG, SecondTh, ThirdTh };

/// "MainTH-fwd", "MainTH-conv", "COR", "PlanarImpliesPG", "SecondTH", "ThirdTH".
std::string_view to_string(TheoremId id);
std::optional<TheoremId> theorem_from_string(std::string_view name);
const std::vector<TheoremId>& all_theorems();

struct NamedDefect {
    std::string name;
    double value = 0.0;
    DefectVerdict verdict = DefectVerdict::Indeterminate;
    /// Number of points or curves the value was taken over.
    std::size_t samples = 0;
};

struct TheoremVerdict {
    TheoremId id = TheoremId::MainThForward;
    std::string entry;
    /// Empty for the main statement; "circle" for the constant-curvature part.
    std::string variant;
    std::vector<NamedDefect> hypothesis;
    std::vector<NamedDefect> conclusion;
    DefectVerdict hypothesis_verdict = DefectVerdict::Indeterminate;
    DefectVerdict conclusion_verdict = DefectVerdict::Indeterminate;
    /// False only when the hypothesis is satisfied and the conclusion is not.
    bool consistent = true;
    /// Seed that decided the hypothesis (largest planarity residual), if any.
    std::string witness;
    std::string note;
};

/// Satisfied iff every defect is; violated iff some defect is.
DefectVerdict combine(const std::vector<NamedDefect>& defects);

struct SeedRecord {
    std::string label;
    CurveKind kind = CurveKind::Geodesic;
    double c = 0.0;
    ChartVec p;
    ChartVec x;
    ChartVec y;
    std::size_t samples = 0;
    bool truncated = false;
    std::string truncation;
    std::vector<double> tau_events;
    double max_drift = 0.0;

    /// tau(0) below the floor: excluded from hypothesis sets.
    bool asymptotic = false;
    double tau0 = 0.0;
    double umbilicity_at_seed = 0.0;

    PlanarityReport intrinsic;
    PlanarityReport ambient;
    double pythagoras_defect = 0.0;
    double kappa_tilde_min = 0.0;
    /// max - min of kappa_tilde over interior samples
    double kappa_tilde_spread = 0.0;
    /// stdev of tau/kappa where kappa >= 1e-6 (plane sections)
    std::optional<double> tau_over_kappa_stdev;
    std::optional<NormalEquationResiduals> normal;
    /// Absent when H vanishes somewhere along the curve.
    std::optional<double> parallel_normalized_H;
    /// |A_N x + sigma(x) x|_g at the seed (hypersurface geodesic seeds).
    std::optional<double> eigenvector_defect;
    /// Non-empty when integration or evaluation failed.
    std::string error;

    bool ok() const { return error.empty(); }
    double planarity_defect() const { return std::max(ambient.residual_ode, ambient.residual_fit); }
};

struct SuiteConfig {
    std::uint64_t seed = 0;
    std::size_t geodesic_seeds = 24;
    std::size_t pg_seeds = 24;
    std::vector<double> c_values{0.5, 1.0, 2.0};
    double t_min = -std::numbers::pi;
    double t_max = std::numbers::pi;
    double h = 1e-3;
    Thresholds thresholds;
    DirectionSampling directions;
    /// Grid points per chart axis; 0 picks 5, 3, 2 for m = 2, 3, 4.
    int grid_per_axis = 0;
    std::size_t plane_sections = 10;
    /// Theorems to evaluate; empty means all that apply to an entry.
    std::vector<TheoremId> theorems;
    unsigned threads = 1;
    bool normal_residuals = true;
};

/// Throws ConfigInvalid.
void validate(const SuiteConfig& config);

/// Receives every evaluated curve. `render` runs on worker threads; `emit`
/// runs on the calling thread in seed order.
struct TrajectoryObserver {
    std::function<std::string(const std::string& entry, const SeedRecord&, const CurveTrajectory&,
                              const CurvatureProfile&)>
        render;
    std::function<void(const std::string& entry, const SeedRecord&, const std::string&)> emit;
};

/// One curve to evaluate. Geodesic and pseudo-geodesic directions need not be
/// normalised; an empty y selects the default complement. Sampled requests
/// are plane sections at `section_offset`; prescribed-curvature requests use
/// `kappa`, an expression in t.
struct CurveRequest {
    std::string label;
    CurveKind kind = CurveKind::Geodesic;
    double c = 0.0;
    ChartVec p;
    ChartVec x;
    ChartVec y;
    double section_offset = 0.0;
    std::string kappa;
};

/// Integrates the request over [t_min, t_max] with step h. Plane sections are
/// sampled, not integrated, and ignore the span.
CurveTrajectory integrate_request(const ParametricImmersion& imm, const CurveRequest& request, double t_min,
                                  double t_max, double h);

/// Integrates and evaluates one curve with the suite's span, step and
/// thresholds. Failures are recorded in SeedRecord::error, not thrown.
SeedRecord evaluate_curve(const CatalogEntry& entry, const CurveRequest& request, const SuiteConfig& config,
                          const TrajectoryObserver* observer = nullptr, std::string* rendered = nullptr);

struct EntryResult {
    std::string entry;
    GroundTruth flags;
    int dim = 0;
    int codim = 0;
    DefectReport umbilicity;
    DefectReport isotropy;
    std::vector<double> lambda;
    std::vector<SeedRecord> seeds;
    std::vector<TheoremVerdict> verdicts;
};

struct SuiteResult {
    SuiteConfig config;
    std::vector<EntryResult> entries;

    bool all_consistent() const;
};

SuiteResult theorem_suite(const std::vector<CatalogEntry>& ensemble, const SuiteConfig& config,
                          const TrajectoryObserver* observer = nullptr);

/// True when the entry's image is the unit sphere of the first three ambient
/// coordinates of a Euclidean space, so plane sections can be built.
bool supports_plane_sections(const CatalogEntry& entry);

/// Unit-speed curve along the intersection of the unit 2-sphere with the
/// affine plane {x : <x, normal> = offset} (normal in R^3, padded with zeros in
/// higher ambient dimension), covering 95% of the circle around t = 0.
CurveTrajectory plane_section_trajectory(const ParametricImmersion& imm, const Eigen::Vector3d& normal,
                                         double offset, double h = 1e-3);

/// Offsets and normal used by the suite for plane sections.
std::vector<double> plane_section_offsets(std::size_t count);
Eigen::Vector3d plane_section_normal();

}  // namespace umbilic
