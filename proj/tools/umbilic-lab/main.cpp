#include "umbilic/error.hpp"
#include "umbilic/lab/config.hpp"
#include "umbilic/lab/run.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace umbilic;
using namespace umbilic::lab;

constexpr int kExitConsistent = 0;
constexpr int kExitInconsistent = 1;
constexpr int kExitConfig = 2;

struct Overrides {
    std::string scenario;
    std::optional<double> step;
    std::string span;
    std::optional<unsigned> threads;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool no_trajectories = false;
};

void add_common(CLI::App* cmd, Overrides& o, const std::string& default_scenario) {
    o.scenario = default_scenario;
    cmd->add_option("--scenario", o.scenario, "Built-in scenario name or path to a JSON scenario file")
        ->capture_default_str();
    cmd->add_option("--step", o.step, "Integration step h (convergence: finest step of the ladder 4h, 2h, h)");
    cmd->add_option("--span", o.span, "Parameter span as a,b (use --span=-1,1 for a negative start)");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores; default UMBILIC_LAB_THREADS or 1)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--seed", o.seed, "Random seed for curve seeds");
}

ScenarioConfig load(const Overrides& o) {
    ScenarioConfig config = resolve_scenario(o.scenario);
    if (o.step) config.suite.h = *o.step;
    if (!o.span.empty()) {
        std::istringstream in(o.span);
        double a = 0.0, b = 0.0;
        char comma = 0;
        if (!(in >> a >> comma >> b) || comma != ',' || !in.eof()) {
            throw Error(ErrorKind::ConfigInvalid, "--span expects a,b; got \"" + o.span + "\"");
        }
        config.suite.t_min = a;
        config.suite.t_max = b;
    }
    if (o.seed) config.suite.seed = *o.seed;
    if (!o.out.empty()) config.output.dir = o.out;
    if (o.no_trajectories) config.output.trajectories = false;
    config.suite.threads = resolve_threads(o.threads, config.suite.threads);
    validate(config);
    return config;
}

const char* yes_no(bool v) { return v ? "yes" : "no"; }

int cmd_run(const Overrides& o) {
    const ScenarioConfig config = load(o);
    const RunResult result = run_scenario(config);
    std::cout << "scenario " << config.name << " (seed " << config.suite.seed << ", h " << config.suite.h << ", "
              << config.suite.threads << " thread" << (config.suite.threads == 1 ? "" : "s") << ")\n";
    for (const EntryResult& e : result.suite.entries) {
        for (const TheoremVerdict& v : e.verdicts) {
            std::cout << "  " << e.entry << "  " << to_string(v.id) << (v.variant.empty() ? "" : "/" + v.variant)
                      << "  hypothesis " << to_string(v.hypothesis_verdict) << ", conclusion "
                      << to_string(v.conclusion_verdict) << "  " << (v.consistent ? "consistent" : "INCONSISTENT");
            if (!v.witness.empty()) std::cout << "  witness " << v.witness;
            std::cout << "\n";
            if (!v.note.empty()) std::cout << "      note: " << v.note << "\n";
        }
        std::size_t errors = 0;
        for (const SeedRecord& s : e.seeds) errors += s.ok() ? 0 : 1;
        if (errors > 0) std::cout << "  " << e.entry << "  " << errors << " seed(s) failed; see report.json\n";
    }
    for (const CurveOutcome& c : result.curves) {
        std::cout << "  curve " << c.immersion << "/" << c.record.label << "  ";
        if (c.record.ok()) {
            std::cout << "intrinsic " << to_string(c.record.intrinsic.verdict) << ", ambient "
                      << to_string(c.record.ambient.verdict) << " (fit " << c.record.ambient.residual_fit << ")\n";
        } else {
            std::cout << "error: " << c.record.error << "\n";
        }
    }
    std::cout << "all consistent: " << yes_no(result.all_consistent()) << "\n"
              << "wrote " << result.files.size() << " files to " << config.output.dir.string() << " in "
              << result.wall_clock_seconds << " s\n";
    return result.all_consistent() ? kExitConsistent : kExitInconsistent;
}

int cmd_convergence(const Overrides& o) {
    ScenarioConfig config = load(o);
    std::vector<double> steps = config.convergence_steps;
    if (o.step) steps = {4.0 * *o.step, 2.0 * *o.step, *o.step};
    const ConvergenceTable table = convergence_study(config, steps);
    std::cout << "convergence " << config.name << " over [" << config.suite.t_min << ", " << config.suite.t_max
              << "]\n";
    for (const ConvergenceSeries& s : table.series) {
        std::cout << "  " << s.immersion << "/" << s.curve << "  ";
        if (!s.error.empty()) {
            std::cout << "error: " << s.error << "\n";
            continue;
        }
        for (std::size_t k = 0; k < s.h.size(); ++k) std::cout << "h=" << s.h[k] << ":" << s.residual[k] << " ";
        if (s.floor) {
            std::cout << " floor";
        } else {
            std::cout << " slope " << *s.slope;
        }
        std::cout << (s.in_band() ? "" : "  OUT OF BAND") << "\n";
    }
    std::cout << "wrote convergence.csv and convergence.json to " << config.output.dir.string() << "\n";
    return table.all_in_band() ? kExitConsistent : kExitInconsistent;
}

int cmd_catalog(bool json) {
    const std::vector<CatalogListing> listing = list_catalog();
    if (json) {
        std::cout << "[\n";
        for (std::size_t i = 0; i < listing.size(); ++i) {
            const CatalogListing& l = listing[i];
            std::cout << "  {\"name\": \"" << l.name << "\", \"dim\": " << l.dim << ", \"ambient_dim\": "
                      << l.ambient_dim << ", \"ambient\": \"" << l.ambient << "\", \"flags\": {\"totally_umbilic\": "
                      << (l.flags.totally_umbilic ? "true" : "false")
                      << ", \"extrinsic_sphere\": " << (l.flags.extrinsic_sphere ? "true" : "false")
                      << ", \"constant_isotropic\": " << (l.flags.constant_isotropic ? "true" : "false")
                      << ", \"hypersurface\": " << (l.flags.hypersurface ? "true" : "false") << "}}"
                      << (i + 1 < listing.size() ? "," : "") << "\n";
        }
        std::cout << "]\n";
        return kExitConsistent;
    }
    std::printf("%-16s %3s  %-22s %-7s %-10s %-9s %-11s\n", "name", "dim", "ambient", "umbilic", "ext-sphere",
                "isotropic", "hypersurface");
    for (const CatalogListing& l : listing) {
        std::printf("%-16s %3d  %-22s %-7s %-10s %-9s %-11s\n", l.name.c_str(), l.dim, l.ambient.c_str(),
                    yes_no(l.flags.totally_umbilic), yes_no(l.flags.extrinsic_sphere),
                    yes_no(l.flags.constant_isotropic), yes_no(l.flags.hypersurface));
    }
    std::cout << "\nbuilt-in scenarios:";
    for (const std::string& s : builtin_scenarios()) std::cout << " " << s;
    std::cout << "\n";
    return kExitConsistent;
}

int cmd_validate(const std::string& scenario) {
    const ScenarioConfig config = resolve_scenario(scenario);
    std::cout << "ok: " << config.name << " (" << config.immersions.size() << " immersion(s), "
              << config.curves.size() << " curve(s)), config hash " << config_hash(config) << "\n";
    return kExitConsistent;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for planar curves on immersed submanifolds", "umbilic-lab"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    Overrides run_opts;
    CLI::App* run = app.add_subcommand("run", "Run a scenario and write report.json, manifest.json and trajectories");
    add_common(run, run_opts, "full");
    run->add_flag("--no-trajectories", run_opts.no_trajectories, "Skip trajectories/*.csv");

    Overrides conv_opts;
    CLI::App* conv = app.add_subcommand("convergence", "Measure the integrator order on the scenario's curves");
    add_common(conv, conv_opts, "convergence");

    bool catalog_json = false;
    CLI::App* cat = app.add_subcommand("catalog", "List catalog immersions and their known properties");
    cat->add_flag("--json", catalog_json, "Print JSON");

    std::string validate_target;
    CLI::App* val = app.add_subcommand("validate-config", "Check a scenario file or built-in name");
    val->add_option("--scenario,scenario", validate_target, "Scenario name or path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*conv) return cmd_convergence(conv_opts);
        if (*cat) return cmd_catalog(catalog_json);
        if (*val) return cmd_validate(validate_target);
    } catch (const Error& e) {
        std::cerr << "umbilic-lab: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "umbilic-lab: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
