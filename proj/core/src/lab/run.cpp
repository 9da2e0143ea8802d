#include "umbilic/lab/run.hpp"

#include "json_writer.hpp"
#include "umbilic/error.hpp"
#include "umbilic/parallel.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#ifndef UMBILIC_LAB_VERSION
#define UMBILIC_LAB_VERSION "0.0.0"
#endif

namespace umbilic::lab {

const char* tool_version() { return UMBILIC_LAB_VERSION; }

namespace {

std::string sha256_hex(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::ConfigInvalid, "cannot write " + path.string());
}

std::string sanitize(std::string_view s) {
    std::string out;
    for (char c : s) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        out += keep ? c : '-';
    }
    return out;
}

std::string trajectory_file(std::string_view entry, std::string_view label) {
    return "trajectories/" + sanitize(entry) + "." + sanitize(label) + ".csv";
}

std::string render_csv(const CurveTrajectory& traj, const CurvatureProfile& profile, std::size_t stride) {
    const std::size_t n = traj.size();
    if (n == 0) return {};
    const Eigen::Index m = traj.u[0].size();
    const Eigen::Index dim = traj.x[0].size();
    std::string out = "t";
    for (const char* prefix : {"u", "T", "Y"}) {
        for (Eigen::Index i = 1; i <= m; ++i) out += "," + std::string(prefix) + std::to_string(i);
    }
    for (Eigen::Index i = 1; i <= dim; ++i) out += ",x" + std::to_string(i);
    out += ",kappa,tau,kappa_tilde,theta\n";
    auto row = [&](std::size_t i) {
        out += format_number(traj.t[i]);
        for (const auto* v : {&traj.u[i], &traj.T[i], &traj.Y[i]}) {
            for (Eigen::Index k = 0; k < m; ++k) out += "," + format_number((*v)[k]);
        }
        for (Eigen::Index k = 0; k < dim; ++k) out += "," + format_number(traj.x[i][k]);
        out += "," + format_number(profile.kappa[i]) + "," + format_number(profile.tau[i]) + "," +
               format_number(profile.kappa_tilde[i]) + ",";
        if (profile.theta_defined(i)) out += format_number(profile.theta[i]);
        out += '\n';
    };
    for (std::size_t i = 0; i < n; i += stride) row(i);
    if ((n - 1) % stride != 0) row(n - 1);
    return out;
}

void write_flags(JsonWriter& w, const GroundTruth& f) {
    w.key("flags").begin_object();
    w.field("totally_umbilic", f.totally_umbilic);
    w.field("extrinsic_sphere", f.extrinsic_sphere);
    w.field("constant_isotropic", f.constant_isotropic);
    w.field("hypersurface", f.hypersurface);
    w.end_object();
}

void write_thresholds(JsonWriter& w, const Thresholds& t) {
    w.key("thresholds").begin_object();
    w.field("planar", t.planar);
    w.field("reject", t.reject);
    w.end_object();
}

void write_defect_report(JsonWriter& w, std::string_view key, const DefectReport& r) {
    w.key(key).begin_object();
    w.field("name", r.name);
    w.field("sup", r.sup);
    w.field("mean", r.mean);
    w.field("verdict", to_string(r.verdict));
    write_thresholds(w, r.thresholds);
    w.key("directions").begin_object();
    w.field("count", static_cast<unsigned long long>(r.directions.count));
    w.field("seed", static_cast<unsigned long long>(r.directions.seed));
    w.end_object();
    w.key("points").begin_array();
    for (const ChartVec& p : r.points) w.numbers(p);
    w.end_array();
    w.key("values").numbers(r.values);
    w.end_object();
}

void write_planarity(JsonWriter& w, std::string_view key, const PlanarityReport& r) {
    w.key(key).begin_object();
    w.field("residual_ode", r.residual_ode);
    w.field("residual_fit", r.residual_fit);
    w.field("verdict", to_string(r.verdict));
    w.field("samples_used", static_cast<unsigned long long>(r.samples_used));
    w.end_object();
}

template <class T>
void write_optional(JsonWriter& w, std::string_view key, const std::optional<T>& v) {
    w.key(key);
    if (v) {
        w.value(*v);
    } else {
        w.null();
    }
}

void write_seed(JsonWriter& w, const SeedRecord& s) {
    w.begin_object();
    w.field("label", s.label);
    w.field("kind", to_string(s.kind));
    if (s.kind == CurveKind::PseudoGeodesic) w.field("c", s.c);
    w.key("point").numbers(s.p);
    w.key("direction").numbers(s.x);
    w.key("normal").numbers(s.y);
    w.field("error", s.error);
    if (!s.ok()) {
        w.end_object();
        return;
    }
    w.field("samples", static_cast<unsigned long long>(s.samples));
    w.field("truncated", s.truncated);
    w.field("truncation", s.truncation);
    w.key("tau_events").numbers(s.tau_events);
    w.field("max_drift", s.max_drift);
    w.field("tau0", s.tau0);
    w.field("asymptotic", s.asymptotic);
    w.field("umbilicity_at_seed", s.umbilicity_at_seed);
    write_planarity(w, "intrinsic", s.intrinsic);
    write_planarity(w, "ambient", s.ambient);
    w.field("pythagoras_defect", s.pythagoras_defect);
    w.field("kappa_tilde_min", s.kappa_tilde_min);
    w.field("kappa_tilde_spread", s.kappa_tilde_spread);
    write_optional(w, "tau_over_kappa_stdev", s.tau_over_kappa_stdev);
    write_optional(w, "parallel_normalized_H", s.parallel_normalized_H);
    write_optional(w, "eigenvector_defect", s.eigenvector_defect);
    w.key("normal_equations");
    if (s.normal) {
        const NormalEquationResiduals& r = *s.normal;
        w.begin_object();
        w.field("tangent", r.tangent);
        w.field("normal", r.normal);
        w.field("pg_tangent", r.pg_tangent);
        w.field("pg_normal", r.pg_normal);
        w.field("umbilic_tangent", r.umbilic_tangent);
        w.field("umbilic_normal", r.umbilic_normal);
        w.field("tau_floor", r.tau_floor);
        w.field("samples_used", static_cast<unsigned long long>(r.samples_used));
        w.field("samples_excluded", static_cast<unsigned long long>(r.samples_excluded));
        w.end_object();
    } else {
        w.null();
    }
    w.end_object();
}

void write_defects(JsonWriter& w, std::string_view key, const std::vector<NamedDefect>& defects) {
    w.key(key).begin_array();
    for (const NamedDefect& d : defects) {
        w.begin_object();
        w.field("name", d.name);
        w.field("value", d.value);
        w.field("verdict", to_string(d.verdict));
        w.field("samples", static_cast<unsigned long long>(d.samples));
        w.end_object();
    }
    w.end_array();
}

void write_verdict(JsonWriter& w, const TheoremVerdict& v) {
    w.begin_object();
    w.field("theorem", to_string(v.id));
    w.field("variant", v.variant);
    w.field("hypothesis_verdict", to_string(v.hypothesis_verdict));
    w.field("conclusion_verdict", to_string(v.conclusion_verdict));
    w.field("consistent", v.consistent);
    w.field("witness", v.witness);
    w.field("note", v.note);
    write_defects(w, "hypothesis", v.hypothesis);
    write_defects(w, "conclusion", v.conclusion);
    w.end_object();
}

std::string render_report(const ScenarioConfig& config, const std::string& hash, const SuiteResult& suite,
                          const std::vector<CurveOutcome>& curves) {
    std::size_t verdicts = 0, seeds = 0, seed_errors = 0, truncated = 0;
    std::vector<std::string> inconsistent;
    for (const EntryResult& e : suite.entries) {
        for (const TheoremVerdict& v : e.verdicts) {
            ++verdicts;
            if (!v.consistent) {
                inconsistent.push_back(e.entry + ":" + std::string(to_string(v.id)) +
                                       (v.variant.empty() ? "" : "/" + v.variant));
            }
        }
        for (const SeedRecord& s : e.seeds) {
            ++seeds;
            if (!s.ok()) ++seed_errors;
            if (s.truncated) ++truncated;
        }
    }
    std::size_t curve_errors = 0;
    for (const CurveOutcome& c : curves) curve_errors += c.record.ok() ? 0 : 1;

    JsonWriter w;
    w.begin_object();
    w.field("tool", kToolName);
    w.field("version", tool_version());
    w.field("scenario", config.name);
    w.field("config_hash", hash);
    w.key("summary").begin_object();
    w.field("all_consistent", suite.all_consistent());
    w.field("verdicts", static_cast<unsigned long long>(verdicts));
    w.key("inconsistent").begin_array();
    for (const std::string& s : inconsistent) w.value(s);
    w.end_array();
    w.field("seeds", static_cast<unsigned long long>(seeds));
    w.field("seed_errors", static_cast<unsigned long long>(seed_errors));
    w.field("truncated", static_cast<unsigned long long>(truncated));
    w.field("curves", static_cast<unsigned long long>(curves.size()));
    w.field("curve_errors", static_cast<unsigned long long>(curve_errors));
    w.end_object();
    w.key("entries").begin_array();
    for (const EntryResult& e : suite.entries) {
        w.begin_object();
        w.field("name", e.entry);
        w.field("dim", e.dim);
        w.field("codim", e.codim);
        write_flags(w, e.flags);
        write_defect_report(w, "umbilicity", e.umbilicity);
        write_defect_report(w, "isotropy", e.isotropy);
        w.key("lambda").numbers(e.lambda);
        w.key("verdicts").begin_array();
        for (const TheoremVerdict& v : e.verdicts) write_verdict(w, v);
        w.end_array();
        w.key("seeds").begin_array();
        for (const SeedRecord& s : e.seeds) write_seed(w, s);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.key("curves").begin_array();
    for (const CurveOutcome& c : curves) {
        w.begin_object();
        w.field("immersion", c.immersion);
        w.key("record");
        write_seed(w, c.record);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct FileRecord {
    std::string path;
    std::string sha256;
    std::size_t bytes;
};

std::string render_manifest(const ScenarioConfig& config, const std::string& hash, const std::string& started,
                            double seconds, unsigned threads, const std::vector<FileRecord>& files, int exit_code) {
    JsonWriter w;
    w.begin_object();
    w.field("tool", kToolName);
    w.field("version", tool_version());
    w.field("scenario", config.name);
    w.field("config_hash", hash);
    w.field("seed", static_cast<unsigned long long>(config.suite.seed));
    w.field("threads", threads);
    w.field("started_at", started);
    w.field("wall_clock_seconds", seconds);
    w.field("exit_code", exit_code);
    w.key("files").begin_array();
    for (const FileRecord& f : files) {
        w.begin_object();
        w.field("path", f.path);
        w.field("sha256", f.sha256);
        w.field("bytes", static_cast<unsigned long long>(f.bytes));
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

// Writes files under a root, recording their digests for the manifest.
class Emitter {
public:
    Emitter(std::filesystem::path root, bool enabled) : root_(std::move(root)), enabled_(enabled) {
        if (!enabled_) return;
        std::error_code ec;
        std::filesystem::create_directories(root_ / "trajectories", ec);
        if (ec) throw Error(ErrorKind::ConfigInvalid, "cannot create " + root_.string() + ": " + ec.message());
    }

    void write(const std::string& relative, std::string_view text) {
        if (!enabled_) return;
        write_file(root_ / relative, text);
        files_.push_back({relative, sha256_hex(text), text.size()});
    }

    const std::vector<FileRecord>& files() const { return files_; }

private:
    std::filesystem::path root_;
    bool enabled_;
    std::vector<FileRecord> files_;
};

}  // namespace

unsigned resolve_threads(std::optional<unsigned> flag, unsigned configured) {
    unsigned k = configured;
    if (flag) {
        k = *flag;
    } else if (const char* env = std::getenv("UMBILIC_LAB_THREADS"); env && *env) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (*end != '\0' || v > 1024 || env[0] == '-') {
            throw Error(ErrorKind::ConfigInvalid,
                        "UMBILIC_LAB_THREADS must be an integer in [0, 1024], got \"" + std::string(env) + "\"");
        }
        k = static_cast<unsigned>(v);
    }
    if (k == 0) k = std::max(1u, std::thread::hardware_concurrency());
    return k;
}

RunResult run_scenario(const ScenarioConfig& config, bool write_files) {
    validate(config);
    const auto started = std::chrono::system_clock::now();
    const auto clock0 = std::chrono::steady_clock::now();
    const std::string hash = config_hash(config);
    const bool trajectories = write_files && config.output.trajectories;
    Emitter emitter(config.output.dir, write_files);
    const std::size_t stride = config.output.csv_stride;

    TrajectoryObserver observer;
    observer.render = [stride](const std::string&, const SeedRecord&, const CurveTrajectory& traj,
                               const CurvatureProfile& profile) { return render_csv(traj, profile, stride); };
    observer.emit = [&emitter](const std::string& entry, const SeedRecord& rec, const std::string& text) {
        if (!text.empty()) emitter.write(trajectory_file(entry, rec.label), text);
    };

    RunResult result;
    result.suite = theorem_suite(build_ensemble(config), config.suite, trajectories ? &observer : nullptr);

    const std::size_t n = config.curves.size();
    std::vector<std::string> rendered(n);
    result.curves.resize(n);
    parallel_for(n, config.suite.threads, [&](std::size_t i) {
        const CurveConfig& c = config.curves[i];
        result.curves[i].immersion = c.immersion;
        try {
            const CatalogEntry entry = resolve_immersion(config, c.immersion);
            result.curves[i].record =
                evaluate_curve(entry, c.request, config.suite, trajectories ? &observer : nullptr, &rendered[i]);
        } catch (const std::exception& e) {
            result.curves[i].record.label = c.request.label;
            result.curves[i].record.kind = c.request.kind;
            result.curves[i].record.error = e.what();
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (!rendered[i].empty()) {
            emitter.write(trajectory_file("curve." + result.curves[i].immersion, result.curves[i].record.label),
                          rendered[i]);
        }
    }

    result.report = render_report(config, hash, result.suite, result.curves);
    emitter.write("report.json", result.report);
    result.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
    if (write_files) {
        const int exit_code = result.all_consistent() ? 0 : 1;
        std::vector<FileRecord> files = emitter.files();
        const std::string manifest = render_manifest(config, hash, utc_timestamp(started), result.wall_clock_seconds,
                                                     config.suite.threads, files, exit_code);
        write_file(config.output.dir / "manifest.json", manifest);
        for (const FileRecord& f : files) result.files.push_back(f.path);
        result.files.emplace_back("manifest.json");
    }
    return result;
}

// ---------------------------------------------------------------------------
// Convergence

bool ConvergenceTable::all_in_band() const {
    return std::all_of(series.begin(), series.end(), [](const ConvergenceSeries& s) { return s.in_band(); });
}

double step_halving_difference(const CatalogEntry& entry, const CurveRequest& request, double t_min, double t_max,
                               double h) {
    if (request.kind == CurveKind::Sampled) {
        throw Error(ErrorKind::ConfigInvalid, "plane sections are sampled, not integrated");
    }
    const ParametricImmersion& imm = entry.immersion;
    const CurveTrajectory coarse = integrate_request(imm, request, t_min, t_max, h);
    const CurveTrajectory fine = integrate_request(imm, request, t_min, t_max, 0.5 * h);
    for (const CurveTrajectory* t : {&coarse, &fine}) {
        if (t->truncated) throw Error(ErrorKind::DomainExceeded, "trajectory truncated: " + t->truncation);
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const long offset = static_cast<long>(i) - static_cast<long>(coarse.origin);
        const long j = static_cast<long>(fine.origin) + 2 * offset;
        if (j < 0 || j >= static_cast<long>(fine.size())) continue;
        const auto k = static_cast<std::size_t>(j);
        sup = std::max({sup, (coarse.u[i] - fine.u[k]).norm(), (coarse.T[i] - fine.T[k]).norm(),
                        (coarse.Y[i] - fine.Y[k]).norm()});
    }
    return sup;
}

ConvergenceTable convergence_study(const ScenarioConfig& config, const std::vector<double>& steps,
                                   bool write_files) {
    validate(config);
    if (steps.size() < 3) throw Error(ErrorKind::ConfigInvalid, "a convergence study needs at least three steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i] > 0.0)) throw Error(ErrorKind::ConfigInvalid, "steps must be positive");
        if (i > 0) {
            const double ratio = steps[i - 1] / steps[i];
            const double first = steps[0] / steps[1];
            if (!(ratio > 1.0) || std::abs(ratio - first) > 1e-9 * first) {
                throw Error(ErrorKind::ConfigInvalid, "steps must form a decreasing geometric ladder");
            }
        }
    }
    if (config.curves.empty()) throw Error(ErrorKind::ConfigInvalid, "scenario lists no curves to study");

    ConvergenceTable table;
    table.series.resize(config.curves.size());
    const std::size_t jobs = config.curves.size() * steps.size();
    std::vector<double> residual(jobs, 0.0);
    std::vector<std::string> errors(jobs);
    parallel_for(jobs, config.suite.threads, [&](std::size_t job) {
        const CurveConfig& c = config.curves[job / steps.size()];
        try {
            residual[job] = step_halving_difference(resolve_immersion(config, c.immersion), c.request,
                                                    config.suite.t_min, config.suite.t_max, steps[job % steps.size()]);
        } catch (const std::exception& e) {
            errors[job] = e.what();
        }
    });

    std::string csv = "immersion,curve,h,residual\n";
    for (std::size_t ci = 0; ci < config.curves.size(); ++ci) {
        ConvergenceSeries& s = table.series[ci];
        s.immersion = config.curves[ci].immersion;
        s.curve = config.curves[ci].request.label;
        bool all_floor = true;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const std::size_t job = ci * steps.size() + k;
            if (!errors[job].empty() && s.error.empty()) s.error = errors[job];
            s.h.push_back(steps[k]);
            s.residual.push_back(residual[job]);
            all_floor = all_floor && residual[job] < kConvergenceFloor;
            csv += s.immersion + "," + s.curve + "," + format_number(steps[k]) + "," +
                   (errors[job].empty() ? format_number(residual[job]) : std::string()) + "\n";
        }
        if (!s.error.empty()) continue;
        if (all_floor) {
            s.floor = true;
            continue;
        }
        // least squares of log r = a + p log h
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(steps.size());
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const double x = std::log(s.h[k]);
            const double y = std::log(std::max(s.residual[k], 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        s.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    table.csv = csv;

    JsonWriter w;
    w.begin_object();
    w.field("tool", kToolName);
    w.field("version", tool_version());
    w.field("scenario", config.name);
    w.field("config_hash", config_hash(config));
    w.key("span").numbers(std::vector<double>{config.suite.t_min, config.suite.t_max});
    w.key("steps").numbers(steps);
    w.field("floor", kConvergenceFloor);
    w.key("band").numbers(std::vector<double>{3.5, 4.5});
    w.field("all_in_band", table.all_in_band());
    w.key("series").begin_array();
    for (const ConvergenceSeries& s : table.series) {
        w.begin_object();
        w.field("immersion", s.immersion);
        w.field("curve", s.curve);
        w.key("h").numbers(s.h);
        w.key("residual").numbers(s.residual);
        w.key("slope");
        if (s.slope) {
            w.value(*s.slope);
        } else {
            w.null();
        }
        w.field("floor", s.floor);
        w.field("in_band", s.in_band());
        w.field("error", s.error);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    table.report = w.str();

    if (write_files) {
        std::error_code ec;
        std::filesystem::create_directories(config.output.dir, ec);
        if (ec) throw Error(ErrorKind::ConfigInvalid, "cannot create " + config.output.dir.string());
        write_file(config.output.dir / "convergence.csv", table.csv);
        write_file(config.output.dir / "convergence.json", table.report);
    }
    return table;
}

std::vector<CatalogListing> list_catalog() {
    std::vector<CatalogListing> out;
    for (const CatalogEntry& e : catalog()) {
        CatalogListing l;
        l.name = e.name;
        l.description = e.description;
        l.dim = e.immersion.dim();
        l.ambient_dim = e.immersion.ambient_dim();
        l.ambient = e.immersion.ambient().description();
        l.flags = e.flags;
        out.push_back(std::move(l));
    }
    return out;
}

}  // namespace umbilic::lab
