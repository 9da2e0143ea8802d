#include "umbilic/lab/config.hpp"

#include "json_writer.hpp"
#include "umbilic/error.hpp"
#include "umbilic/expression.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <memory>
#include <sstream>

namespace umbilic::lab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view origin, const std::string& path, const std::string& what) {
    throw Error(ErrorKind::ConfigInvalid,
                std::string(origin) + ": " + (path.empty() ? std::string("/") : path) + ": " + what);
}

// Reads one JSON object, tracking the pointer path for diagnostics.
class Node {
public:
    Node(const json& j, std::string path, std::string_view origin) : j_(j), path_(std::move(path)), origin_(origin) {}

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }
    [[noreturn]] void error(const std::string& what) const { fail(origin_, path_, what); }

    void require_object(std::initializer_list<std::string_view> allowed) const {
        if (!j_.is_object()) error("expected an object");
        for (const auto& [k, v] : j_.items()) {
            if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
                Node(v, path_ + "/" + k, origin_).error("unknown key");
            }
        }
    }

    bool has(std::string_view key) const { return j_.contains(key); }
    Node at(std::string_view key) const { return {j_.at(std::string(key)), path_ + "/" + std::string(key), origin_}; }
    Node at(std::size_t i) const { return {j_.at(i), path_ + "/" + std::to_string(i), origin_}; }

    std::size_t array_size() const {
        if (!j_.is_array()) error("expected an array");
        return j_.size();
    }

    double number() const {
        if (!j_.is_number()) error("expected a number");
        const double v = j_.get<double>();
        if (!std::isfinite(v)) error("expected a finite number");
        return v;
    }

    std::uint64_t unsigned_integer() const {
        if (j_.is_number_unsigned()) return j_.get<std::uint64_t>();
        if (j_.is_number_integer()) {
            if (j_.get<std::int64_t>() < 0) error("expected a nonnegative integer");
            return static_cast<std::uint64_t>(j_.get<std::int64_t>());
        }
        error("expected a nonnegative integer");
    }

    bool boolean() const {
        if (!j_.is_boolean()) error("expected true or false");
        return j_.get<bool>();
    }

    std::string string() const {
        if (!j_.is_string()) error("expected a string");
        return j_.get<std::string>();
    }

    std::vector<double> numbers() const {
        std::vector<double> out;
        for (std::size_t i = 0; i < array_size(); ++i) out.push_back(at(i).number());
        return out;
    }

    std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < array_size(); ++i) out.push_back(at(i).string());
        return out;
    }

    ChartVec chart_vector() const {
        const std::vector<double> v = numbers();
        if (v.empty() || v.size() > static_cast<std::size_t>(kMaxChartDim)) {
            error("expected 1 to " + std::to_string(kMaxChartDim) + " coordinates");
        }
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

private:
    const json& j_;
    std::string path_;
    std::string_view origin_;
};

Box read_box(const Node& n) {
    n.require_object({"lower", "upper"});
    if (!n.has("lower") || !n.has("upper")) n.error("expected lower and upper");
    return Box{n.at("lower").chart_vector(), n.at("upper").chart_vector()};
}

GroundTruth read_flags(const Node& n) {
    n.require_object({"totally_umbilic", "extrinsic_sphere", "constant_isotropic", "hypersurface"});
    GroundTruth f;
    if (n.has("totally_umbilic")) f.totally_umbilic = n.at("totally_umbilic").boolean();
    if (n.has("extrinsic_sphere")) f.extrinsic_sphere = n.at("extrinsic_sphere").boolean();
    if (n.has("constant_isotropic")) f.constant_isotropic = n.at("constant_isotropic").boolean();
    if (n.has("hypersurface")) f.hypersurface = n.at("hypersurface").boolean();
    return f;
}

Box shrink(const Box& b, double keep) {
    const ChartVec c = b.centre();
    return Box{ChartVec(c + keep * (b.lower - c)), ChartVec(c + keep * (b.upper - c))};
}

CustomImmersion read_custom(const Node& n) {
    n.require_object({"name", "description", "variables", "position", "ambient", "domain", "seed_box", "derivatives",
                      "flags"});
    for (const char* k : {"name", "variables", "position", "domain"}) {
        if (!n.has(k)) n.error(std::string("missing required key \"") + k + "\"");
    }
    CustomImmersion c;
    c.name = n.at("name").string();
    if (c.name.empty()) n.at("name").error("empty name");
    if (n.has("description")) c.description = n.at("description").string();
    c.variables = n.at("variables").strings();
    if (c.variables.empty() || c.variables.size() > static_cast<std::size_t>(kMaxChartDim)) {
        n.at("variables").error("expected 1 to " + std::to_string(kMaxChartDim) + " variables");
    }
    c.position = n.at("position").strings();
    if (c.position.size() <= c.variables.size() || c.position.size() > static_cast<std::size_t>(kMaxAmbientDim)) {
        n.at("position").error("expected between dim + 1 and " + std::to_string(kMaxAmbientDim) + " coordinates");
    }
    if (n.has("ambient")) {
        const Node a = n.at("ambient");
        a.require_object({"type", "radius", "constraint"});
        if (!a.has("type")) a.error("missing required key \"type\"");
        c.ambient = a.at("type").string();
        if (c.ambient == "sphere") {
            if (a.has("radius")) c.radius = a.at("radius").number();
            if (!(c.radius > 0.0)) a.at("radius").error("radius must be positive");
        } else if (c.ambient == "level-set") {
            if (!a.has("constraint")) a.error("level-set ambient needs a constraint");
            c.constraint = a.at("constraint").string();
        } else if (c.ambient != "euclidean") {
            a.at("type").error("expected \"euclidean\", \"sphere\" or \"level-set\"");
        }
        if (c.ambient != "sphere" && a.has("radius")) a.at("radius").error("only sphere ambients take a radius");
        if (c.ambient != "level-set" && a.has("constraint")) {
            a.at("constraint").error("only level-set ambients take a constraint");
        }
    }
    c.domain = read_box(n.at("domain"));
    const auto dim = static_cast<Eigen::Index>(c.variables.size());
    auto check_box = [&](const Box& b, const Node& where) {
        if (b.lower.size() != dim || b.upper.size() != dim) where.error("bounds need one entry per variable");
        if (!(b.lower.array() < b.upper.array()).all()) where.error("lower must be below upper on every axis");
    };
    check_box(c.domain, n.at("domain"));
    if (n.has("seed_box")) {
        c.seed_box = read_box(n.at("seed_box"));
        check_box(c.seed_box, n.at("seed_box"));
        if (!(c.seed_box.lower.array() >= c.domain.lower.array()).all() ||
            !(c.seed_box.upper.array() <= c.domain.upper.array()).all()) {
            n.at("seed_box").error("seed box must lie inside the domain");
        }
    } else {
        c.seed_box = shrink(c.domain, 0.8);
    }
    if (n.has("derivatives")) {
        const std::string d = n.at("derivatives").string();
        if (d == "analytic") {
            c.analytic = true;
        } else if (d == "finite-difference") {
            c.analytic = false;
        } else {
            n.at("derivatives").error("expected \"analytic\" or \"finite-difference\"");
        }
    }
    if (n.has("flags")) c.flags = read_flags(n.at("flags"));
    return c;
}

CurveKind read_kind(const Node& n) {
    const std::string k = n.string();
    if (k == "geodesic") return CurveKind::Geodesic;
    if (k == "pseudo-geodesic") return CurveKind::PseudoGeodesic;
    if (k == "prescribed-kappa") return CurveKind::PrescribedKappa;
    if (k == "plane-section") return CurveKind::Sampled;
    n.error("expected \"geodesic\", \"pseudo-geodesic\", \"prescribed-kappa\" or \"plane-section\"");
}

std::string_view kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::Geodesic: return "geodesic";
        case CurveKind::PseudoGeodesic: return "pseudo-geodesic";
        case CurveKind::PrescribedKappa: return "prescribed-kappa";
        case CurveKind::Sampled: return "plane-section";
    }
    return "";
}

CurveConfig read_curve(const Node& n, std::size_t index) {
    n.require_object({"immersion", "kind", "label", "point", "direction", "normal", "c", "kappa", "offset"});
    if (!n.has("immersion")) n.error("missing required key \"immersion\"");
    if (!n.has("kind")) n.error("missing required key \"kind\"");
    CurveConfig c;
    c.immersion = n.at("immersion").string();
    CurveRequest& r = c.request;
    r.kind = read_kind(n.at("kind"));
    r.label = n.has("label") ? n.at("label").string() : "curve/" + std::to_string(index);
    if (r.label.empty()) n.at("label").error("empty label");
    auto forbid = [&](const char* key) {
        if (n.has(key)) n.at(key).error(std::string("not used by ") + std::string(kind_name(r.kind)) + " curves");
    };
    if (r.kind == CurveKind::Sampled) {
        for (const char* k : {"point", "direction", "normal", "c", "kappa"}) forbid(k);
        if (!n.has("offset")) n.error("plane-section curves need an offset");
        r.section_offset = n.at("offset").number();
        if (!(std::abs(r.section_offset) < 1.0)) n.at("offset").error("offset must lie in (-1, 1)");
        return c;
    }
    forbid("offset");
    if (!n.has("point") || !n.has("direction")) n.error("curves need a point and a direction");
    r.p = n.at("point").chart_vector();
    r.x = n.at("direction").chart_vector();
    if (r.x.size() != r.p.size()) n.at("direction").error("direction and point differ in dimension");
    if (r.x.norm() == 0.0) n.at("direction").error("direction must be nonzero");
    if (n.has("normal")) {
        if (r.kind == CurveKind::Geodesic) forbid("normal");
        r.y = n.at("normal").chart_vector();
        if (r.y.size() != r.p.size()) n.at("normal").error("normal and point differ in dimension");
    }
    if (r.kind == CurveKind::PseudoGeodesic) {
        if (!n.has("c")) n.error("pseudo-geodesic curves need c");
        r.c = n.at("c").number();
    } else {
        forbid("c");
    }
    if (r.kind == CurveKind::PrescribedKappa) {
        if (!n.has("kappa")) n.error("prescribed-kappa curves need a kappa expression in t");
        r.kappa = n.at("kappa").string();
        try {
            expr::ScalarFunction check(r.kappa, {"t"});
        } catch (const Error& e) {
            n.at("kappa").error(e.detail());
        }
    } else {
        forbid("kappa");
    }
    return c;
}

void read_suite(const Node& n, SuiteConfig& s) {
    n.require_object({"seed", "geodesic_seeds", "pg_seeds", "c_values", "span", "step", "thresholds", "directions",
                      "grid_per_axis", "plane_sections", "theorems", "threads", "normal_residuals"});
    if (n.has("seed")) s.seed = n.at("seed").unsigned_integer();
    if (n.has("geodesic_seeds")) s.geodesic_seeds = n.at("geodesic_seeds").unsigned_integer();
    if (n.has("pg_seeds")) s.pg_seeds = n.at("pg_seeds").unsigned_integer();
    if (n.has("c_values")) s.c_values = n.at("c_values").numbers();
    if (n.has("span")) {
        const std::vector<double> span = n.at("span").numbers();
        if (span.size() != 2) n.at("span").error("expected [t_min, t_max]");
        s.t_min = span[0];
        s.t_max = span[1];
    }
    if (n.has("step")) s.h = n.at("step").number();
    if (n.has("thresholds")) {
        const Node t = n.at("thresholds");
        t.require_object({"planar", "reject"});
        if (t.has("planar")) s.thresholds.planar = t.at("planar").number();
        if (t.has("reject")) s.thresholds.reject = t.at("reject").number();
    }
    if (n.has("directions")) {
        const Node d = n.at("directions");
        d.require_object({"count", "seed"});
        if (d.has("count")) s.directions.count = d.at("count").unsigned_integer();
        if (d.has("seed")) s.directions.seed = d.at("seed").unsigned_integer();
    }
    if (n.has("grid_per_axis")) {
        const std::uint64_t g = n.at("grid_per_axis").unsigned_integer();
        if (g > 64) n.at("grid_per_axis").error("at most 64 points per axis");
        s.grid_per_axis = static_cast<int>(g);
    }
    if (n.has("plane_sections")) s.plane_sections = n.at("plane_sections").unsigned_integer();
    if (n.has("theorems")) {
        const Node t = n.at("theorems");
        s.theorems.clear();
        for (std::size_t i = 0; i < t.array_size(); ++i) {
            const std::string name = t.at(i).string();
            const auto id = theorem_from_string(name);
            if (!id) t.at(i).error("unknown theorem \"" + name + "\"");
            s.theorems.push_back(*id);
        }
    }
    if (n.has("threads")) {
        const std::uint64_t k = n.at("threads").unsigned_integer();
        if (k > 1024) n.at("threads").error("at most 1024 threads");
        s.threads = static_cast<unsigned>(k);
    }
    if (n.has("normal_residuals")) s.normal_residuals = n.at("normal_residuals").boolean();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(byte, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

ScenarioConfig from_json(const json& doc, std::string_view origin) {
    const Node root(doc, "", origin);
    root.require_object({"name", "description", "immersions", "curves", "suite", "convergence", "output"});
    if (!root.has("name")) root.error("missing required key \"name\"");
    ScenarioConfig c;
    c.name = root.at("name").string();
    if (c.name.empty()) root.at("name").error("empty name");
    if (root.has("description")) c.description = root.at("description").string();
    if (root.has("immersions")) {
        const Node list = root.at("immersions");
        for (std::size_t i = 0; i < list.array_size(); ++i) {
            const Node item = list.at(i);
            ImmersionRef ref;
            if (item.raw().is_string()) {
                ref.name = item.string();
                if (!has_catalog_entry(ref.name)) item.error("unknown catalog entry \"" + ref.name + "\"");
            } else {
                ref.custom = read_custom(item);
                ref.name = ref.custom->name;
            }
            c.immersions.push_back(std::move(ref));
        }
    }
    if (root.has("curves")) {
        const Node list = root.at("curves");
        for (std::size_t i = 0; i < list.array_size(); ++i) c.curves.push_back(read_curve(list.at(i), i));
    }
    if (root.has("suite")) read_suite(root.at("suite"), c.suite);
    if (root.has("convergence")) {
        const Node conv = root.at("convergence");
        conv.require_object({"steps"});
        if (conv.has("steps")) c.convergence_steps = conv.at("steps").numbers();
    }
    if (root.has("output")) {
        const Node out = root.at("output");
        out.require_object({"dir", "trajectories", "csv_stride"});
        if (out.has("dir")) c.output.dir = out.at("dir").string();
        if (out.has("trajectories")) c.output.trajectories = out.at("trajectories").boolean();
        if (out.has("csv_stride")) {
            c.output.csv_stride = out.at("csv_stride").unsigned_integer();
            if (c.output.csv_stride == 0) out.at("csv_stride").error("stride must be at least 1");
        }
    }
    try {
        validate(c);
    } catch (const Error& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string(origin) + ": " + e.detail());
    }
    return c;
}

// Built-in scenarios, kept as documents so they exercise the same parser as
// user files.
struct Builtin {
    const char* name;
    const char* text;
};

const Builtin kBuiltins[] = {
    {"sphere-mainth", R"({
  "name": "sphere-mainth",
  "description": "Round spheres: planar pseudo-geodesics and geodesics are planar in the ambient space",
  "immersions": ["sphere2", "sphere3", "sphere2-in-R4"],
  "suite": {"theorems": ["MainTH-fwd", "MainTH-conv", "COR", "PlanarImpliesPG"]}
})"},
    {"ellipsoid-secondth", R"({
  "name": "ellipsoid-secondth",
  "description": "Ellipsoid (1,1,2): non-planar geodesics, so not umbilic",
  "immersions": ["ellipsoid-1-1-2"],
  "suite": {"theorems": ["SecondTH", "MainTH-fwd", "MainTH-conv"]}
})"},
    {"torus-secondth", R"({
  "name": "torus-secondth",
  "description": "Torus of revolution (2,1): non-planar geodesics, so not umbilic",
  "immersions": ["torus-2-1"],
  "suite": {"theorems": ["SecondTH", "MainTH-fwd", "MainTH-conv"]}
})"},
    {"cylinder-secondth", R"({
  "name": "cylinder-secondth",
  "description": "Circular cylinder: helical geodesics are not planar",
  "immersions": ["cylinder"],
  "suite": {"theorems": ["SecondTH", "MainTH-fwd", "MainTH-conv"]}
})"},
    {"clifford-secondth", R"({
  "name": "clifford-secondth",
  "description": "Clifford torus in S^3: principal curvatures +1 and -1",
  "immersions": ["clifford-in-S3"],
  "suite": {"theorems": ["SecondTH", "MainTH-fwd", "MainTH-conv"]}
})"},
    {"veronese-thirdth", R"({
  "name": "veronese-thirdth",
  "description": "Veronese surfaces: geodesics have constant extrinsic curvature, immersion is constant isotropic",
  "immersions": ["veronese-in-S4", "veronese-in-R5"],
  "suite": {"theorems": ["ThirdTH"], "geodesic_seeds": 12, "pg_seeds": 0}
})"},
    {"full", R"({
  "name": "full",
  "description": "Every catalog entry against every applicable statement",
  "immersions": ["plane", "cylinder", "sphere2", "sphere3", "ellipsoid-1-1-2", "torus-2-1", "sphere2-in-R4",
                 "clifford-in-S3", "veronese-in-S4", "veronese-in-R5", "flat3"]
})"},
    {"convergence", R"({
  "name": "convergence",
  "description": "Step-halving differences of the integrator on four curves",
  "curves": [
    {"immersion": "sphere2", "kind": "pseudo-geodesic", "label": "sphere2-pg", "point": [1.2, 0.3],
     "direction": [1.0, 0.4], "c": 1.0},
    {"immersion": "ellipsoid-1-1-2", "kind": "geodesic", "label": "ellipsoid-geodesic", "point": [1.0, 0.0],
     "direction": [1.0, 1.0]},
    {"immersion": "torus-2-1", "kind": "pseudo-geodesic", "label": "torus-pg", "point": [0.5, 0.3],
     "direction": [1.0, 0.7], "c": 2.0},
    {"immersion": "plane", "kind": "geodesic", "label": "plane-geodesic", "point": [0.1, 0.2],
     "direction": [1.0, 0.5]}
  ],
  "convergence": {"steps": [0.004, 0.002, 0.001]}
})"},
};

void write_box(JsonWriter& w, std::string_view key, const Box& b) {
    w.key(key).begin_object();
    w.key("lower").numbers(b.lower);
    w.key("upper").numbers(b.upper);
    w.end_object();
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, std::string_view origin) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // nlohmann reports the byte just past the offending token
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, column] = line_column(text, byte);
        std::string detail = e.what();
        const auto colon = detail.find(": ", detail.find("parse error"));
        if (colon != std::string::npos) detail = detail.substr(colon + 2);
        std::ostringstream os;
        os << origin << ": line " << line << ", column " << column << ": malformed JSON: " << detail;
        throw Error(ErrorKind::ConfigInvalid, os.str());
    }
    return from_json(doc, origin);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

std::vector<std::string> builtin_scenarios() {
    std::vector<std::string> out;
    for (const Builtin& b : kBuiltins) out.emplace_back(b.name);
    return out;
}

bool has_builtin_scenario(std::string_view name) {
    return std::any_of(std::begin(kBuiltins), std::end(kBuiltins), [&](const Builtin& b) { return b.name == name; });
}

ScenarioConfig builtin_scenario(std::string_view name) {
    for (const Builtin& b : kBuiltins) {
        if (b.name == name) return parse_scenario(b.text, std::string("builtin:") + b.name);
    }
    std::string known;
    for (const Builtin& b : kBuiltins) known += std::string(known.empty() ? "" : ", ") + b.name;
    throw Error(ErrorKind::ConfigInvalid,
                "unknown scenario \"" + std::string(name) + "\" (not a file; built-in scenarios: " + known + ")");
}

ScenarioConfig resolve_scenario(std::string_view name_or_path) {
    const std::filesystem::path path(name_or_path);
    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec)) return load_scenario(path);
    return builtin_scenario(name_or_path);
}

void validate(const ScenarioConfig& config) {
    auto fail_at = [](const std::string& path, const std::string& what) {
        throw Error(ErrorKind::ConfigInvalid, path + ": " + what);
    };
    if (config.name.empty()) fail_at("/name", "empty name");
    try {
        validate(config.suite);
    } catch (const Error& e) {
        fail_at("/suite", e.detail());
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < config.immersions.size(); ++i) {
        const ImmersionRef& ref = config.immersions[i];
        const std::string path = "/immersions/" + std::to_string(i);
        if (std::find(names.begin(), names.end(), ref.name) != names.end()) {
            fail_at(path, "duplicate immersion \"" + ref.name + "\"");
        }
        names.push_back(ref.name);
        if (!ref.custom && !has_catalog_entry(ref.name)) fail_at(path, "unknown catalog entry \"" + ref.name + "\"");
        if (ref.custom) {
            if (has_catalog_entry(ref.name)) fail_at(path, "\"" + ref.name + "\" shadows a catalog entry");
            try {
                make_entry(*ref.custom);
            } catch (const Error& e) {
                fail_at(path, e.detail());
            }
        }
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < config.curves.size(); ++i) {
        const CurveConfig& c = config.curves[i];
        const std::string path = "/curves/" + std::to_string(i);
        const bool known = has_catalog_entry(c.immersion) ||
                           std::find(names.begin(), names.end(), c.immersion) != names.end();
        if (!known) fail_at(path + "/immersion", "unknown immersion \"" + c.immersion + "\"");
        const std::string key = c.immersion + "/" + c.request.label;
        if (std::find(labels.begin(), labels.end(), key) != labels.end()) {
            fail_at(path + "/label", "duplicate label \"" + c.request.label + "\"");
        }
        labels.push_back(key);
        if (c.request.kind == CurveKind::Sampled) {
            if (!supports_plane_sections(resolve_immersion(config, c.immersion))) {
                fail_at(path + "/kind", "plane sections need a unit 2-sphere in Euclidean space");
            }
            continue;
        }
        const CatalogEntry entry = resolve_immersion(config, c.immersion);
        if (c.request.p.size() != entry.immersion.dim()) {
            fail_at(path + "/point", "expected " + std::to_string(entry.immersion.dim()) + " coordinates");
        }
        if (!entry.immersion.in_domain(c.request.p)) fail_at(path + "/point", "outside the chart domain");
        if (c.request.kind == CurveKind::PseudoGeodesic && c.request.c == 0.0) {
            fail_at(path + "/c", "c must be nonzero");
        }
    }
    const std::vector<double>& steps = config.convergence_steps;
    for (double h : steps) {
        if (!(h > 0.0)) fail_at("/convergence/steps", "steps must be positive");
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (!(steps[i] < steps[i - 1])) fail_at("/convergence/steps", "steps must decrease");
    }
    if (config.output.csv_stride == 0) fail_at("/output/csv_stride", "stride must be at least 1");
}

std::string canonical_json(const ScenarioConfig& c) {
    JsonWriter w;
    w.begin_object();
    w.field("name", c.name);
    w.field("description", c.description);
    w.key("immersions").begin_array();
    for (const ImmersionRef& ref : c.immersions) {
        if (!ref.custom) {
            w.value(ref.name);
            continue;
        }
        const CustomImmersion& m = *ref.custom;
        w.begin_object();
        w.field("name", m.name);
        w.field("description", m.description);
        w.key("variables").begin_array();
        for (const std::string& v : m.variables) w.value(v);
        w.end_array();
        w.key("position").begin_array();
        for (const std::string& v : m.position) w.value(v);
        w.end_array();
        w.key("ambient").begin_object();
        w.field("type", m.ambient);
        if (m.ambient == "sphere") w.field("radius", m.radius);
        if (m.ambient == "level-set") w.field("constraint", m.constraint);
        w.end_object();
        write_box(w, "domain", m.domain);
        write_box(w, "seed_box", m.seed_box);
        w.field("derivatives", m.analytic ? "analytic" : "finite-difference");
        w.key("flags").begin_object();
        w.field("totally_umbilic", m.flags.totally_umbilic);
        w.field("extrinsic_sphere", m.flags.extrinsic_sphere);
        w.field("constant_isotropic", m.flags.constant_isotropic);
        w.field("hypersurface", m.flags.hypersurface);
        w.end_object();
        w.end_object();
    }
    w.end_array();
    w.key("curves").begin_array();
    for (const CurveConfig& cc : c.curves) {
        const CurveRequest& r = cc.request;
        w.begin_object();
        w.field("immersion", cc.immersion);
        w.field("kind", kind_name(r.kind));
        w.field("label", r.label);
        if (r.kind == CurveKind::Sampled) {
            w.field("offset", r.section_offset);
        } else {
            w.key("point").numbers(r.p);
            w.key("direction").numbers(r.x);
            if (r.y.size() > 0) w.key("normal").numbers(r.y);
            if (r.kind == CurveKind::PseudoGeodesic) w.field("c", r.c);
            if (r.kind == CurveKind::PrescribedKappa) w.field("kappa", r.kappa);
        }
        w.end_object();
    }
    w.end_array();
    const SuiteConfig& s = c.suite;
    w.key("suite").begin_object();
    w.field("seed", static_cast<unsigned long long>(s.seed));
    w.field("geodesic_seeds", static_cast<unsigned long long>(s.geodesic_seeds));
    w.field("pg_seeds", static_cast<unsigned long long>(s.pg_seeds));
    w.key("c_values").numbers(s.c_values);
    w.key("span").numbers(std::vector<double>{s.t_min, s.t_max});
    w.field("step", s.h);
    w.key("thresholds").begin_object();
    w.field("planar", s.thresholds.planar);
    w.field("reject", s.thresholds.reject);
    w.end_object();
    w.key("directions").begin_object();
    w.field("count", static_cast<unsigned long long>(s.directions.count));
    w.field("seed", static_cast<unsigned long long>(s.directions.seed));
    w.end_object();
    w.field("grid_per_axis", s.grid_per_axis);
    w.field("plane_sections", static_cast<unsigned long long>(s.plane_sections));
    w.key("theorems").begin_array();
    for (TheoremId id : s.theorems) w.value(to_string(id));
    w.end_array();
    w.field("normal_residuals", s.normal_residuals);
    w.end_object();
    w.key("convergence").begin_object();
    w.key("steps").numbers(c.convergence_steps);
    w.end_object();
    w.end_object();
    return w.str();
}

std::string config_hash(const ScenarioConfig& config) {
    const std::string text = canonical_json(config);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::ConfigInvalid, "SHA-256 unavailable");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

CatalogEntry make_entry(const CustomImmersion& c) {
    const int dim = static_cast<int>(c.variables.size());
    const int n = static_cast<int>(c.position.size());
    AmbientSpace ambient = AmbientSpace::euclidean(n);
    if (c.ambient == "sphere") ambient = AmbientSpace::round_sphere(n, c.radius);
    if (c.ambient == "level-set") ambient = AmbientSpace::level_set_expression(n, c.constraint);
    auto make = [&]() -> ParametricImmersion {
        if (c.analytic) return ParametricImmersion::from_expressions(c.name, c.variables, c.position, ambient, c.domain);
        auto fn = std::make_shared<const expr::VectorFunction>(std::span<const std::string>(c.position), c.variables, 0);
        auto position = [fn, n](const ChartVec& u) {
            thread_local std::vector<double> scratch;
            fn->evaluate(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())), 0, scratch);
            AmbientVec x(n);
            for (int a = 0; a < n; ++a) x[a] = fn->value(scratch, a);
            return x;
        };
        return ParametricImmersion::from_positions(c.name, dim, ambient, c.domain, position);
    };
    return CatalogEntry{c.name, c.description, make(), c.flags, c.seed_box};
}

CatalogEntry resolve_immersion(const ScenarioConfig& config, std::string_view name) {
    for (const ImmersionRef& ref : config.immersions) {
        if (ref.name == name && ref.custom) return make_entry(*ref.custom);
    }
    return catalog_entry(name);
}

std::vector<CatalogEntry> build_ensemble(const ScenarioConfig& config) {
    std::vector<CatalogEntry> out;
    for (const ImmersionRef& ref : config.immersions) {
        out.push_back(ref.custom ? make_entry(*ref.custom) : catalog_entry(ref.name));
    }
    return out;
}

}  // namespace umbilic::lab
