#include "umbilic/catalog.hpp"

#include "umbilic/error.hpp"

#include <numbers>

namespace umbilic {

namespace {

constexpr double kPi = std::numbers::pi;

ChartVec vec2(double a, double b) {
    ChartVec v(2);
    v << a, b;
    return v;
}

ChartVec vec3(double a, double b, double c) {
    ChartVec v(3);
    v << a, b, c;
    return v;
}

Box box2(double lo0, double hi0, double lo1, double hi1) { return Box{vec2(lo0, lo1), vec2(hi0, hi1)}; }

// Writers that fill every index permutation of a symmetric partial.
struct JetWriter {
    Jet& jet;
    int m;
    void d1(int i, double x, double y, double z) { jet.first.col(i) << x, y, z; }
    void d2(int i, int j, double x, double y, double z) {
        jet.second.col(i * m + j) << x, y, z;
        jet.second.col(j * m + i) << x, y, z;
    }
    void d3(int i, int j, int k, double x, double y, double z) {
        const int idx[3] = {i, j, k};
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& p : perms) {
            jet.third.col((idx[p[0]] * m + idx[p[1]]) * m + idx[p[2]]) << x, y, z;
        }
    }
};

ParametricImmersion make_plane() {
    auto jet = [](const ChartVec& u, int order, Jet& out) {
        out.position << u[0], u[1], 0.0;
        if (order >= 1) out.first << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
    };
    return ParametricImmersion("plane", 2, AmbientSpace::euclidean(3), box2(-10, 10, -10, 10), jet, 3);
}

ParametricImmersion make_cylinder() {
    auto jet = [](const ChartVec& u, int order, Jet& out) {
        const double c = std::cos(u[0]);
        const double s = std::sin(u[0]);
        out.position << c, s, u[1];
        JetWriter w{out, 2};
        if (order >= 1) {
            w.d1(0, -s, c, 0.0);
            w.d1(1, 0.0, 0.0, 1.0);
        }
        if (order >= 2) w.d2(0, 0, -c, -s, 0.0);
        if (order >= 3) w.d3(0, 0, 0, s, -c, 0.0);
    };
    return ParametricImmersion("cylinder", 2, AmbientSpace::euclidean(3), box2(-40, 40, -40, 40), jet, 3);
}

}  // namespace

ParametricImmersion make_ellipsoid(std::string name, double a, double b, double c) {
    auto jet = [a, b, c](const ChartVec& u, int order, Jet& out) {
        const double st = std::sin(u[0]), ct = std::cos(u[0]);
        const double sp = std::sin(u[1]), cp = std::cos(u[1]);
        out.position << a * st * cp, b * st * sp, c * ct;
        JetWriter w{out, 2};
        if (order >= 1) {
            w.d1(0, a * ct * cp, b * ct * sp, -c * st);
            w.d1(1, -a * st * sp, b * st * cp, 0.0);
        }
        if (order >= 2) {
            w.d2(0, 0, -a * st * cp, -b * st * sp, -c * ct);
            w.d2(0, 1, -a * ct * sp, b * ct * cp, 0.0);
            w.d2(1, 1, -a * st * cp, -b * st * sp, 0.0);
        }
        if (order >= 3) {
            w.d3(0, 0, 0, -a * ct * cp, -b * ct * sp, c * st);
            w.d3(0, 0, 1, a * st * sp, -b * st * cp, 0.0);
            w.d3(0, 1, 1, -a * ct * cp, -b * ct * sp, 0.0);
            w.d3(1, 1, 1, a * st * sp, -b * st * cp, 0.0);
        }
    };
    return ParametricImmersion(std::move(name), 2, AmbientSpace::euclidean(3), box2(0.1, kPi - 0.1, -40, 40), jet,
                               3);
}

ParametricImmersion make_torus(std::string name, double R, double r) {
    auto jet = [R, r](const ChartVec& u, int order, Jet& out) {
        const double su = std::sin(u[0]), cu = std::cos(u[0]);
        const double sv = std::sin(u[1]), cv = std::cos(u[1]);
        const double rho = R + r * cv;
        out.position << rho * cu, rho * su, r * sv;
        JetWriter w{out, 2};
        if (order >= 1) {
            w.d1(0, -rho * su, rho * cu, 0.0);
            w.d1(1, -r * sv * cu, -r * sv * su, r * cv);
        }
        if (order >= 2) {
            w.d2(0, 0, -rho * cu, -rho * su, 0.0);
            w.d2(0, 1, r * sv * su, -r * sv * cu, 0.0);
            w.d2(1, 1, -r * cv * cu, -r * cv * su, -r * sv);
        }
        if (order >= 3) {
            w.d3(0, 0, 0, rho * su, -rho * cu, 0.0);
            w.d3(0, 0, 1, r * sv * cu, r * sv * su, 0.0);
            w.d3(0, 1, 1, r * cv * su, -r * cv * cu, 0.0);
            w.d3(1, 1, 1, r * sv * cu, r * sv * su, -r * cv);
        }
    };
    return ParametricImmersion(std::move(name), 2, AmbientSpace::euclidean(3), box2(-40, 40, -40, 40), jet, 3);
}

namespace {

std::vector<std::string> veronese_coordinates() {
    const std::string a = "(sin(theta)*cos(phi))";
    const std::string b = "(sin(theta)*sin(phi))";
    const std::string c = "cos(theta)";
    return {
        "sqrt(3)*" + b + "*" + c,
        "sqrt(3)*" + c + "*" + a,
        "sqrt(3)*" + a + "*" + b,
        "sqrt(3)/2*(" + a + "^2 - " + b + "^2)",
        "(" + a + "^2 + " + b + "^2 - 2*" + c + "^2)/2",
    };
}

std::vector<CatalogEntry> build_catalog() {
    const Box polar = box2(0.1, kPi - 0.1, -40, 40);
    const Box equatorial_seeds = box2(kPi / 2 - 0.3, kPi / 2 + 0.3, -1, 1);
    const Box unit_seeds = box2(-1, 1, -1, 1);
    const std::vector<std::string> polar_vars{"theta", "phi"};

    std::vector<CatalogEntry> out;
    out.push_back({"plane", "the plane z = 0 in R^3", make_plane(), {true, true, true, true}, unit_seeds});
    out.push_back({"cylinder", "unit circular cylinder in R^3", make_cylinder(), {false, false, false, true},
                   unit_seeds});
    out.push_back({"sphere2", "unit sphere S^2 in R^3", make_ellipsoid("sphere2", 1, 1, 1),
                   {true, true, true, true}, equatorial_seeds});
    out.push_back({"sphere3", "unit sphere S^3 in R^4, hyperspherical chart (psi, theta, phi)",
                   ParametricImmersion::from_expressions(
                       "sphere3", {"psi", "theta", "phi"},
                       {"sin(psi)*sin(theta)*cos(phi)", "sin(psi)*sin(theta)*sin(phi)", "sin(psi)*cos(theta)",
                        "cos(psi)"},
                       AmbientSpace::euclidean(4), Box{vec3(0.35, 0.35, -40), vec3(kPi - 0.35, kPi - 0.35, 40)}),
                   {true, true, true, true},
                   Box{vec3(kPi / 2 - 0.3, kPi / 2 - 0.3, -1), vec3(kPi / 2 + 0.3, kPi / 2 + 0.3, 1)}});
    out.push_back({"ellipsoid-1-1-2", "ellipsoid with semi-axes (1, 1, 2) in R^3",
                   make_ellipsoid("ellipsoid-1-1-2", 1, 1, 2), {false, false, false, true}, equatorial_seeds});
    out.push_back({"torus-2-1", "torus of revolution R = 2, r = 1 in R^3", make_torus("torus-2-1", 2, 1),
                   {false, false, false, true}, box2(-1, 1, -kPi, kPi)});
    out.push_back({"sphere2-in-R4", "unit sphere S^2 in a hyperplane of R^4",
                   ParametricImmersion::from_expressions(
                       "sphere2-in-R4", polar_vars,
                       {"sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)", "0"},
                       AmbientSpace::euclidean(4), polar),
                   {true, true, true, false}, equatorial_seeds});
    out.push_back({"clifford-in-S3", "Clifford torus in the unit sphere S^3",
                   ParametricImmersion::from_expressions(
                       "clifford-in-S3", {"u", "v"},
                       {"cos(u)/sqrt(2)", "sin(u)/sqrt(2)", "cos(v)/sqrt(2)", "sin(v)/sqrt(2)"},
                       AmbientSpace::round_sphere(4), box2(-40, 40, -40, 40)),
                   {false, false, false, true}, unit_seeds});
    out.push_back({"veronese-in-S4", "Veronese surface, S^2(sqrt 3) minimally in the unit sphere S^4",
                   ParametricImmersion::from_expressions("veronese-in-S4", polar_vars, veronese_coordinates(),
                                                         AmbientSpace::round_sphere(5), polar),
                   {false, false, true, false}, equatorial_seeds});
    out.push_back({"veronese-in-R5", "Veronese surface in R^5 (through the unit sphere S^4)",
                   ParametricImmersion::from_expressions("veronese-in-R5", polar_vars, veronese_coordinates(),
                                                         AmbientSpace::euclidean(5), polar),
                   {false, false, true, false}, equatorial_seeds});
    out.push_back({"flat3", "identity chart of R^3",
                   ParametricImmersion::from_expressions("flat3", {"x", "y", "z"}, {"x", "y", "z"},
                                                         AmbientSpace::euclidean(3),
                                                         Box{vec3(-10, -10, -10), vec3(10, 10, 10)}),
                   {true, true, true, false}, Box{vec3(-1, -1, -1), vec3(1, 1, 1)}});
    return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build_catalog();
    return entries;
}

bool has_catalog_entry(std::string_view name) {
    for (const auto& e : catalog()) {
        if (e.name == name) return true;
    }
    return false;
}

const CatalogEntry& catalog_entry(std::string_view name) {
    for (const auto& e : catalog()) {
        if (e.name == name) return e;
    }
    throw Error(ErrorKind::ConfigInvalid, "unknown catalog entry '" + std::string(name) + "'");
}

}  // namespace umbilic
