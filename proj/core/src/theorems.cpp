#include "umbilic/theorems.hpp"

#include "umbilic/error.hpp"
#include "umbilic/expression.hpp"
#include "umbilic/parallel.hpp"
#include "umbilic/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace umbilic {

std::string_view to_string(TheoremId id) {
    switch (id) {
        case TheoremId::MainThForward: return "MainTH-fwd";
        case TheoremId::MainThConverse: return "MainTH-conv";
        case TheoremId::Corollary: return "COR";
        case TheoremId::PlanarImpliesPG: return "PlanarImpliesPG";
        case TheoremId::SecondTh: return "SecondTH";
        case TheoremId::ThirdTh: return "ThirdTH";
    }
    return "";
}

const std::vector<TheoremId>& all_theorems() {
    static const std::vector<TheoremId> ids{TheoremId::MainThForward, TheoremId::MainThConverse,
                                            TheoremId::Corollary,     TheoremId::PlanarImpliesPG,
                                            TheoremId::SecondTh,      TheoremId::ThirdTh};
    return ids;
}

std::optional<TheoremId> theorem_from_string(std::string_view name) {
    for (TheoremId id : all_theorems()) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

DefectVerdict combine(const std::vector<NamedDefect>& defects) {
    bool all_satisfied = true;
    for (const NamedDefect& d : defects) {
        if (d.verdict == DefectVerdict::Violated) return DefectVerdict::Violated;
        if (d.verdict != DefectVerdict::Satisfied) all_satisfied = false;
    }
    return all_satisfied && !defects.empty() ? DefectVerdict::Satisfied : DefectVerdict::Indeterminate;
}

bool SuiteResult::all_consistent() const {
    for (const EntryResult& e : entries) {
        for (const TheoremVerdict& v : e.verdicts) {
            if (!v.consistent) return false;
        }
    }
    return true;
}

void validate(const SuiteConfig& config) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); };
    if (!(config.h > 0.0)) fail("step h must be positive");
    if (!(config.t_min <= 0.0 && config.t_max >= 0.0 && config.t_min < config.t_max)) {
        fail("span must contain 0");
    }
    if (!(config.thresholds.planar > 0.0 && config.thresholds.planar < config.thresholds.reject)) {
        fail("thresholds must satisfy 0 < planar < reject");
    }
    if (config.pg_seeds > 0 && config.c_values.empty()) fail("pseudo-geodesic seeds need at least one c value");
    for (double c : config.c_values) {
        if (c == 0.0 || !std::isfinite(c)) fail("c values must be finite and nonzero");
    }
    if (config.directions.count < 2) fail("at least two sample directions are needed");
    if (config.grid_per_axis < 0) fail("grid_per_axis must be nonnegative");
}

// ---------------------------------------------------------------------------
// Plane sections

bool supports_plane_sections(const CatalogEntry& entry) {
    const ParametricImmersion& imm = entry.immersion;
    if (imm.dim() != 2 || imm.ambient().is_level_set() || imm.ambient_dim() < 3) return false;
    for (const ChartVec& u : grid_points(entry.seed_box, 3)) {
        const AmbientVec x = imm.position(u);
        if (std::abs(x.head(3).norm() - 1.0) > 1e-12) return false;
        if (x.size() > 3 && x.tail(x.size() - 3).norm() > 1e-12) return false;
    }
    return true;
}

Eigen::Vector3d plane_section_normal() { return {std::cos(0.1), 0.0, std::sin(0.1)}; }

std::vector<double> plane_section_offsets(std::size_t count) {
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(count == 1 ? 0.6 : 0.3 + 0.6 * static_cast<double>(k) / static_cast<double>(count - 1));
    }
    return out;
}

CurveTrajectory plane_section_trajectory(const ParametricImmersion& imm, const Eigen::Vector3d& normal,
                                         double offset, double h) {
    const Eigen::Vector3d n = normal.normalized();
    if (std::abs(offset) >= 1.0) throw Error(ErrorKind::ConfigInvalid, "plane misses the unit sphere");
    const Eigen::Vector3d e2 = (Eigen::Vector3d::UnitZ() - n.z() * n).normalized();
    const Eigen::Vector3d e1 = e2.cross(n);
    const double rho = std::sqrt(1.0 - offset * offset);
    const int dim = imm.ambient_dim();
    auto pad = [dim](const Eigen::Vector3d& v) {
        AmbientVec out = AmbientVec::Zero(dim);
        out.head(3) = v;
        return out;
    };
    auto curve = [=](double s) {
        return pad(offset * n + rho * (std::cos(s / rho) * e1 + std::sin(s / rho) * e2));
    };
    auto derivative = [=](double s) { return pad(-std::sin(s / rho) * e1 + std::cos(s / rho) * e2); };
    const ChartVec guess = invert_chart(imm, curve(0.0), imm.domain().centre());
    const double half = 0.95 * std::numbers::pi * rho;
    CurveTrajectory traj = trajectory_from_ambient_curve(imm, curve, derivative, 0.0, guess, -half, half, h);
    return traj;
}

// ---------------------------------------------------------------------------

namespace {

ChartMat orthonormal_basis(const ChartMat& g) {
    const ChartMat l = Eigen::LLT<ChartMat>(g).matrixL();
    return l.transpose().triangularView<Eigen::Upper>().solve(ChartMat::Identity(g.rows(), g.cols()));
}

std::vector<CurveRequest> make_seeds(const CatalogEntry& entry, const SuiteConfig& config, bool sections) {
    const ParametricImmersion& imm = entry.immersion;
    const int m = imm.dim();
    Rng rng(config.seed, entry.name);
    auto draw_point = [&] {
        ChartVec p(m);
        for (int i = 0; i < m; ++i) p[i] = rng.uniform(entry.seed_box.lower[i], entry.seed_box.upper[i]);
        return p;
    };
    auto draw_unit = [&] {
        ChartVec w(m);
        do {
            for (int i = 0; i < m; ++i) w[i] = rng.normal();
        } while (w.norm() < 1e-6);
        return ChartVec(w.normalized());
    };
    std::vector<CurveRequest> out;
    for (std::size_t k = 0; k < config.geodesic_seeds; ++k) {
        CurveRequest s;
        s.label = "geodesic/" + std::to_string(k);
        s.kind = CurveKind::Geodesic;
        s.p = draw_point();
        const ChartVec w = draw_unit();
        s.x = orthonormal_basis(tangent_geometry(imm, s.p).g) * w;
        out.push_back(std::move(s));
    }
    for (std::size_t k = 0; k < config.pg_seeds; ++k) {
        CurveRequest s;
        s.label = "pseudo-geodesic/" + std::to_string(k);
        s.kind = CurveKind::PseudoGeodesic;
        s.c = config.c_values[k % config.c_values.size()];
        s.p = draw_point();
        const ChartMat basis = orthonormal_basis(tangent_geometry(imm, s.p).g);
        const ChartVec w = draw_unit();
        s.x = basis * w;
        if (m > 2) {
            ChartVec v = draw_unit();
            v -= v.dot(w) * w;
            s.y = basis * v.normalized();
        }
        out.push_back(std::move(s));
    }
    if (sections) {
        const std::vector<double> offsets = plane_section_offsets(config.plane_sections);
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            CurveRequest s;
            s.label = "section/" + std::to_string(k);
            s.kind = CurveKind::Sampled;
            s.section_offset = offsets[k];
            out.push_back(std::move(s));
        }
    }
    return out;
}

SeedRecord evaluate_request(const CatalogEntry& entry, const CurveRequest& spec, const SuiteConfig& config,
                            bool hypersurface, const TrajectoryObserver* observer, std::string& rendered) {
    const ParametricImmersion& imm = entry.immersion;
    SeedRecord rec;
    rec.label = spec.label;
    rec.kind = spec.kind;
    rec.c = spec.c;
    try {
        const CurveTrajectory traj = integrate_request(imm, spec, config.t_min, config.t_max, config.h);
        rec.p = traj.u[traj.origin];
        rec.x = traj.T[traj.origin];
        rec.y = traj.Y[traj.origin];
        rec.samples = traj.size();
        rec.truncated = traj.truncated;
        rec.truncation = traj.truncation;
        rec.tau_events = traj.tau_events;
        rec.max_drift = traj.max_drift;

        const CurveKinematics kin = curve_kinematics(imm, traj);
        rec.intrinsic = intrinsic_planarity_residual(imm, traj, kin, config.thresholds);
        rec.ambient = ambient_planarity_residual(imm, traj, kin, config.thresholds);
        const CurvatureProfile profile = curvature_profile(traj, kin);
        rec.pythagoras_defect = profile.pythagoras_defect();
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i < profile.size(); ++i) {
            if (!profile.interior(i)) continue;
            lo = std::min(lo, profile.kappa_tilde[i]);
            hi = std::max(hi, profile.kappa_tilde[i]);
        }
        rec.kappa_tilde_min = lo;
        rec.kappa_tilde_spread = hi - lo;
        rec.tau0 = kin.tau[traj.origin];
        rec.asymptotic = rec.tau0 < kTauFloor;
        rec.umbilicity_at_seed = umbilicity_defect(imm, rec.p, config.directions);

        if (spec.kind == CurveKind::Sampled) {
            std::vector<double> ratio(profile.size(), 0.0);
            std::vector<bool> mask(profile.size(), false);
            for (std::size_t i = 0; i < profile.size(); ++i) {
                if (profile.interior(i) && profile.kappa[i] >= 1e-6) {
                    mask[i] = true;
                    ratio[i] = profile.tau[i] / profile.kappa[i];
                }
            }
            rec.tau_over_kappa_stdev = masked_stdev(ratio, mask);
        }
        if (spec.kind != CurveKind::Geodesic) {
            if (config.normal_residuals && spec.kind == CurveKind::PseudoGeodesic) {
                try {
                    rec.normal = normal_equation_residuals(imm, traj, kin);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::TauFloorViolated) throw;
                }
            }
            try {
                rec.parallel_normalized_H = parallel_normalized_H_defect(imm, traj);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::MeanCurvatureVanishes) throw;
            }
        }
        if (spec.kind == CurveKind::Geodesic && hypersurface && !rec.asymptotic) {
            const FramePacket fp = frame_at(imm, rec.p);
            const AmbientVec normal = fp.normals.col(0);
            const double sigma = fp.alpha(rec.x, rec.x).dot(normal);
            rec.eigenvector_defect = g_norm(fp.g, shape_operator_at(fp, normal) * rec.x + sigma * rec.x);
        }
        if (observer && observer->render) rendered = observer->render(entry.name, rec, traj, profile);
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

// Aggregate planarity over the seeds selected by `keep`: satisfied iff all
// are planar, violated iff one is non-planar.
NamedDefect planarity_over(const std::vector<SeedRecord>& seeds, const std::string& name,
                           const std::function<bool(const SeedRecord&)>& keep, std::string* witness) {
    NamedDefect d;
    d.name = name;
    bool all_planar = true;
    bool any_nonplanar = false;
    for (const SeedRecord& s : seeds) {
        if (!s.ok() || !keep(s)) continue;
        ++d.samples;
        if (s.planarity_defect() >= d.value) {
            d.value = s.planarity_defect();
            if (witness) *witness = s.label;
        }
        if (s.ambient.verdict == PlanarityVerdict::NonPlanar) any_nonplanar = true;
        if (s.ambient.verdict != PlanarityVerdict::Planar) all_planar = false;
    }
    if (d.samples == 0) {
        d.verdict = DefectVerdict::Indeterminate;
    } else if (any_nonplanar) {
        d.verdict = DefectVerdict::Violated;
    } else {
        d.verdict = all_planar ? DefectVerdict::Satisfied : DefectVerdict::Indeterminate;
    }
    return d;
}

// Largest value of an optional per-seed quantity, classified with the defect bands.
NamedDefect max_over(const std::vector<SeedRecord>& seeds, const std::string& name,
                     const std::function<std::optional<double>(const SeedRecord&)>& value,
                     const Thresholds& thresholds) {
    NamedDefect d;
    d.name = name;
    for (const SeedRecord& s : seeds) {
        if (!s.ok()) continue;
        const std::optional<double> v = value(s);
        if (!v) continue;
        ++d.samples;
        d.value = std::max(d.value, *v);
    }
    d.verdict = d.samples == 0 ? DefectVerdict::Indeterminate : classify_defect(d.value, thresholds);
    return d;
}

NamedDefect from_report(const DefectReport& report) {
    return NamedDefect{report.name, report.sup, report.verdict, report.values.size()};
}

void finish(TheoremVerdict& v) {
    v.hypothesis_verdict = combine(v.hypothesis);
    v.conclusion_verdict = combine(v.conclusion);
    v.consistent = v.hypothesis_verdict != DefectVerdict::Satisfied || v.conclusion_verdict == DefectVerdict::Satisfied;
}

bool is_pg(const SeedRecord& s) { return s.kind == CurveKind::PseudoGeodesic; }
bool is_geodesic(const SeedRecord& s) { return s.kind == CurveKind::Geodesic; }
bool is_section(const SeedRecord& s) { return s.kind == CurveKind::Sampled; }

std::size_t failed(const std::vector<SeedRecord>& seeds, bool (*kind)(const SeedRecord&)) {
    return static_cast<std::size_t>(
        std::count_if(seeds.begin(), seeds.end(), [&](const SeedRecord& s) { return kind(s) && !s.ok(); }));
}

std::string failure_note(std::size_t count) {
    return count == 0 ? std::string() : std::to_string(count) + " seed(s) failed and were left out";
}

std::vector<TheoremVerdict> verdicts_for(const EntryResult& r, const SuiteConfig& config, bool sections) {
    const Thresholds& thr = config.thresholds;
    const std::vector<SeedRecord>& seeds = r.seeds;
    auto wanted = [&](TheoremId id) {
        return config.theorems.empty() ||
               std::find(config.theorems.begin(), config.theorems.end(), id) != config.theorems.end();
    };
    const NamedDefect umb = from_report(r.umbilicity);
    std::vector<TheoremVerdict> out;
    auto start = [&](TheoremId id) {
        TheoremVerdict v;
        v.id = id;
        v.entry = r.entry;
        return v;
    };

    if (wanted(TheoremId::MainThForward)) {
        TheoremVerdict v = start(TheoremId::MainThForward);
        v.hypothesis.push_back(umb);
        v.conclusion.push_back(planarity_over(seeds, "pseudo-geodesic ambient planarity", is_pg, &v.witness));
        v.note = failure_note(failed(seeds, is_pg));
        finish(v);
        out.push_back(std::move(v));
    }
    if (wanted(TheoremId::MainThConverse)) {
        TheoremVerdict v = start(TheoremId::MainThConverse);
        v.hypothesis.push_back(planarity_over(
            seeds, "non-asymptotic pseudo-geodesic ambient planarity",
            [](const SeedRecord& s) { return is_pg(s) && !s.asymptotic; }, &v.witness));
        v.conclusion.push_back(umb);
        NamedDefect parallel_h = max_over(
            seeds, "parallel normalized H",
            [](const SeedRecord& s) {
                return is_pg(s) && !s.asymptotic ? s.parallel_normalized_H : std::optional<double>();
            },
            thr);
        std::string note = failure_note(failed(seeds, is_pg));
        if (parallel_h.samples > 0) {
            v.conclusion.push_back(parallel_h);
        } else {
            note += std::string(note.empty() ? "" : "; ") + "mean curvature vanishes along every seed";
        }
        if (v.hypothesis.front().samples == 0) {
            note += std::string(note.empty() ? "" : "; ") + "every pseudo-geodesic seed is asymptotic";
        }
        v.note = note;
        finish(v);
        out.push_back(std::move(v));
    }
    if (wanted(TheoremId::Corollary)) {
        TheoremVerdict v = start(TheoremId::Corollary);
        v.hypothesis.push_back(umb);
        v.conclusion.push_back(planarity_over(seeds, "geodesic ambient planarity", is_geodesic, &v.witness));
        v.note = failure_note(failed(seeds, is_geodesic));
        finish(v);
        out.push_back(std::move(v));
    }
    if (sections && wanted(TheoremId::PlanarImpliesPG)) {
        TheoremVerdict v = start(TheoremId::PlanarImpliesPG);
        v.hypothesis.push_back(umb);
        v.hypothesis.push_back(max_over(
            seeds, "parallel normalized H",
            [](const SeedRecord& s) { return is_section(s) ? s.parallel_normalized_H : std::optional<double>(); },
            thr));
        v.hypothesis.push_back(planarity_over(seeds, "plane-section ambient planarity", is_section, nullptr));
        std::string witness;
        double worst = -1.0;
        for (const SeedRecord& s : seeds) {
            if (s.ok() && s.tau_over_kappa_stdev && *s.tau_over_kappa_stdev > worst) {
                worst = *s.tau_over_kappa_stdev;
                witness = s.label;
            }
        }
        v.witness = witness;
        v.conclusion.push_back(max_over(
            seeds, "stdev(tau/kappa)", [](const SeedRecord& s) { return s.tau_over_kappa_stdev; }, thr));
        v.note = failure_note(failed(seeds, is_section));
        finish(v);
        out.push_back(std::move(v));
    }
    if (r.codim == 1 && wanted(TheoremId::SecondTh)) {
        TheoremVerdict v = start(TheoremId::SecondTh);
        v.hypothesis.push_back(planarity_over(seeds, "geodesic ambient planarity", is_geodesic, &v.witness));
        v.conclusion.push_back(umb);
        const NamedDefect eigen = max_over(
            seeds, "eigenvector defect",
            [](const SeedRecord& s) {
                return s.ambient.verdict == PlanarityVerdict::Planar ? s.eigenvector_defect : std::optional<double>();
            },
            thr);
        if (eigen.samples > 0) v.conclusion.push_back(eigen);
        v.note = failure_note(failed(seeds, is_geodesic));
        finish(v);
        out.push_back(std::move(v));
    }
    if (wanted(TheoremId::ThirdTh)) {
        TheoremVerdict v = start(TheoremId::ThirdTh);
        const NamedDefect planar = planarity_over(seeds, "geodesic ambient planarity", is_geodesic, &v.witness);
        v.hypothesis.push_back(planar);
        v.conclusion.push_back(from_report(r.isotropy));
        v.note = failure_note(failed(seeds, is_geodesic));
        finish(v);
        out.push_back(v);

        TheoremVerdict circle = start(TheoremId::ThirdTh);
        circle.variant = "circle";
        circle.witness = v.witness;
        circle.hypothesis.push_back(planar);
        circle.hypothesis.push_back(max_over(
            seeds, "kappa_tilde spread",
            [](const SeedRecord& s) { return is_geodesic(s) ? s.kappa_tilde_spread : std::optional<double>(); },
            thr));
        NamedDefect positive{"kappa_tilde minimum", std::numeric_limits<double>::infinity(),
                             DefectVerdict::Indeterminate, 0};
        for (const SeedRecord& s : seeds) {
            if (!s.ok() || !is_geodesic(s)) continue;
            ++positive.samples;
            positive.value = std::min(positive.value, s.kappa_tilde_min);
        }
        if (positive.samples == 0) {
            positive.value = 0.0;
        } else {
            positive.verdict = positive.value > thr.planar ? DefectVerdict::Satisfied : DefectVerdict::Violated;
        }
        circle.hypothesis.push_back(positive);

        NamedDefect spread{"lambda spread", 0.0, DefectVerdict::Indeterminate, r.lambda.size()};
        NamedDefect lambda_min{"lambda minimum", 0.0, DefectVerdict::Indeterminate, r.lambda.size()};
        if (!r.lambda.empty()) {
            const auto [lo, hi] = std::minmax_element(r.lambda.begin(), r.lambda.end());
            spread.value = *hi - *lo;
            spread.verdict = classify_defect(spread.value, thr);
            lambda_min.value = *lo;
            lambda_min.verdict = *lo > thr.planar ? DefectVerdict::Satisfied : DefectVerdict::Violated;
        }
        circle.conclusion.push_back(from_report(r.isotropy));
        circle.conclusion.push_back(spread);
        circle.conclusion.push_back(lambda_min);
        circle.note = v.note;
        finish(circle);
        out.push_back(std::move(circle));
    }
    return out;
}

int default_grid(int m) {
    switch (m) {
        case 1:
        case 2: return 5;
        case 3: return 3;
        default: return 2;
    }
}

}  // namespace

CurveTrajectory integrate_request(const ParametricImmersion& imm, const CurveRequest& request, double t_min,
                                  double t_max, double h) {
    switch (request.kind) {
        case CurveKind::Geodesic:
            return integrate_geodesic(imm, request.p, request.x / g_norm(tangent_geometry(imm, request.p).g, request.x),
                                      t_min, t_max, h);
        case CurveKind::PseudoGeodesic:
            return integrate_planar_pseudo_geodesic(
                imm, make_spec(imm, request.p, request.x, request.y, request.c, t_min, t_max, h));
        case CurveKind::PrescribedKappa: {
            const PseudoGeodesicSpec frame = make_spec(imm, request.p, request.x, request.y, 0.0, t_min, t_max, h);
            auto kappa =
                std::make_shared<const expr::ScalarFunction>(request.kappa, std::vector<std::string>{"t"});
            return integrate_planar_prescribed_kappa(
                imm, frame.p, frame.x, frame.y,
                [kappa](double t) { return (*kappa)(std::span<const double>(&t, 1)); }, t_min, t_max, h);
        }
        case CurveKind::Sampled: return plane_section_trajectory(imm, plane_section_normal(), request.section_offset, h);
    }
    throw Error(ErrorKind::ConfigInvalid, "unknown curve kind");
}

SeedRecord evaluate_curve(const CatalogEntry& entry, const CurveRequest& request, const SuiteConfig& config,
                          const TrajectoryObserver* observer, std::string* rendered) {
    std::string sink;
    bool hypersurface = false;
    try {
        hypersurface = frame_at(entry.immersion, entry.seed_box.centre()).codim() == 1;
    } catch (const std::exception&) {
    }
    return evaluate_request(entry, request, config, hypersurface, observer, rendered ? *rendered : sink);
}

SuiteResult theorem_suite(const std::vector<CatalogEntry>& ensemble, const SuiteConfig& config,
                          const TrajectoryObserver* observer) {
    validate(config);
    SuiteResult result;
    result.config = config;
    for (const CatalogEntry& entry : ensemble) {
        const ParametricImmersion& imm = entry.immersion;
        EntryResult r;
        r.entry = entry.name;
        r.flags = entry.flags;
        r.dim = imm.dim();
        r.codim = frame_at(imm, entry.seed_box.centre()).codim();

        const int per_axis = config.grid_per_axis > 0 ? config.grid_per_axis : default_grid(imm.dim());
        const std::vector<ChartVec> grid = grid_points(entry.seed_box, per_axis);
        r.umbilicity = umbilicity_report(imm, grid, config.directions, config.thresholds);
        r.isotropy = isotropy_report(imm, grid, &r.lambda, config.directions, config.thresholds);

        const bool sections = supports_plane_sections(entry) &&
                              (config.theorems.empty() ||
                               std::find(config.theorems.begin(), config.theorems.end(),
                                         TheoremId::PlanarImpliesPG) != config.theorems.end());
        const std::vector<CurveRequest> specs = make_seeds(entry, config, sections);
        r.seeds.resize(specs.size());
        std::vector<std::string> rendered(specs.size());
        parallel_for(specs.size(), config.threads, [&](std::size_t i) {
            r.seeds[i] = evaluate_request(entry, specs[i], config, r.codim == 1, observer, rendered[i]);
        });
        if (observer && observer->emit) {
            for (std::size_t i = 0; i < specs.size(); ++i) {
                if (r.seeds[i].ok()) observer->emit(entry.name, r.seeds[i], rendered[i]);
            }
        }
        r.verdicts = verdicts_for(r, config, sections);
        result.entries.push_back(std::move(r));
    }
    return result;
}

}  // namespace umbilic
