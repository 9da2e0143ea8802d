#include "umbilic/trajectory.hpp"

#include "umbilic/error.hpp"
#include "umbilic/numdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace umbilic {

std::string_view to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::Geodesic: return "geodesic";
        case CurveKind::PseudoGeodesic: return "pseudo-geodesic";
        case CurveKind::PrescribedKappa: return "planar-prescribed-kappa";
        case CurveKind::Sampled: return "sampled";
    }
    return "unknown";
}

namespace {

constexpr double kTauEventFloor = 1e-6;

int codimension_in_q(const ParametricImmersion& imm) {
    return imm.ambient_dim() - imm.dim() - (imm.ambient().is_level_set() ? 1 : 0);
}

std::size_t step_count(double span, double h) {
    if (span <= 0.0) return 0;
    return static_cast<std::size_t>(std::floor(span / h + 1e-9));
}

struct State {
    ChartVec u, T, Y;
};

struct Rates {
    ChartVec du, dT, dY;
};

class Field {
public:
    Field(const ParametricImmersion& imm, CurveKind kind, double c, std::function<double(double)> kappa)
        : imm_(imm), kind_(kind), c_(c), kappa_(std::move(kappa)) {}

    double effective_kappa(double t, const TangentGeometry& geom, const ChartVec& T) const {
        switch (kind_) {
            case CurveKind::PseudoGeodesic: return c_ == 0.0 ? 0.0 : c_ * pseudo_geodesic_sigma(geom, T);
            case CurveKind::PrescribedKappa: return kappa_(t);
            default: return 0.0;
        }
    }

    Rates rates(double t, const State& s, const TangentGeometry& geom) const {
        const double k = effective_kappa(t, geom, s.T);
        Rates r;
        r.du = s.T;
        r.dT = k * s.Y - geom.christoffel(s.T, s.T);
        r.dY = -geom.christoffel(s.T, s.Y) - k * s.T;
        return r;
    }

    Rates rates(double t, const State& s) const { return rates(t, s, tangent_geometry(imm_, s.u)); }

private:
    const ParametricImmersion& imm_;
    CurveKind kind_;
    double c_;
    std::function<double(double)> kappa_;
};

State advance(const State& s, double a, const Rates& r) { return {s.u + a * r.du, s.T + a * r.dT, s.Y + a * r.dY}; }

bool finite(const State& s) { return s.u.allFinite() && s.T.allFinite() && s.Y.allFinite(); }

struct Sample {
    double t;
    State state;
    AmbientVec x;
    double sigma;
};

struct Leg {
    std::vector<Sample> samples;  // excludes t = 0
    bool truncated = false;
    std::string reason;
    double drift = 0.0;
};

Leg integrate_leg(const ParametricImmersion& imm, const Field& field, const State& start,
                  const TangentGeometry& start_geom, double h, std::size_t steps) {
    Leg leg;
    State s = start;
    TangentGeometry geom = start_geom;
    double t = 0.0;
    for (std::size_t n = 1; n <= steps; ++n) {
        try {
            const Rates k1 = field.rates(t, s, geom);
            const Rates k2 = field.rates(t + 0.5 * h, advance(s, 0.5 * h, k1));
            const Rates k3 = field.rates(t + 0.5 * h, advance(s, 0.5 * h, k2));
            const Rates k4 = field.rates(t + h, advance(s, h, k3));
            State next = s;
            next.u += h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
            next.T += h / 6.0 * (k1.dT + 2.0 * k2.dT + 2.0 * k3.dT + k4.dT);
            next.Y += h / 6.0 * (k1.dY + 2.0 * k2.dY + 2.0 * k3.dY + k4.dY);
            if (!finite(next)) throw Error(ErrorKind::StepRejected, "non-finite state");
            geom = tangent_geometry(imm, next.u);

            const double tt = g_inner(geom.g, next.T, next.T);
            const double yy = g_inner(geom.g, next.Y, next.Y);
            const double ty = g_inner(geom.g, next.T, next.Y);
            leg.drift = std::max({leg.drift, std::abs(std::sqrt(tt) - 1.0), std::abs(std::sqrt(yy) - 1.0),
                                  std::abs(ty)});
            next.T /= std::sqrt(tt);
            next.Y -= g_inner(geom.g, next.Y, next.T) * next.T;
            next.Y /= g_norm(geom.g, next.Y);
            if (!finite(next)) throw Error(ErrorKind::StepRejected, "frame degenerated during renormalisation");

            s = next;
            t = static_cast<double>(n) * h;
            leg.samples.push_back({t, s, geom.position, field.effective_kappa(t, geom, s.T)});
        } catch (const Error& e) {
            leg.truncated = true;
            std::ostringstream os;
            os << "stopped at t = " << t << ": " << e.what();
            leg.reason = os.str();
            break;
        }
    }
    return leg;
}

void record_tau_events(CurveTrajectory& traj, const std::vector<double>& sigma, bool signed_sigma) {
    for (std::size_t i = 1; i < sigma.size(); ++i) {
        const double a = sigma[i - 1];
        const double b = sigma[i];
        if (signed_sigma) {
            if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
                const double w = a / (a - b);
                traj.tau_events.push_back(traj.t[i - 1] + w * (traj.t[i] - traj.t[i - 1]));
            }
        } else if (std::abs(a) >= kTauEventFloor && std::abs(b) < kTauEventFloor) {
            traj.tau_events.push_back(traj.t[i]);
        }
    }
}

CurveTrajectory integrate(const ParametricImmersion& imm, CurveKind kind, double c,
                          std::function<double(double)> kappa, const PseudoGeodesicSpec& spec) {
    validate(imm, spec);
    const Field field(imm, kind, c, kappa);
    const TangentGeometry geom0 = tangent_geometry(imm, spec.p);
    const State start{spec.p, spec.x, spec.y};

    const Leg back = integrate_leg(imm, field, start, geom0, -spec.h, step_count(-spec.t_min, spec.h));
    const Leg fwd = integrate_leg(imm, field, start, geom0, spec.h, step_count(spec.t_max, spec.h));

    CurveTrajectory traj;
    traj.kind = kind;
    traj.c = c;
    traj.prescribed_kappa = std::move(kappa);
    traj.h = spec.h;
    const std::size_t n = back.samples.size() + 1 + fwd.samples.size();
    traj.t.reserve(n);
    traj.u.reserve(n);
    traj.T.reserve(n);
    traj.Y.reserve(n);
    traj.x.reserve(n);
    std::vector<double> sigma;
    sigma.reserve(n);
    auto push = [&](const Sample& s) {
        traj.t.push_back(s.t);
        traj.u.push_back(s.state.u);
        traj.T.push_back(s.state.T);
        traj.Y.push_back(s.state.Y);
        traj.x.push_back(s.x);
        sigma.push_back(s.sigma);
    };
    for (auto it = back.samples.rbegin(); it != back.samples.rend(); ++it) push(*it);
    traj.origin = traj.t.size();
    push({0.0, start, geom0.position, field.effective_kappa(0.0, geom0, spec.x)});
    for (const auto& s : fwd.samples) push(s);

    traj.truncated = back.truncated || fwd.truncated;
    if (back.truncated) traj.truncation = "backward: " + back.reason;
    if (fwd.truncated) traj.truncation += (traj.truncation.empty() ? "" : "; ") + ("forward: " + fwd.reason);
    traj.max_drift = std::max(back.drift, fwd.drift);
    if (kind == CurveKind::PseudoGeodesic && c != 0.0) {
        for (double& s : sigma) s /= c;
        record_tau_events(traj, sigma, codimension_in_q(imm) == 1);
    }
    return traj;
}

// Arc-length grid: solves dsigma/ds = 1/speed(sigma) with RK4 in both
// directions from sigma0. Returns sigma values for s = -nb h .. nf h.
std::vector<double> arclength_parameters(const std::function<double(double)>& speed, double sigma0, double h,
                                         std::size_t nb, std::size_t nf, std::size_t& origin) {
    auto leg = [&](double step, std::size_t count) {
        std::vector<double> out;
        double sigma = sigma0;
        for (std::size_t i = 0; i < count; ++i) {
            const double k1 = 1.0 / speed(sigma);
            const double k2 = 1.0 / speed(sigma + 0.5 * step * k1);
            const double k3 = 1.0 / speed(sigma + 0.5 * step * k2);
            const double k4 = 1.0 / speed(sigma + step * k3);
            sigma += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            out.push_back(sigma);
        }
        return out;
    };
    const std::vector<double> back = leg(-h, nb);
    const std::vector<double> fwd = leg(h, nf);
    std::vector<double> all(back.rbegin(), back.rend());
    origin = all.size();
    all.push_back(sigma0);
    all.insert(all.end(), fwd.begin(), fwd.end());
    return all;
}

// Fills Y from the differentiated tangent: Y = grad_T T / kappa where the
// curvature is resolvable, otherwise the previous Y made orthogonal to T.
void fill_curve_normals(const ParametricImmersion& imm, CurveTrajectory& traj) {
    const std::size_t n = traj.size();
    traj.Y.assign(n, ChartVec());
    std::vector<ChartVec> W(n);
    std::vector<ChartMat> g(n);
    const std::vector<ChartVec> Tdot = n >= 3 ? differentiate_uniform(traj.T, traj.h) : std::vector<ChartVec>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TangentGeometry geom = tangent_geometry(imm, traj.u[i]);
        g[i] = geom.g;
        W[i] = n >= 3 ? ChartVec(Tdot[i] + geom.christoffel(traj.T[i], traj.T[i]))
                      : ChartVec(ChartVec::Zero(traj.T[i].size()));
    }
    auto fill = [&](std::size_t i, const ChartVec* previous) {
        const double kappa = g_norm(g[i], W[i]);
        ChartVec y;
        if (kappa > 1e-8) {
            y = W[i] / kappa;
        } else if (previous != nullptr) {
            y = *previous - g_inner(g[i], *previous, traj.T[i]) * traj.T[i];
            const double norm = g_norm(g[i], y);
            y = norm > 1e-8 ? ChartVec(y / norm) : orthogonal_complement(g[i], traj.T[i]);
        } else {
            y = orthogonal_complement(g[i], traj.T[i]);
        }
        traj.Y[i] = y;
    };
    fill(traj.origin, nullptr);
    for (std::size_t i = traj.origin + 1; i < n; ++i) fill(i, &traj.Y[i - 1]);
    for (std::size_t i = traj.origin; i-- > 0;) fill(i, &traj.Y[i + 1]);
}

template <typename Sampler>
CurveTrajectory sampled_curve(const ParametricImmersion& imm, double h,
                              const std::vector<double>& sigma, std::size_t origin, Sampler&& sample) {
    if (!(h > 0.0)) throw Error(ErrorKind::ConfigInvalid, "step must be positive");
    CurveTrajectory traj;
    traj.kind = CurveKind::Sampled;
    traj.h = h;
    const std::size_t nb = origin;
    std::vector<ChartVec> u(sigma.size()), T(sigma.size());
    std::vector<AmbientVec> x(sigma.size());
    std::size_t lo = 0;
    std::size_t hi = sigma.size();
    std::string reason;
    auto run = [&](std::size_t i, const ChartVec* previous) {
        sample(sigma[i], previous, u[i], T[i], x[i]);
    };
    run(origin, nullptr);
    for (std::size_t i = origin + 1; i < sigma.size(); ++i) {
        try {
            run(i, &u[i - 1]);
        } catch (const Error& e) {
            hi = i;
            reason = std::string("forward: ") + e.what();
            break;
        }
    }
    for (std::size_t i = origin; i-- > 0;) {
        try {
            run(i, &u[i + 1]);
        } catch (const Error& e) {
            lo = i + 1;
            reason = std::string("backward: ") + e.what() + (reason.empty() ? "" : "; " + reason);
            break;
        }
    }
    traj.truncated = !reason.empty();
    traj.truncation = reason;
    for (std::size_t i = lo; i < hi; ++i) {
        traj.t.push_back((static_cast<double>(i) - static_cast<double>(nb)) * h);
        traj.u.push_back(u[i]);
        traj.T.push_back(T[i]);
        traj.x.push_back(x[i]);
    }
    traj.origin = origin - lo;
    fill_curve_normals(imm, traj);
    return traj;
}

}  // namespace

void validate(const ParametricImmersion& imm, const PseudoGeodesicSpec& spec) {
    const int m = imm.dim();
    if (spec.p.size() != m || spec.x.size() != m || spec.y.size() != m) {
        throw Error(ErrorKind::ConfigInvalid, "initial data has the wrong chart dimension");
    }
    if (!(spec.h > 0.0)) throw Error(ErrorKind::ConfigInvalid, "step must be positive");
    if (!(spec.t_min <= 0.0 && spec.t_max >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "span must contain 0");
    const TangentGeometry geom = tangent_geometry(imm, spec.p);
    const double xx = g_inner(geom.g, spec.x, spec.x);
    const double yy = g_inner(geom.g, spec.y, spec.y);
    const double xy = g_inner(geom.g, spec.x, spec.y);
    if (std::abs(xx - 1.0) > 1e-10 || std::abs(yy - 1.0) > 1e-10 || std::abs(xy) > 1e-10) {
        std::ostringstream os;
        os << "(x, y) is not g-orthonormal: <x,x> = " << xx << ", <y,y> = " << yy << ", <x,y> = " << xy;
        throw Error(ErrorKind::ConfigInvalid, os.str());
    }
}

ChartVec orthogonal_complement(const ChartMat& g, const ChartVec& x) {
    const int m = static_cast<int>(x.size());
    if (m == 1) throw Error(ErrorKind::ConfigInvalid, "a one-dimensional manifold has no normal direction");
    ChartVec best;
    double best_norm = -1.0;
    for (int k = 0; k < m; ++k) {
        ChartVec e = ChartVec::Unit(m, k);
        e -= g_inner(g, e, x) / g_inner(g, x, x) * x;
        const double norm = g_norm(g, e);
        if (norm > best_norm + 1e-12) best_norm = norm, best = e / norm;
    }
    if (m == 2 && x[0] * best[1] - x[1] * best[0] < 0.0) best = -best;
    return best;
}

PseudoGeodesicSpec make_spec(const ParametricImmersion& imm, const ChartVec& p, const ChartVec& x,
                             const ChartVec& y, double c, double t_min, double t_max, double h) {
    const TangentGeometry geom = tangent_geometry(imm, p);
    PseudoGeodesicSpec spec;
    spec.p = p;
    const double xn = g_norm(geom.g, x);
    if (!(xn > 0.0)) throw Error(ErrorKind::ConfigInvalid, "initial direction vanishes");
    spec.x = x / xn;
    if (y.size() == 0) {
        spec.y = orthogonal_complement(geom.g, spec.x);
    } else {
        ChartVec w = y - g_inner(geom.g, y, spec.x) * spec.x;
        const double wn = g_norm(geom.g, w);
        if (!(wn > 1e-12)) throw Error(ErrorKind::ConfigInvalid, "second direction is parallel to the first");
        spec.y = w / wn;
    }
    spec.c = c;
    spec.t_min = t_min;
    spec.t_max = t_max;
    spec.h = h;
    return spec;
}

double pseudo_geodesic_sigma(const TangentGeometry& geom, const ChartVec& x) {
    const int codim = geom.N() - geom.m() - (geom.level_set() ? 1 : 0);
    if (codim == 0) return 0.0;
    const AmbientVec a = geom.alpha(x, x);
    if (codim == 1) return a.dot(oriented_hypersurface_normal(geom));
    return a.norm();
}

CurveTrajectory CurveTrajectory::reversed() const {
    CurveTrajectory r = *this;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        r.t[i] = -t[j];
        r.u[i] = u[j];
        r.T[i] = -T[j];
        r.Y[i] = Y[j];
        r.x[i] = x[j];
    }
    r.origin = n - 1 - origin;
    if (prescribed_kappa) {
        auto k = prescribed_kappa;
        r.prescribed_kappa = [k](double t) { return k(-t); };
    }
    for (double& e : r.tau_events) e = -e;
    std::reverse(r.tau_events.begin(), r.tau_events.end());
    return r;
}

CurveTrajectory integrate_geodesic(const ParametricImmersion& imm, const ChartVec& p, const ChartVec& x,
                                   double t_min, double t_max, double h) {
    PseudoGeodesicSpec spec = make_spec(imm, p, x, ChartVec(), 0.0, t_min, t_max, h);
    CurveTrajectory traj = integrate(imm, CurveKind::PseudoGeodesic, 0.0, {}, spec);
    traj.kind = CurveKind::Geodesic;
    return traj;
}

CurveTrajectory integrate_planar_pseudo_geodesic(const ParametricImmersion& imm, const PseudoGeodesicSpec& spec) {
    return integrate(imm, CurveKind::PseudoGeodesic, spec.c, {}, spec);
}

CurveTrajectory integrate_planar_prescribed_kappa(const ParametricImmersion& imm, const ChartVec& p,
                                                  const ChartVec& x, const ChartVec& y,
                                                  std::function<double(double)> kappa, double t_min, double t_max,
                                                  double h) {
    PseudoGeodesicSpec spec;
    spec.p = p;
    spec.x = x;
    spec.y = y;
    spec.t_min = t_min;
    spec.t_max = t_max;
    spec.h = h;
    return integrate(imm, CurveKind::PrescribedKappa, 0.0, std::move(kappa), spec);
}

OdeResidual ode_residual(const ParametricImmersion& imm, const CurveTrajectory& traj) {
    OdeResidual r;
    const std::size_t n = traj.size();
    if (n < 2 * kStencilMargin + 1) return r;
    const std::vector<ChartVec> Tdot = differentiate_uniform(traj.T, traj.h);
    const std::vector<ChartVec> Ydot = differentiate_uniform(traj.Y, traj.h);
    const Field field(imm, traj.kind == CurveKind::Sampled ? CurveKind::Geodesic : traj.kind, traj.c,
                      traj.prescribed_kappa);
    for (std::size_t i = kStencilMargin; i + kStencilMargin < n; ++i) {
        const TangentGeometry geom = tangent_geometry(imm, traj.u[i]);
        const ChartVec W = Tdot[i] + geom.christoffel(traj.T[i], traj.T[i]);
        const ChartVec DY = Ydot[i] + geom.christoffel(traj.T[i], traj.Y[i]);
        const double k = traj.kind == CurveKind::Sampled ? g_inner(geom.g, W, traj.Y[i])
                                                         : field.effective_kappa(traj.t[i], geom, traj.T[i]);
        r.acceleration = std::max(r.acceleration, g_norm(geom.g, W - k * traj.Y[i]));
        r.frame = std::max(r.frame, g_norm(geom.g, DY + k * traj.T[i]));
    }
    return r;
}

ChartVec invert_chart(const ParametricImmersion& imm, const AmbientVec& target, ChartVec guess) {
    for (int iter = 0; iter < 60; ++iter) {
        const Jet jet = imm.jet(guess, 1);
        const AmbientVec r = target - jet.position;
        const ChartMat g = jet.first.transpose() * jet.first;
        const ChartVec delta = g.llt().solve(jet.first.transpose() * r);
        guess += delta;
        if (delta.norm() <= 1e-15 * (1.0 + guess.norm())) break;
    }
    imm.jet(guess, 0);  // domain check on the final point
    return guess;
}

CurveTrajectory trajectory_from_chart_curve(const ParametricImmersion& imm,
                                            const std::function<ChartVec(double)>& curve,
                                            const std::function<ChartVec(double)>& derivative, double sigma0,
                                            double t_min, double t_max, double h) {
    auto speed = [&](double sigma) {
        const Jet jet = imm.jet(curve(sigma), 1);
        return (jet.first * derivative(sigma)).norm();
    };
    std::size_t origin = 0;
    std::vector<double> sigma;
    // speed evaluations outside the chart give NaN, which truncates the
    // sampled curve at that point
    sigma = arclength_parameters(
        [&](double s) {
            try {
                return speed(s);
            } catch (const Error&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        },
        sigma0, h, step_count(-t_min, h), step_count(t_max, h), origin);
    return sampled_curve(imm, h, sigma, origin,
                         [&](double s, const ChartVec*, ChartVec& u, ChartVec& T, AmbientVec& x) {
                             if (!std::isfinite(s)) throw Error(ErrorKind::DomainExceeded, "curve left the chart");
                             u = curve(s);
                             const TangentGeometry geom = tangent_geometry(imm, u);
                             const ChartVec d = derivative(s);
                             T = d / g_norm(geom.g, d);
                             x = geom.position;
                         });
}

CurveTrajectory trajectory_from_ambient_curve(const ParametricImmersion& imm,
                                              const std::function<AmbientVec(double)>& curve,
                                              const std::function<AmbientVec(double)>& derivative,
                                              double sigma0, const ChartVec& u_guess, double t_min, double t_max,
                                              double h) {
    std::size_t origin = 0;
    const std::vector<double> sigma = arclength_parameters([&](double s) { return derivative(s).norm(); }, sigma0,
                                                           h, step_count(-t_min, h), step_count(t_max, h), origin);
    return sampled_curve(imm, h, sigma, origin,
                         [&](double s, const ChartVec* previous, ChartVec& u, ChartVec& T, AmbientVec& x) {
                             u = invert_chart(imm, curve(s), previous ? *previous : u_guess);
                             const TangentGeometry geom = tangent_geometry(imm, u);
                             const AmbientVec d = derivative(s);
                             T = geom.tangent_components(d / d.norm());
                             T /= g_norm(geom.g, T);
                             x = geom.position;
                         });
}

}  // namespace umbilic
