#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "soliton_lab/evolve.hpp"
#include "soliton_lab/modulation.hpp"
#include "soliton_lab/projections.hpp"

namespace soliton_lab {

// ----------------------------------------------------------- dichotomy ODE

// x1' = sigma x1 + f1, x2' = -sigma x2 + f2 with sigma >= sigma_0 > 0.
struct HypSystem {
    std::function<double(double)> sigma, f1, f2;
    double x2_0 = 0.0;
    double horizon = 20.0;  // the backward integral for x1 is cut here
    double dt = 0.01;       // output grid
};

// Piecewise-linear samples as a HypSystem.
inline HypSystem hyp_from_samples(std::vector<double> t, std::vector<double> sigma, std::vector<double> f1,
                                  std::vector<double> f2, double x2_0 = 0.0) {
    require(t.size() >= 2 && sigma.size() == t.size() && f1.size() == t.size() && f2.size() == t.size(),
            "hyp_from_samples: sample arrays must match");
    auto interp = [t](std::vector<double> y) {
        return [t, y = std::move(y)](double s) {
            if (s <= t.front()) return y.front();
            if (s >= t.back()) return y.back();
            std::size_t i = std::upper_bound(t.begin(), t.end(), s) - t.begin() - 1;
            double w = (s - t[i]) / (t[i + 1] - t[i]);
            return (1 - w) * y[i] + w * y[i + 1];
        };
    };
    HypSystem sys;
    sys.sigma = interp(std::move(sigma));
    sys.f1 = interp(std::move(f1));
    sys.f2 = interp(std::move(f2));
    sys.x2_0 = x2_0;
    sys.horizon = t.back() - t.front();
    sys.dt = sys.horizon / double(t.size() - 1);
    return sys;
}

struct HypSolution {
    std::vector<double> t, x1, x2;
    double x1_required_initial = 0.0;
};

// The bounded solution: x1(t) = -int_t^inf e^{-int_t^s sigma} f1(s) ds and
// x2(t) = e^{-int_0^t sigma} x2(0) + int_0^t e^{-int_s^t sigma} f2(s) ds, by
// 20-point Gauss-Legendre on each output cell (nested for the exponent).
inline HypSolution solve_hyp_bounded(const HypSystem& sys) {
    require(sys.sigma && sys.f1 && sys.f2, "solve_hyp_bounded: sigma, f1 and f2 are required");
    require(sys.horizon > 0 && sys.dt > 0, "solve_hyp_bounded: horizon and dt must be positive");
    using GL = boost::math::quadrature::gauss<double, 20>;
    const int n = int(std::llround(sys.horizon / sys.dt));
    const double h = sys.horizon / n;
    HypSolution out;
    out.t.resize(n + 1);
    for (int k = 0; k <= n; ++k) out.t[k] = k * h;
    for (double t : out.t)
        if (!(sys.sigma(t) > 0)) throw InvalidArgument("solve_hyp_bounded: sigma must stay positive");
    auto S = [&](double a, double b) { return GL::integrate(sys.sigma, a, b); };
    std::vector<double> cell(n);
    for (int k = 0; k < n; ++k) cell[k] = S(out.t[k], out.t[k + 1]);

    out.x1.assign(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        const double a = out.t[k];
        double local = GL::integrate([&](double s) { return std::exp(-S(a, s)) * sys.f1(s); }, a, out.t[k + 1]);
        out.x1[k] = std::exp(-cell[k]) * out.x1[k + 1] - local;
    }
    out.x1_required_initial = out.x1[0];

    out.x2.assign(n + 1, sys.x2_0);
    for (int k = 0; k < n; ++k) {
        const double b = out.t[k + 1];
        double local = GL::integrate([&](double s) { return std::exp(-S(s, b)) * sys.f2(s); }, out.t[k], b);
        out.x2[k + 1] = std::exp(-cell[k]) * out.x2[k] + local;
    }
    return out;
}

// --------------------------------------------------------------- shooting

enum class ShootMode { Nonlinear, Linearized };

struct ShootOptions {
    double T = 2.0;
    double dt = 2e-4;
    double observe_dt = 5e-3;
    ShootMode mode = ShootMode::Nonlinear;  // Linearized: unforced flow of H around the moving W0
    double threshold = 1e-6;        // accept |b(T)| < threshold * ||R0||
    int max_iterations = 60;
    double bracket = 0.0;           // initial half-width; 0 picks 4 ||R0||^2 + 1e-9
    double escape = 1e-2;           // stop a shot once |b| > escape * ||W0||
};

// Everything fixed across the shots of one problem: the soliton W0, the
// data R0 (no F- component), and the alpha = 1 eigenpair.
struct ShootProblem {
    ChannelGrid grid{ChannelGrid::radial(RadialGrid{})};
    GroundState gs;
    ImaginaryPair unit;
    SolitonParams pi0;
    PairField R0;
    PairField W0;
    SpectralFrame frame0;
};

inline ShootProblem make_shoot_problem(const PairField& R0, const SolitonParams& pi0, const GroundState& gs,
                                       const ChannelGrid& cg, const ImaginaryPair& unit) {
    require(cg.channels() == 1 && cg.ell(0) == 0, "shooting runs on a single s-wave channel");
    require(pi0.is_standing(), "shooting needs a standing soliton");
    ShootProblem p;
    p.grid = cg;
    p.gs = gs;
    p.unit = unit;
    p.pi0 = pi0;
    p.R0 = R0;
    p.W0 = make_soliton(pi0, gs, cg);
    p.frame0 = spectral_frame(pi0, gs, cg, unit);
    return p;
}

// epsilon * Pc of a normalized s-wave bump r e^{-(r - center)^2 / width^2}
// (1 + i tilt): shooting data with no F+- or zero-mode content.
struct Perturbation {
    double epsilon = 1e-3;
    double center = 1.0;
    double width = 1.0;
    double tilt = 0.3;
};

inline PairField continuous_perturbation(const Perturbation& q, const SpectralFrame& fr, const ChannelGrid& cg) {
    require(q.width > 0, "continuous_perturbation: width must be positive");
    Field g = cg.from_profile(0, [&](double r) { return std::exp(-sq((r - q.center) / q.width)) * cplx(1, q.tilt); });
    PairField bump = conj_pair(g);
    bump *= 1.0 / l2_norm(bump);
    return q.epsilon * ProjectionSet(fr).apply(Projection::Continuous, bump);
}

// F+-(W(alpha, theta)) and the unstable coefficient c(alpha) <R, i s3 F+>.
struct UnstableMode {
    double sigma = 0.0, c = 0.0, c_stable = 0.0;
    PairField f_plus, f_minus;
};

inline UnstableMode unstable_mode(const ShootProblem& p, double alpha, double theta) {
    SpectralFrame fr;
    fr.params = SolitonParams{alpha, theta};
    attach_pair(fr, p.unit, p.grid);
    const double a3 = std::pow(alpha, 3);
    return {fr.sigma, 1.0 / (a3 * fr.kappa_minus), 1.0 / (a3 * fr.kappa_plus), fr.f_plus, fr.f_minus};
}

inline double unstable_coefficient(const UnstableMode& m, const PairField& R) {
    return (m.c * inner(R, i_sigma3(m.f_plus))).real();
}

// Coefficient along the decaying direction F+.
inline double stable_coefficient(const UnstableMode& m, const PairField& R) {
    return (m.c_stable * inner(R, i_sigma3(m.f_minus))).real();
}

struct ShotSample {
    double t = 0.0;
    SolitonParams pi;  // nearest static soliton (Gamma is the full phase)
    double b = 0.0;
    double b_stable = 0.0;
    double r_half = 0.0;  // ||R||_{H^{1/2}}
};

struct Shot {
    double h = 0.0;
    std::vector<ShotSample> samples;
    std::vector<PairField> R;  // kept when recording
    bool escaped = false;
    double b_final = 0.0;
};

inline Shot run_shot(const ShootProblem& p, double h, const ShootOptions& opt, bool record, bool allow_escape = true) {
    const auto& cg = p.grid;
    Shot shot;
    shot.h = h;
    const int every = std::max(1, int(std::lround(opt.observe_dt / opt.dt)));
    const double wn = std::sqrt(p.frame0.norm2);
    SolitonParams seed = p.pi0;
    double t_prev = 0.0;

    auto observe = [&](double t, const PairField& R, const SolitonParams& pi) {
        UnstableMode m = unstable_mode(p, pi.alpha, pi.gamma);
        double b = unstable_coefficient(m, R);
        shot.samples.push_back({t, pi, b, record ? stable_coefficient(m, R) : 0.0,
                                 record ? sobolev_norm(R, 0.5, cg) : 0.0});
        if (record) shot.R.push_back(R);
        shot.b_final = b;
        if (allow_escape && std::abs(b) > opt.escape * wn) {
            shot.escaped = true;
            return false;
        }
        return true;
    };

    PairField start = p.R0;
    start.axpy(h, p.frame0.f_minus);
    if (opt.mode == ShootMode::Nonlinear) {
        EvolutionConfig cfg;
        cfg.dt = opt.dt;
        cfg.t_end = opt.T;
        cfg.scheme = Scheme::IntegratingFactorRK4;
        cfg.observe_every = every;
        cfg.blowup_ceiling = 1e6;
        Field psi = p.W0.upper + start.upper;
        evolve_nls(psi, cg, cfg, [&](double t, const Field& f) {
            seed.gamma += (t - t_prev) * sq(seed.alpha);
            t_prev = t;
            ProjectionOptions po;
            po.capture_fraction = 1.0;
            ModulationState st = project_to_manifold(conj_pair(f), seed, p.gs, cg, po);
            seed = st.pi;
            return observe(t, st.R, st.pi);
        });
    } else {
        ModulationPath path = ModulationPath::constant(p.pi0, opt.T);
        EvolutionConfig cfg;
        cfg.dt = opt.dt;
        cfg.t_end = opt.T;
        cfg.observe_every = every;
        evolve_linearized(start, path, p.gs, cg, Forcing{}, cfg,
                          [&](double t, const PairField& R) { return observe(t, R, path.effective(t)); });
    }
    return shot;
}


struct ShootResult {
    double h_star = 0.0;
    double lo = 0.0, hi = 0.0;  // final bracket
    double b_final = 0.0;       // b(T) on the recorded run at h_star
    double target = 0.0;        // threshold * ||R0||
    bool converged = false;
    int shots = 0;
    std::vector<std::pair<double, double>> indicator;  // (h, extrapolated b(T))
    Shot trajectory;                                   // recorded, never stopped early
};

// Signed growth indicator: b(T), or b(t_e) e^{sigma (T - t_e)} for a shot
// stopped at t_e, which keeps the indicator roughly linear in h.
inline double growth_indicator(const Shot& s, double T, double sigma) {
    if (s.samples.empty()) return 0.0;
    const auto& last = s.samples.back();
    if (!s.escaped) return last.b;
    return last.b * std::exp(std::min(700.0, sigma * (T - last.t)));
}

// Bracketed TOMS748 search for the h that keeps b(T) small. Bracket
// [lo, hi] is widened by doubling until the indicator changes sign.
inline ShootResult shoot_h(const ShootProblem& p, const ShootOptions& opt, std::optional<std::pair<double, double>> bracket = {}) {
    ShootResult res;
    const double r0 = l2_norm(p.R0);
    // below ~1e-10 ||W|| the indicator is roundoff amplified by e^{sigma T}
    res.target = std::max(opt.threshold * r0, 1e-10 * std::sqrt(p.frame0.norm2));
    auto indicator = [&](double h) {
        Shot s = run_shot(p, h, opt, false);
        ++res.shots;
        double v = growth_indicator(s, opt.T, p.unit.sigma * sq(p.pi0.alpha));
        res.indicator.emplace_back(h, v);
        return v;
    };
    double lo, hi;
    if (bracket) {
        std::tie(lo, hi) = *bracket;
    } else {
        double w = opt.bracket > 0 ? opt.bracket : 4 * r0 * r0 + 1e-9;
        lo = -w;
        hi = w;
    }
    double flo = indicator(lo), fhi = indicator(hi);
    for (int k = 0; !bracket && flo * fhi > 0 && k < 30; ++k) {
        double w = 2 * (hi - lo);
        lo = -w;
        hi = w;
        flo = indicator(lo);
        fhi = indicator(hi);
    }
    if (flo * fhi > 0)
        throw NoSignChange("shoot_h: growth indicator keeps one sign on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");

    double found = std::numeric_limits<double>::quiet_NaN();
    auto f = [&](double h) {
        double v = indicator(h);
        if (std::abs(v) < res.target) {
            found = h;
            return 0.0;
        }
        return v;
    };
    std::uintmax_t iters = std::max(1, opt.max_iterations);
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(std::abs(a), std::abs(b)); };
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    res.lo = a;
    res.hi = b;
    res.h_star = std::isnan(found) ? 0.5 * (a + b) : found;
    res.trajectory = run_shot(p, res.h_star, opt, true, false);
    res.b_final = res.trajectory.b_final;
    res.converged = std::abs(res.b_final) < res.target;
    return res;
}

// Per-sample terms along a recorded trajectory. With G = i s3 F+(W_pi) and
// c = 1 / (alpha^3 kappa_-) the unstable coefficient obeys b' = sigma b + N_u,
//   N_u = c [-i <F, G> + <R, (d_pi G) pidot>] + c' <R, G>,
// F = -(N, -conj N) - i (d_pi W) pidot. The Duhamel source is F - V_pi R.
struct TrajectoryTerms {
    std::vector<double> t, sigma, forcing;
    std::vector<std::array<double, 8>> rates;
    std::vector<PairField> source;
};

inline PairField potential_action(const PairField& W, const PairField& R, const ChannelGrid& cg) {
    MatrixPotential V = soliton_potential(soliton_values(W, cg));
    std::span<const double> a(V.a);
    PairField out{pointwise(a, R.upper, cg), -1.0 * pointwise(a, R.lower, cg)};
    out.upper += pointwise(std::span<const cplx>(V.b), R.lower, cg);
    out.lower += pointwise(std::span<const cplx>(V.c), R.upper, cg);
    return out;
}

inline TrajectoryTerms trajectory_terms(const ShootProblem& p, const Shot& shot) {
    require(shot.R.size() == shot.samples.size() && !shot.R.empty(),
            "trajectory_terms: the shot must be recorded");
    const auto& cg = p.grid;
    TrajectoryTerms out;
    for (std::size_t i = 0; i < shot.samples.size(); ++i) {
        const auto& smp = shot.samples[i];
        const auto& R = shot.R[i];
        ModulationState st;
        st.pi = smp.pi;
        st.R = R;
        auto rate = modulation_rhs(st, p.gs, cg);
        const double al = smp.pi.alpha, da = rate[kAlpha], dg = rate[kGamma];

        PairField W = make_soliton(smp.pi, p.gs, cg);
        SpectralFrame fr = tangent_frame(smp.pi, p.gs, cg);
        PairField F = -1.0 * nonlinear_pair(W, R, cg);
        F.axpy(-I * da, fr.tangent[kAlpha]);
        F.axpy(-I * dg, fr.tangent[kGamma]);

        UnstableMode m = unstable_mode(p, al, smp.pi.gamma);
        PairField G = i_sigma3(m.f_plus);
        const double ha = 1e-5 * al;
        PairField dGa = (0.5 / ha) * (i_sigma3(unstable_mode(p, al + ha, smp.pi.gamma).f_plus) -
                                      i_sigma3(unstable_mode(p, al - ha, smp.pi.gamma).f_plus));
        PairField dG = dg * i_sigma3(G) + da * dGa;
        const double cdot = -3.0 * da / al * m.c;
        double nu = (m.c * (-I * inner(F, G) + inner(R, dG)) + cdot * inner(R, G)).real();

        out.t.push_back(smp.t);
        out.sigma.push_back(m.sigma);
        out.forcing.push_back(nu);
        out.rates.push_back(rate);
        out.source.push_back(F - potential_action(W, R, cg));
    }
    return out;
}

// h = -int_0^T e^{-int_0^t sigma} N_u dt (trapezoid on the samples).
inline double h_explicit(const TrajectoryTerms& u, double T) {
    double h = 0.0, S = 0.0;
    for (std::size_t i = 1; i < u.t.size() && u.t[i] <= T + 1e-12; ++i) {
        const double dt = u.t[i] - u.t[i - 1];
        const double S1 = S + 0.5 * dt * (u.sigma[i] + u.sigma[i - 1]);
        h -= 0.5 * dt * (std::exp(-S) * u.forcing[i - 1] + std::exp(-S1) * u.forcing[i]);
        S = S1;
    }
    return h;
}

// Free profile r_free = R(0) - i int_0^T e^{-is Delta s3} (F - V_pi R) ds
// (trapezoid on the samples) and defect(t) = ||R(t) - e^{it Delta s3} r_free||
// in H^{1/2}. On a finite window the defect at T only measures quadrature
// error; the trend before T is the diagnostic.
struct ScatteringCheck {
    PairField r_free;
    std::vector<double> t, defect;
};

inline ScatteringCheck scattering_check(const std::vector<double>& t, const std::vector<PairField>& R,
                                        const std::vector<PairField>& source, const ChannelGrid& cg) {
    require(!t.empty() && R.size() == t.size() && source.size() == t.size(),
            "scattering_check: mismatched trajectory");
    ScatteringCheck out;
    out.r_free = R.front();
    auto pulled = [&](std::size_t i) { return free_pair_flow(source[i], cg, -t[i]); };
    PairField prev = pulled(0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        PairField cur = pulled(i);
        out.r_free.axpy(-0.5 * I * (t[i] - t[i - 1]), prev + cur);
        prev = std::move(cur);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        out.t.push_back(t[i]);
        out.defect.push_back(sobolev_norm(R[i] - free_pair_flow(out.r_free, cg, t[i]), 0.5, cg));
    }
    return out;
}

inline ScatteringCheck scattering_check(const Shot& shot, const TrajectoryTerms& terms, const ChannelGrid& cg) {
    std::vector<double> t;
    for (const auto& s : shot.samples) t.push_back(s.t);
    return scattering_check(t, shot.R, terms.source, cg);
}

// Least-squares slope of log|y| against t on [t0, t1].
inline double growth_rate(std::span<const double> t, std::span<const double> y, double t0, double t1) {
    std::vector<double> x, ly;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t0 && t[i] <= t1 && y[i] != 0.0) {
            x.push_back(t[i]);
            ly.push_back(std::log(std::abs(y[i])));
        }
    require(x.size() >= 2, "growth_rate: fewer than two samples in the window");
    return fit_slope(x, ly);
}

}  // namespace soliton_lab
