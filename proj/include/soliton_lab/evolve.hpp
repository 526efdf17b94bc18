#pragma once

#include "soliton_lab/linop.hpp"

namespace soliton_lab {

enum class Scheme { StrangSplit, IntegratingFactorRK4, RK4Linearized };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::StrangSplit: return "strang-split";
        case Scheme::IntegratingFactorRK4: return "if-rk4";
        case Scheme::RK4Linearized: return "rk4-linearized";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "strang-split") return Scheme::StrangSplit;
    if (s == "if-rk4") return Scheme::IntegratingFactorRK4;
    if (s == "rk4-linearized") return Scheme::RK4Linearized;
    throw InvalidArgument("unknown scheme '" + s + "'");
}

struct EvolutionConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::StrangSplit;
    double absorb_width = 0.0;      // absorbing layer width; 0 = off
    double absorb_strength = 5.0;
    double blowup_ceiling = 1e3;    // sup |psi| that aborts the run
    int observe_every = 1;          // observer cadence in steps
};

// ------------------------------------------------------------ backends

// |psi|^2 at the potential sample points.
inline std::vector<double> density(const Field& f, const CartGrid&) {
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) d[i] = std::norm(f[i]);
    return d;
}

inline void require_s_wave(const ChannelGrid& cg) {
    require(cg.channels() == 1 && cg.ell(0) == 0, "nonlinear radial evolution needs a single s-wave channel");
}

inline std::vector<double> density(const Field& f, const ChannelGrid& cg) {
    require_s_wave(cg);
    const auto& rg = cg.radial_grid();
    std::vector<double> d(cg.n_r());
    for (int i = 0; i < cg.n_r(); ++i) d[i] = std::norm(f[i] * Y00 / rg.node(i));
    return d;
}

// e^{i tau Delta} f
inline Field free_step(const Field& f, const CartGrid& g, double tau) { return free_propagate(f, g, tau); }

inline Field free_step(Field f, const ChannelGrid& cg, double tau) {
    const auto& rg = cg.radial_grid();
    for (int c = 0; c < cg.channels(); ++c) {
        auto u = cg.channel(f, c);
        const int ell = cg.ell(c);
        if (ell == 0) {
            RadialSpectral(rg, true).apply(u, [tau](double k) { return std::exp(-I * tau * k * k); });
        } else {
            const auto& es = kinetic_eigen(rg, ell);
            Eigen::Map<Eigen::VectorXcd> v(u.data(), u.size());
            Eigen::VectorXcd c1 = es.eigenvectors().transpose() * v;
            for (Eigen::Index k = 0; k < c1.size(); ++k) c1(k) *= std::exp(-I * tau * es.eigenvalues()(k));
            v = es.eigenvectors() * c1;
        }
    }
    return f;
}

inline double max_wavenumber_sq(const CartGrid& g) { return 3 * sq(g.k_max()); }
inline double max_wavenumber_sq(const ChannelGrid& cg) { return sq(pi / cg.cell()); }

// Absorbing mask exp(-strength * dt * s(x)), s rising quadratically across
// the outer layer.
inline std::vector<double> absorbing_mask(const CartGrid& g, double width, double rate) {
    std::vector<double> m(g.size(), 1.0);
    const double edge = 0.5 * g.box_length() - width;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.point(i);
        double d = std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
        if (d > edge) m[i] = std::exp(-rate * sq((d - edge) / width));
    }
    return m;
}
inline std::vector<double> absorbing_mask(const ChannelGrid& cg, double width, double rate) {
    const auto& rg = cg.radial_grid();
    std::vector<double> m(cg.n_r(), 1.0);
    const double edge = rg.r_max() - width;
    for (int i = 0; i < cg.n_r(); ++i)
        if (rg.node(i) > edge) m[i] = std::exp(-rate * sq((rg.node(i) - edge) / width));
    return m;
}

// ------------------------------------------------------------ invariants

struct Invariants {
    double mass = 0.0;
    double energy = 0.0;
    Vec3 momentum{0, 0, 0};
};

// M = int |psi|^2, E = int |grad psi|^2 / 2 - |psi|^4 / 4, P = Im int conj(psi) grad psi
inline Invariants invariants(const Field& f, const CartGrid& g) {
    Invariants iv;
    iv.mass = sq(l2_norm(f));
    double kin = 0, pot = 0;
    for (int k = 0; k < 3; ++k) {
        Field d = spectral_derivative(f, g, k);
        kin += sq(l2_norm(d));
        iv.momentum[k] = inner(d, f).imag();
    }
    for (std::size_t i = 0; i < f.size(); ++i) pot += sq(std::norm(f[i]));
    iv.energy = 0.5 * kin - 0.25 * pot * g.cell();
    return iv;
}

inline Invariants invariants(const Field& f, const ChannelGrid& cg) {
    require_s_wave(cg);
    Invariants iv;
    iv.mass = sq(l2_norm(f));
    double kin = sq(sobolev_norm(f, 1.0, cg));
    auto d = density(f, cg);
    double pot = 0;
    const auto& rg = cg.radial_grid();
    for (int i = 0; i < cg.n_r(); ++i) pot += 4 * pi * sq(d[i]) * sq(rg.node(i)) * rg.spacing();
    iv.energy = 0.5 * kin - 0.25 * pot;
    return iv;
}

struct Diagnostics {
    std::vector<double> t, mass, energy, sup;
    std::vector<Vec3> momentum;

    template <class Grid>
    void record(double time, const Field& f, const Grid& g) {
        Invariants iv = invariants(f, g);
        t.push_back(time);
        mass.push_back(iv.mass);
        energy.push_back(iv.energy);
        momentum.push_back(iv.momentum);
        auto d = density(f, g);
        sup.push_back(std::sqrt(*std::max_element(d.begin(), d.end())));
    }
};

// ---------------------------------------------------------------- NLS

template <class Grid>
double sup_norm_density(const Field& f, const Grid& g) {
    auto d = density(f, g);
    double m = 0;
    for (double x : d) m = std::max(m, x);
    return std::sqrt(m);
}


// i psi_t + Delta psi + |psi|^2 psi = 0.
// Observer(t, psi) runs at t = 0, every observe_every steps and at t_end;
// returning false stops the run early.
template <class Grid, class Observer>
Field evolve_nls(Field psi, const Grid& g, const EvolutionConfig& cfg, Observer&& obs) {
    require(cfg.dt > 0 && cfg.t_end >= 0, "evolve_nls: need dt > 0 and t_end >= 0");
    require(cfg.scheme != Scheme::RK4Linearized, "evolve_nls: rk4-linearized is for the linearized equation");
    require(psi.size() == g.zeros().size(), "evolve_nls: field does not match grid");
    const int steps = int(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    const double dt = steps > 0 ? cfg.t_end / steps : 0.0;
    std::vector<double> mask;
    if (cfg.absorb_width > 0) mask = absorbing_mask(g, cfg.absorb_width, cfg.absorb_strength * dt);

    auto phase = [&](Field& f, double tau) {
        auto d = density(f, g);
        std::vector<cplx> e(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) e[i] = std::exp(I * tau * d[i]);
        f = pointwise(std::span<const cplx>(e), std::move(f), g);
    };
    auto nonlinear = [&](const Field& f) {  // i |psi|^2 psi
        auto d = density(f, g);
        std::vector<cplx> e(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) e[i] = I * d[i];
        return pointwise(std::span<const cplx>(e), f, g);
    };

    if (!obs(0.0, static_cast<const Field&>(psi))) return psi;
    for (int s = 1; s <= steps; ++s) {
        if (cfg.scheme == Scheme::StrangSplit) {
            phase(psi, 0.5 * dt);
            psi = free_step(psi, g, dt);
            phase(psi, 0.5 * dt);
        } else {
            // Lawson RK4 in the interaction picture of e^{i t Delta}
            Field a = dt * nonlinear(psi);
            Field Ep = free_step(psi, g, 0.5 * dt);
            Field b = dt * nonlinear(free_step(psi + 0.5 * a, g, 0.5 * dt));
            Field c = dt * nonlinear(Ep + 0.5 * b);
            Field d = dt * nonlinear(free_step(psi, g, dt) + free_step(c, g, 0.5 * dt));
            Field acc = free_step(a, g, dt);
            acc.axpy(2.0, free_step(b + c, g, 0.5 * dt));
            acc += d;
            psi = free_step(psi, g, dt);
            psi.axpy(1.0 / 6.0, acc);
        }
        if (!mask.empty()) psi = pointwise(std::span<const double>(mask), std::move(psi), g);
        const double peak = sup_norm_density(psi, g);
        if (!std::isfinite(peak) || peak > cfg.blowup_ceiling)
            throw BlowupDetected("evolve_nls: sup |psi| = " + std::to_string(peak) + " at t = " + std::to_string(s * dt));
        if (s % cfg.observe_every == 0 || s == steps)
            if (!obs(s * dt, static_cast<const Field&>(psi))) break;
    }
    return psi;
}

struct NlsRun {
    Field final;
    Diagnostics diag;
    std::vector<double> snapshot_times;
    std::vector<Field> snapshots;
};

// Run with diagnostics at the observer cadence; snapshot_every > 0 keeps
// fields every that many observations.
template <class Grid>
NlsRun evolve_nls(const Field& psi0, const Grid& g, const EvolutionConfig& cfg, int snapshot_every = 0) {
    NlsRun run;
    int k = 0;
    run.final = evolve_nls(psi0, g, cfg, [&](double t, const Field& f) {
        run.diag.record(t, f, g);
        if (snapshot_every > 0 && k % snapshot_every == 0) {
            run.snapshot_times.push_back(t);
            run.snapshots.push_back(f);
        }
        ++k;
        return true;
    });
    return run;
}

// ---------------------------------------------------------- linearized

// i dR/dt + H_pi(t) R = F(t), advanced as dR/dt = i (H_pi(t) R - F(t)) by
// classical RK4. Forcing(t) -> PairField may be empty.
using Forcing = std::function<PairField(double)>;

inline double rk4_stable_dt(double spacing) { return 0.9 * spacing * spacing / pi; }

template <class Grid, class Observer>
PairField evolve_linearized(PairField R, const ModulationPath& path, const GroundState& gs, const Grid& g,
                            const Forcing& forcing, const EvolutionConfig& cfg, Observer&& obs,
                            bool free_only = false) {
    require(cfg.dt > 0 && cfg.t_end >= 0, "evolve_linearized: need dt > 0 and t_end >= 0");
    // RK4 covers |z| <= 2.82 on the imaginary axis.
    if (cfg.dt * max_wavenumber_sq(g) > 2.8)
        throw StabilityViolation("evolve_linearized: dt * max |k|^2 = " +
                                 std::to_string(cfg.dt * max_wavenumber_sq(g)) + " exceeds the RK4 budget 2.8");
    const double t0 = path.t_begin();
    const int steps = int(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    const double dt = steps > 0 ? cfg.t_end / steps : 0.0;
    auto rhs = [&](double t, const PairField& r) {
        MatrixOperator H = free_only ? build_free(0.0, g) : build_time_dependent(path, t, gs, g);
        PairField out = H.apply(r);
        if (forcing) out -= forcing(t);
        return I * out;
    };
    if (!obs(t0, static_cast<const PairField&>(R))) return R;
    for (int s = 1; s <= steps; ++s) {
        const double t = t0 + (s - 1) * dt;
        PairField k1 = rhs(t, R);
        PairField k2 = rhs(t + 0.5 * dt, R + (0.5 * dt) * k1);
        PairField k3 = rhs(t + 0.5 * dt, R + (0.5 * dt) * k2);
        PairField k4 = rhs(t + dt, R + dt * k3);
        R.axpy(dt / 6.0, k1);
        R.axpy(dt / 3.0, k2);
        R.axpy(dt / 3.0, k3);
        R.axpy(dt / 6.0, k4);
        if (!is_finite(R.upper) || !is_finite(R.lower))
            throw StabilityViolation("evolve_linearized: non-finite state at t = " + std::to_string(t + dt));
        if (s % cfg.observe_every == 0 || s == steps)
            if (!obs(t0 + s * dt, static_cast<const PairField&>(R))) break;
    }
    return R;
}

// e^{i t Delta s3} applied to a pair (exact free linearized flow).
template <class Grid>
PairField free_pair_flow(const PairField& R, const Grid& g, double t) {
    return {free_step(R.upper, g, t), free_step(R.lower, g, -t)};
}

// ------------------------------------------------------------- ledgers

// L^6 norm by quadrature.
inline double l6_norm(const Field& f, const CartGrid& g) {
    double s = 0;
    for (const auto& z : f) s += std::pow(std::norm(z), 3);
    return std::pow(s * g.cell(), 1.0 / 6.0);
}
inline double l6_norm(const Field& f, const ChannelGrid& cg) {
    const auto& rg = cg.radial_grid();
    double s = 0;
    for (int c = 0; c < cg.channels(); ++c) {
        require(cg.ell(c) == 0, "l6_norm: radial layouts with s-waves only");
        auto u = cg.channel(f, c);
        for (int i = 0; i < cg.n_r(); ++i)
            s += 4 * pi * std::pow(std::norm(u[i] * Y00 / rg.node(i)), 3) * sq(rg.node(i)) * rg.spacing();
    }
    return std::pow(s, 1.0 / 6.0);
}

inline Field fractional_half(const Field& f, const CartGrid& g) { return fractional_gradient(f, g, 0.5); }
inline Field fractional_half(const Field& f, const ChannelGrid& cg) { return cg.fractional(f, 0.5); }

// Running sup_t ||r||_{H^{1/2}} and (int ||r||_{W^{1/2,6}}^2 dt)^{1/2}
// (trapezoid in t), from the upper component.
struct StrichartzLedger {
    std::vector<double> t, h_half, w_half_6, sup_h_half, l2t_w_half_6;
};

template <class Grid>
StrichartzLedger strichartz_ledger(const std::vector<double>& times, const std::vector<PairField>& traj,
                                   const Grid& g) {
    require(times.size() == traj.size(), "strichartz_ledger: times and trajectory differ in length");
    StrichartzLedger L;
    double sup = 0, acc = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        double hh = sobolev_norm(traj[i].upper, 0.5, g);
        double w6 = l6_norm(fractional_half(traj[i].upper, g), g);
        if (i > 0) acc += 0.5 * (times[i] - times[i - 1]) * (sq(w6) + sq(L.w_half_6.back()));
        sup = std::max(sup, hh);
        L.t.push_back(times[i]);
        L.h_half.push_back(hh);
        L.w_half_6.push_back(w6);
        L.sup_h_half.push_back(sup);
        L.l2t_w_half_6.push_back(std::sqrt(acc));
    }
    return L;
}

}  // namespace soliton_lab
