#pragma once

#include <boost/numeric/odeint.hpp>

#include "soliton_lab/radial.hpp"

namespace soliton_lab {

// Radial function sampled on a uniform mesh up to r_c, with an exponential
// tail A e^{-kappa r}/r beyond. Values come with first and second
// derivatives so that evaluation uses quintic Hermite interpolation.
class RadialProfile {
public:
    RadialProfile() = default;
    RadialProfile(double dr, std::vector<double> f, std::vector<double> df, std::vector<double> d2f,
                  double kappa)
        : dr_(dr), f_(std::move(f)), df_(std::move(df)), d2f_(std::move(d2f)), kappa_(kappa) {
        require(f_.size() >= 2 && f_.size() == df_.size() && f_.size() == d2f_.size(),
                "RadialProfile: inconsistent samples");
        double rc = r_c();
        amp_ = f_.back() * rc * std::exp(kappa_ * rc);
    }

    double r_c() const { return dr_ * double(f_.size() - 1); }
    double spacing() const { return dr_; }
    double kappa() const { return kappa_; }
    double tail_amplitude() const { return amp_; }
    const std::vector<double>& samples() const { return f_; }
    const std::vector<double>& derivative_samples() const { return df_; }

    double operator()(double r) const { return eval(r, 0); }
    double derivative(double r) const { return eval(r, 1); }

    // Relative mismatch of the tail slope at the splice point.
    double splice_mismatch() const {
        double rc = r_c();
        double tail_d = -amp_ * std::exp(-kappa_ * rc) * (kappa_ * rc + 1) / (rc * rc);
        return std::abs(tail_d - df_.back()) / std::abs(df_.back());
    }

    // Profile of s*f(s r): the scaling map of the ground-state family.
    RadialProfile scaled(double s) const {
        RadialProfile p = *this;
        p.dr_ = dr_ / s;
        for (auto& x : p.f_) x *= s;
        for (auto& x : p.df_) x *= s * s;
        for (auto& x : p.d2f_) x *= s * s * s;
        p.kappa_ = kappa_ * s;
        double rc = p.r_c();
        p.amp_ = p.f_.back() * rc * std::exp(p.kappa_ * rc);
        return p;
    }

private:
    double eval(double r, int der) const {
        r = std::abs(r);
        const double rc = r_c();
        if (r >= rc) {
            double e = amp_ * std::exp(-kappa_ * r);
            return der == 0 ? e / r : -e * (kappa_ * r + 1) / (r * r);
        }
        std::size_t j = std::min(f_.size() - 2, std::size_t(r / dr_));
        const double h = dr_, t = r / dr_ - double(j);
        const double p0 = f_[j], p1 = f_[j + 1], v0 = df_[j] * h, v1 = df_[j + 1] * h,
                     a0 = d2f_[j] * h * h, a1 = d2f_[j + 1] * h * h;
        // Quintic Hermite basis on [0,1].
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        if (der == 0) {
            double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, h1 = t - 6 * t3 + 8 * t4 - 3 * t5,
                   h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5), h3 = 0.5 * (t3 - 2 * t4 + t5),
                   h4 = -4 * t3 + 7 * t4 - 3 * t5, h5 = 10 * t3 - 15 * t4 + 6 * t5;
            return h0 * p0 + h1 * v0 + h2 * a0 + h3 * a1 + h4 * v1 + h5 * p1;
        }
        double d0 = -30 * t2 + 60 * t3 - 30 * t4, d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4,
               d2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4), d3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4),
               d4 = -12 * t2 + 28 * t3 - 15 * t4, d5 = 30 * t2 - 60 * t3 + 30 * t4;
        return (d0 * p0 + d1 * v0 + d2 * a0 + d3 * a1 + d4 * v1 + d5 * p1) / h;
    }

    double dr_ = 1.0;
    std::vector<double> f_, df_, d2f_;
    double kappa_ = 1.0;
    double amp_ = 0.0;
};

struct GroundState {
    double alpha = 1.0;
    RadialProfile profile;
    double peak = 0.0;
    double residual_norm = 0.0;

    double operator()(double r) const { return profile(r); }
    double derivative(double r) const { return profile.derivative(r); }
};

namespace detail {

// Shooting runs in extended precision: the growing branch e^{alpha r}/r
// amplifies the error in phi(0) by e^{2 alpha r} relative to the profile.
using real_t = long double;
using State2 = std::array<real_t, 2>;

struct LaneEmden {
    real_t a2;
    void operator()(const State2& y, State2& dy, real_t r) const {
        dy[0] = y[1];
        dy[1] = -2.0 / r * y[1] + a2 * y[0] - y[0] * y[0] * y[0];
    }
};

inline State2 series_start(real_t p, real_t alpha, real_t r0) {
    real_t c = (alpha * alpha * p - p * p * p) / 3;
    return {p + 0.5 * c * r0 * r0, c * r0};
}

// +1: trajectory crosses zero (p too large); -1: turns upward (p too small);
// 0: undecided up to r_end.
inline int classify_shot(real_t p, real_t alpha, real_t r_end) {
    namespace ode = boost::numeric::odeint;
    const real_t r0 = 1e-4L / alpha;
    State2 y = series_start(p, alpha, r0);
    auto stepper = ode::make_controlled(real_t(1e-19), real_t(1e-18),
                                        ode::runge_kutta_fehlberg78<State2, real_t>());
    LaneEmden sys{alpha * alpha};
    real_t r = r0, dr = 1e-3L / alpha;
    while (r < r_end) {
        if (stepper.try_step(sys, y, r, dr) != ode::success) continue;
        if (y[0] < 0) return +1;
        if (y[1] > 0) return -1;
    }
    return 0;
}

inline double second_derivative(double r, double f, double df, double a2) {
    if (r == 0) return (a2 * f - f * f * f) / 3.0;
    return -2.0 / r * df + a2 * f - f * f * f;
}

}  // namespace detail

// Sup-norm of Delta phi - a^2 phi + phi^3 at the nodes of a radial grid
// scaled to the profile, with Delta from the sine-series calculus.
inline double ground_state_residual(const RadialProfile& p, double alpha) {
    RadialGrid g(40.0 / alpha, 800);
    std::vector<cplx> u(g.n());
    std::vector<double> f(g.n());
    for (int i = 0; i < g.n(); ++i) {
        f[i] = p(g.node(i));
        u[i] = g.node(i) * f[i];
    }
    apply_kinetic(g, 0, u);
    double res = 0;
    for (int i = 0; i < g.n(); ++i)
        res = std::max(res, std::abs(-u[i].real() / g.node(i) - alpha * alpha * f[i] + f[i] * f[i] * f[i]));
    return res;
}

// Positive radial solution of -Delta phi + alpha^2 phi = phi^3 by bisection
// shooting on phi(0).
inline GroundState solve_ground_state(double alpha, double tol = 1e-10) {
    namespace ode = boost::numeric::odeint;
    require(alpha > 0, "solve_ground_state: alpha must be positive");
    require(tol > 0, "solve_ground_state: tol must be positive");
    using detail::real_t;
    const real_t r_end = 40.0L / alpha;
    real_t lo = 1.0L * alpha, hi = 10.0L * alpha;
    if (detail::classify_shot(lo, alpha, r_end) == +1 || detail::classify_shot(hi, alpha, r_end) != +1)
        throw NoBracket("solve_ground_state: [alpha, 10 alpha] does not straddle the ground state");
    int it = 0;
    while (hi - lo > 4 * std::numeric_limits<real_t>::epsilon() * hi) {
        if (++it > 200) throw ToleranceNotMet("solve_ground_state: bisection stalled");
        real_t mid = (lo + hi) / 2;
        int c = detail::classify_shot(mid, alpha, r_end);
        if (c == 0) {
            lo = hi = mid;
            break;
        }
        (c > 0 ? hi : lo) = mid;
    }
    const real_t p = (lo + hi) / 2;

    // Sample the trajectory on a uniform mesh up to the splice radius, where
    // the linear tail e^{-alpha r}/r takes over.
    const double rc = 10.0 / alpha, dr = 1e-3 / alpha;
    const std::size_t m = std::size_t(std::llround(rc / dr)) + 1;
    std::vector<double> f(m), df(m), d2f(m);
    const double a2 = alpha * alpha;
    f[0] = double(p);
    df[0] = 0;
    d2f[0] = detail::second_derivative(0, f[0], 0, a2);
    const real_t r0 = 1e-4L / alpha;
    detail::State2 s = detail::series_start(p, alpha, r0);
    // Land exactly on every mesh point so sample errors stay smooth in r.
    auto stepper = ode::make_controlled(real_t(1e-19), real_t(1e-18),
                                        ode::runge_kutta_fehlberg78<detail::State2, real_t>());
    detail::LaneEmden sys{real_t(a2)};
    real_t r_prev = r0;
    for (std::size_t i = 1; i < m; ++i) {
        const real_t r = real_t(i) * real_t(dr);
        ode::integrate_adaptive(stepper, sys, s, r_prev, r, real_t(0.25 * dr));
        r_prev = r;
        if (s[0] <= 0 || s[1] > 0)
            throw ToleranceNotMet("solve_ground_state: trajectory left the ground state before the splice radius");
        f[i] = double(s[0]);
        df[i] = double(s[1]);
        d2f[i] = detail::second_derivative(double(r), f[i], df[i], a2);
    }
    GroundState gs;
    gs.alpha = alpha;
    gs.profile = RadialProfile(dr, std::move(f), std::move(df), std::move(d2f), alpha);
    gs.peak = double(p);
    gs.residual_norm = ground_state_residual(gs.profile, alpha);
    if (!(gs.residual_norm < tol * std::max(1.0, a2 * alpha)))
        throw ToleranceNotMet("solve_ground_state: residual " + std::to_string(gs.residual_norm * 1e12) + "e-12");
    return gs;
}

// phi(x, a) = a phi(a x, 1) applied to an existing ground state.
inline GroundState rescale(const GroundState& gs, double alpha_new) {
    require(alpha_new > 0, "rescale: alpha must be positive");
    double s = alpha_new / gs.alpha;
    GroundState out;
    out.alpha = alpha_new;
    out.profile = gs.profile.scaled(s);
    out.peak = s * gs.peak;
    out.residual_norm = ground_state_residual(out.profile, alpha_new);
    return out;
}

// 4 pi int_0^R phi^2 r^2 dr by the midpoint rule (spectrally accurate: the
// integrand is even in r) plus the closed-form tail.
inline double ground_state_mass(const GroundState& gs, double dr = 0.0) {
    const auto& p = gs.profile;
    if (dr <= 0) dr = 2e-3 / gs.alpha;
    const double rc = p.r_c();
    const std::size_t n = std::size_t(std::ceil(rc / dr));
    dr = rc / double(n);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = (double(i) + 0.5) * dr;
        double v = p(r);
        s += v * v * r * r;
    }
    s *= dr;
    // int_rc^inf A^2 e^{-2 k r} dr
    const double A = p.tail_amplitude(), k = p.kappa();
    s += A * A * std::exp(-2 * k * rc) / (2 * k);
    return 4 * pi * s;
}

// Samples of a ground state on a radial grid.
inline std::vector<double> sample(const GroundState& gs, const RadialGrid& g) {
    std::vector<double> v(g.n());
    for (int i = 0; i < g.n(); ++i) v[i] = gs(g.node(i));
    return v;
}
inline std::vector<double> sample_derivative(const GroundState& gs, const RadialGrid& g) {
    std::vector<double> v(g.n());
    for (int i = 0; i < g.n(); ++i) v[i] = gs.derivative(g.node(i));
    return v;
}

}  // namespace soliton_lab
