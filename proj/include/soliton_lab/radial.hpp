#pragma once

#include <Eigen/Dense>

#include <map>
#include <mutex>

#include "soliton_lab/fft.hpp"
#include "soliton_lab/field.hpp"

namespace soliton_lab {

// Uniform staggered grid r_i = (i + 1/2) h on (0, r_max).
class RadialGrid {
public:
    RadialGrid() : RadialGrid(30.0, 600) {}
    RadialGrid(double r_max, int n_r) : r_max_(r_max), n_(n_r) {
        require(r_max > 0 && n_r >= 8, "RadialGrid: need r_max > 0 and n_r >= 8");
    }
    double r_max() const { return r_max_; }
    int n() const { return n_; }
    double spacing() const { return r_max_ / n_; }
    double node(int i) const { return (i + 0.5) * spacing(); }
    std::vector<double> nodes() const {
        std::vector<double> r(n_);
        for (int i = 0; i < n_; ++i) r[i] = node(i);
        return r;
    }
    bool operator==(const RadialGrid& o) const { return r_max_ == o.r_max_ && n_ == o.n_; }

private:
    double r_max_;
    int n_;
};

// Spectral calculus for u = r f on a RadialGrid. A function of angular
// momentum l has u of parity (-1)^(l+1) at the origin: odd u is expanded in
// sin(k pi r / R) (vanishing at R), even u in cos(k pi r / R).
class RadialSpectral {
public:
    RadialSpectral(const RadialGrid& g, bool odd) : g_(g), odd_(odd) {}

    double wavenumber(int k) const { return (odd_ ? k + 1 : k) * pi / g_.r_max(); }

    std::vector<cplx> forward(std::span<const cplx> u) const {
        std::vector<cplx> c(u.begin(), u.end());
        fft::r2r(g_.n(), odd_ ? FFTW_RODFT10 : FFTW_REDFT10)(c);
        return c;
    }
    void backward(std::span<cplx> c) const {
        fft::r2r(g_.n(), odd_ ? FFTW_RODFT01 : FFTW_REDFT01)(c);
        const double s = 1.0 / (2.0 * g_.n());
        for (auto& x : c) x *= s;
    }

    // Multiplier m(kappa) in the basis.
    template <class M>
    void apply(std::span<cplx> u, M&& m) const {
        auto c = forward(u);
        for (int k = 0; k < g_.n(); ++k) c[k] *= m(wavenumber(k));
        backward(c);
        std::copy(c.begin(), c.end(), u.begin());
    }

    // Evaluates the spectral interpolant of u at arbitrary radii; zero
    // beyond r_max.
    std::vector<cplx> evaluate(std::span<const cplx> u, std::span<const double> r) const {
        auto c = forward(u);
        const int n = g_.n();
        std::vector<double> w(n, 2.0 / (2.0 * n));
        if (odd_) w[n - 1] = 1.0 / (2.0 * n);
        else w[0] = 1.0 / (2.0 * n);
        std::vector<cplx> out(r.size());
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (r[j] >= g_.r_max() || r[j] < 0) continue;
            // Chebyshev-like recurrence for sin/cos(k theta).
            const double th = pi * r[j] / g_.r_max();
            const double c1 = std::cos(th), s1 = std::sin(th);
            double ck = odd_ ? c1 : 1.0, sk = odd_ ? s1 : 0.0;
            cplx acc = 0;
            for (int k = 0; k < n; ++k) {
                acc += w[k] * c[k] * (odd_ ? sk : ck);
                double cn = ck * c1 - sk * s1, sn = sk * c1 + ck * s1;
                ck = cn;
                sk = sn;
            }
            out[j] = acc;
        }
        return out;
    }

private:
    RadialGrid g_;
    bool odd_;
};

inline bool u_is_odd(int ell) { return ell % 2 == 0; }

// K_l u = -u'' + l(l+1) u / r^2 (the radial part of -Delta acting on r f).
inline void apply_kinetic(const RadialGrid& g, int ell, std::span<cplx> u) {
    RadialSpectral sp(g, u_is_odd(ell));
    std::vector<cplx> in(u.begin(), u.end());
    sp.apply(u, [](double k) { return k * k; });
    if (ell > 0) {
        const double c = ell * (ell + 1.0);
        for (int i = 0; i < g.n(); ++i) u[i] += c / sq(g.node(i)) * in[i];
    }
}

// Dense symmetric matrix of K_l.
inline const Eigen::MatrixXd& kinetic_matrix(const RadialGrid& g, int ell) {
    static std::mutex m;
    static std::map<std::tuple<double, int, int>, Eigen::MatrixXd> cache;
    std::lock_guard lk(m);
    auto key = std::make_tuple(g.r_max(), g.n(), ell);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const int n = g.n();
    Eigen::MatrixXd K(n, n);
    std::vector<cplx> e(n);
    for (int j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        apply_kinetic(g, ell, e);
        for (int i = 0; i < n; ++i) K(i, j) = e[i].real();
    }
    K = 0.5 * (K + K.transpose()).eval();
    return cache.emplace(key, std::move(K)).first->second;
}

// Eigendecomposition of K_l, cached (used for |nabla|^s in l > 0 channels).
inline const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& kinetic_eigen(const RadialGrid& g, int ell) {
    static std::mutex m;
    static std::map<std::tuple<double, int, int>, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> cache;
    const auto& K = kinetic_matrix(g, ell);
    std::lock_guard lk(m);
    auto key = std::make_tuple(g.r_max(), g.n(), ell);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K)).first->second;
}

// (-Delta)^{s/2} restricted to angular momentum l, in the u variable.
inline void apply_fractional(const RadialGrid& g, int ell, std::span<cplx> u, double s) {
    if (ell == 0) {
        RadialSpectral(g, true).apply(u, [s](double k) { return std::pow(k, s); });
        return;
    }
    const auto& es = kinetic_eigen(g, ell);
    const int n = g.n();
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; ++i) x[i] = u[i];
    Eigen::VectorXcd c = es.eigenvectors().transpose().cast<cplx>() * x;
    for (int k = 0; k < n; ++k) c[k] *= std::pow(std::max(0.0, es.eigenvalues()[k]), s / 2);
    x = es.eigenvectors().cast<cplx>() * c;
    for (int i = 0; i < n; ++i) u[i] = x[i];
}

// A list of angular channels on a radial grid. Each channel is a real
// spherical harmonic Y (normalized on the sphere) of degree ell; a field is
// sum_c f_c(r) Y_c and is stored as u_c = r f_c, channel-major.
class ChannelGrid {
public:
    ChannelGrid() : ChannelGrid(RadialGrid{}, {0, 1, 1, 1}) {}
    ChannelGrid(RadialGrid g, std::vector<int> ells) : g_(g), ells_(std::move(ells)) {
        require(!ells_.empty(), "ChannelGrid: need at least one channel");
    }
    // The s-wave alone.
    static ChannelGrid radial(RadialGrid g) { return ChannelGrid(g, {0}); }

    const RadialGrid& radial_grid() const { return g_; }
    int n_r() const { return g_.n(); }
    int channels() const { return int(ells_.size()); }
    int ell(int c) const { return ells_[c]; }
    const std::vector<int>& ells() const { return ells_; }
    std::size_t size() const { return std::size_t(g_.n()) * ells_.size(); }
    double cell() const { return g_.spacing(); }
    Field zeros() const { return Field(size(), cell()); }

    std::span<cplx> channel(Field& f, int c) const {
        return f.span().subspan(std::size_t(c) * g_.n(), g_.n());
    }
    std::span<const cplx> channel(const Field& f, int c) const {
        return f.span().subspan(std::size_t(c) * g_.n(), g_.n());
    }

    // Field with channel c set to u = r * prof(r).
    template <class Fn>
    Field from_profile(int c, Fn&& prof) const {
        Field f = zeros();
        auto u = channel(f, c);
        for (int i = 0; i < g_.n(); ++i) u[i] = g_.node(i) * prof(g_.node(i));
        return f;
    }

    // Channel-diagonal multiplication by a radial function given at nodes.
    Field multiply(std::span<const double> v, Field f) const {
        for (int c = 0; c < channels(); ++c) {
            auto u = channel(f, c);
            for (int i = 0; i < g_.n(); ++i) u[i] *= v[i];
        }
        return f;
    }
    Field multiply(std::span<const cplx> v, Field f) const {
        for (int c = 0; c < channels(); ++c) {
            auto u = channel(f, c);
            for (int i = 0; i < g_.n(); ++i) u[i] *= v[i];
        }
        return f;
    }

    Field laplacian(Field f) const {
        for (int c = 0; c < channels(); ++c) {
            apply_kinetic(g_, ells_[c], channel(f, c));
        }
        return -1.0 * f;
    }

    Field fractional(Field f, double s) const {
        for (int c = 0; c < channels(); ++c) apply_fractional(g_, ells_[c], channel(f, c), s);
        return f;
    }

    // Dil_a f(x) = a^3 f(a x), i.e. u -> a^2 u(a r).
    Field dilate(const Field& f, double a) const {
        Field out = zeros();
        std::vector<double> ar(g_.n());
        for (int i = 0; i < g_.n(); ++i) ar[i] = a * g_.node(i);
        for (int c = 0; c < channels(); ++c) {
            auto v = RadialSpectral(g_, u_is_odd(ells_[c])).evaluate(channel(f, c), ar);
            auto o = channel(out, c);
            for (int i = 0; i < g_.n(); ++i) o[i] = a * a * v[i];
        }
        return out;
    }

    bool operator==(const ChannelGrid& o) const { return g_ == o.g_ && ells_ == o.ells_; }

private:
    RadialGrid g_;
    std::vector<int> ells_;
};

inline double sobolev_norm(const Field& f, double s, const ChannelGrid& cg) {
    if (s == 0.0) return l2_norm(f);
    require(s == 0.5 || s == 1.0, "sobolev_norm: s must be 0, 1/2 or 1");
    return l2_norm(cg.fractional(f, s));
}

inline double sobolev_norm(const PairField& f, double s, const ChannelGrid& cg) {
    return std::hypot(sobolev_norm(f.upper, s, cg), sobolev_norm(f.lower, s, cg));
}

// Smooth radial function f(r) known through u = r f on a RadialGrid; evaluates
// the spectral interpolant anywhere, including r -> 0.
class SpectralRadialFunction {
public:
    SpectralRadialFunction() = default;
    SpectralRadialFunction(const RadialGrid& g, std::span<const cplx> u, int ell = 0)
        : g_(g), odd_(u_is_odd(ell)), ell_(ell) {
        RadialSpectral sp(g, odd_);
        c_ = sp.forward(u);
        const int n = g.n();
        for (int k = 0; k < n; ++k) {
            double w = (odd_ ? k == n - 1 : k == 0) ? 1.0 / (2.0 * n) : 1.0 / n;
            c_[k] *= w;
        }
    }

    // u(r)
    cplx u(double r) const {
        if (r >= g_.r_max()) return 0;
        cplx acc = 0;
        const double th = pi * r / g_.r_max();
        const double c1 = std::cos(th), s1 = std::sin(th);
        double ck = odd_ ? c1 : 1.0, sk = odd_ ? s1 : 0.0;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            acc += c_[k] * (odd_ ? sk : ck);
            double cn = ck * c1 - sk * s1, sn = sk * c1 + ck * s1;
            ck = cn;
            sk = sn;
        }
        return acc;
    }

    // f(r) = u(r)/r, with u'(0) at the origin for the odd case.
    cplx operator()(double r) const {
        if (r >= g_.r_max()) return 0;
        if (r < 1e-8) {
            if (!odd_) return 0;
            cplx d = 0;
            for (std::size_t k = 0; k < c_.size(); ++k) d += c_[k] * ((k + 1) * pi / g_.r_max());
            return d;
        }
        return u(r) / r;
    }

    int ell() const { return ell_; }

private:
    RadialGrid g_;
    bool odd_ = true;
    int ell_ = 0;
    std::vector<cplx> c_;
};

}  // namespace soliton_lab
