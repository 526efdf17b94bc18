#pragma once

#include "soliton_lab/fft.hpp"
#include "soliton_lab/field.hpp"

namespace soliton_lab {

// Periodic cube [-L/2, L/2)^3 with n points per axis; index order x, y, z
// (z fastest). The origin is the sample with index n/2 on each axis.
class CartGrid {
public:
    CartGrid() : CartGrid(64, 32.0) {}
    CartGrid(int n, double box_length) : n_(n), box_(box_length) {
        require(n >= 4 && (n & (n - 1)) == 0, "CartGrid: n must be a power of two >= 4");
        require(box_length > 0, "CartGrid: box_length must be positive");
    }

    int n() const { return n_; }
    double box_length() const { return box_; }
    double spacing() const { return box_ / n_; }
    double cell() const { return std::pow(spacing(), 3); }
    std::size_t size() const { return std::size_t(n_) * n_ * n_; }

    std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * n_ + j) * n_ + k;
    }
    std::array<int, 3> unindex(std::size_t idx) const {
        int k = int(idx % n_);
        int j = int((idx / n_) % n_);
        int i = int(idx / (std::size_t(n_) * n_));
        return {i, j, k};
    }
    double coord(int i) const { return -0.5 * box_ + i * spacing(); }
    Vec3 point(std::size_t idx) const {
        auto [i, j, k] = unindex(idx);
        return {coord(i), coord(j), coord(k)};
    }
    // Signed lattice wave number for FFT index i.
    double wavenumber(int i) const {
        int m = i < n_ / 2 ? i : i - n_;
        return 2 * pi / box_ * m;
    }
    // Wave number used for odd derivatives: the Nyquist mode is dropped.
    double wavenumber_odd(int i) const { return i == n_ / 2 ? 0.0 : wavenumber(i); }
    double k_max() const { return pi / spacing(); }

    Field zeros() const { return Field(size(), cell()); }

    template <class Fn>  // Fn(Vec3) -> cplx
    Field sample(Fn&& fn) const {
        Field f = zeros();
        for (std::size_t idx = 0; idx < size(); ++idx) f[idx] = fn(point(idx));
        return f;
    }

    bool operator==(const CartGrid& o) const { return n_ == o.n_ && box_ == o.box_; }

private:
    int n_;
    double box_;
};

// Applies the Fourier multiplier m(kx, ky, kz) to f.
template <class Mult>
Field apply_multiplier(const Field& f, const CartGrid& g, Mult&& m) {
    Field out = f;
    auto& plan = fft::fft3(g.n());
    plan.forward(out.span());
    const int n = g.n();
    const double inv = 1.0 / double(g.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) out[g.index(i, j, k)] *= m(i, j, k) * inv;
    plan.backward(out.span());
    return out;
}

inline double k_squared(const CartGrid& g, int i, int j, int k) {
    return sq(g.wavenumber(i)) + sq(g.wavenumber(j)) + sq(g.wavenumber(k));
}

inline Field spectral_laplacian(const Field& f, const CartGrid& g) {
    return apply_multiplier(f, g, [&](int i, int j, int k) { return cplx(-k_squared(g, i, j, k)); });
}

inline Field spectral_derivative(const Field& f, const CartGrid& g, int axis) {
    return apply_multiplier(f, g, [&](int i, int j, int k) {
        int c = axis == 0 ? i : axis == 1 ? j : k;
        return I * g.wavenumber_odd(c);
    });
}

// |nabla|^s with the zero mode dropped (homogeneous).
inline Field fractional_gradient(const Field& f, const CartGrid& g, double s) {
    return apply_multiplier(f, g, [&](int i, int j, int k) {
        double kk = std::sqrt(k_squared(g, i, j, k));
        return cplx(kk == 0 ? 0.0 : std::pow(kk, s));
    });
}

// e^{i tau Delta}
inline Field free_propagate(const Field& f, const CartGrid& g, double tau) {
    return apply_multiplier(f, g, [&](int i, int j, int k) {
        return std::exp(-I * tau * k_squared(g, i, j, k));
    });
}

// f(x - d) via the trigonometric interpolant.
inline Field translate(const Field& f, const CartGrid& g, const Vec3& d) {
    return apply_multiplier(f, g, [&](int i, int j, int k) {
        double ph = g.wavenumber_odd(i) * d[0] + g.wavenumber_odd(j) * d[1] +
                    g.wavenumber_odd(k) * d[2];
        return std::exp(-I * ph);
    });
}

// Exact shift of samples by whole cells: out(i+s) = f(i).
inline Field lattice_shift(const Field& f, const CartGrid& g, std::array<int, 3> s) {
    Field out = g.zeros();
    const int n = g.n();
    auto wrap = [n](int a) { return ((a % n) + n) % n; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                out[g.index(wrap(i + s[0]), wrap(j + s[1]), wrap(k + s[2]))] = f[g.index(i, j, k)];
    return out;
}

// ||f||_2 computed from Fourier coefficients.
inline double l2_norm_modes(const Field& f, const CartGrid& g) {
    Field m = f;
    fft::fft3(g.n()).forward(m.span());
    double s = 0;
    for (auto& z : m) s += std::norm(z);
    return std::sqrt(s * g.cell() / double(g.size()));
}

// ||f||_{\dot H^s}; s = 0 is the plain L2 norm.
inline double sobolev_norm(const Field& f, double s, const CartGrid& g) {
    if (s == 0.0) return l2_norm(f);
    require(s == 0.5 || s == 1.0, "sobolev_norm: s must be 0, 1/2 or 1");
    Field m = f;
    fft::fft3(g.n()).forward(m.span());
    double acc = 0;
    const int n = g.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double kk = std::sqrt(k_squared(g, i, j, k));
                if (kk > 0) acc += std::pow(kk, 2 * s) * std::norm(m[g.index(i, j, k)]);
            }
    return std::sqrt(acc * g.cell() / double(g.size()));
}

inline double sobolev_norm(const PairField& f, double s, const CartGrid& g) {
    return std::hypot(sobolev_norm(f.upper, s, g), sobolev_norm(f.lower, s, g));
}

}  // namespace soliton_lab
