#pragma once

#include <span>
#include <vector>

#include "soliton_lab/core.hpp"

namespace soliton_lab {

// Complex samples plus the quadrature weight of one sample (cell measure).
// The same type serves Cartesian grids (cell = h^3) and radial channel
// layouts (cell = h, samples are r*f).
class Field {
public:
    Field() = default;
    Field(std::size_t n, double cell) : v_(n), cell_(cell) {}
    Field(std::vector<cplx> v, double cell) : v_(std::move(v)), cell_(cell) {}

    std::size_t size() const { return v_.size(); }
    double cell() const { return cell_; }
    cplx& operator[](std::size_t i) { return v_[i]; }
    const cplx& operator[](std::size_t i) const { return v_[i]; }
    std::span<cplx> span() { return v_; }
    std::span<const cplx> span() const { return v_; }
    cplx* data() { return v_.data(); }
    const cplx* data() const { return v_.data(); }
    auto begin() { return v_.begin(); }
    auto end() { return v_.end(); }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }

    Field& operator+=(const Field& o) {
        check(o);
        for (std::size_t i = 0; i < size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        check(o);
        for (std::size_t i = 0; i < size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Field& operator*=(cplx a) {
        for (auto& x : v_) x *= a;
        return *this;
    }
    // this += a*o
    Field& axpy(cplx a, const Field& o) {
        check(o);
        for (std::size_t i = 0; i < size(); ++i) v_[i] += a * o.v_[i];
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(cplx a, Field b) { return b *= a; }
    friend Field operator-(Field a) { return a *= -1.0; }

private:
    void check(const Field& o) const { require(o.size() == size(), "Field: size mismatch"); }
    std::vector<cplx> v_;
    double cell_ = 1.0;
};

inline Field conj(Field f) {
    for (auto& x : f) x = std::conj(x);
    return f;
}

// Pointwise product with real samples.
inline Field mul(std::span<const double> a, Field f) {
    require(a.size() == f.size(), "mul: size mismatch");
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= a[i];
    return f;
}
inline Field mul(const Field& a, Field f) {
    require(a.size() == f.size(), "mul: size mismatch");
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= a[i];
    return f;
}

// int f conj(g)
inline cplx inner(const Field& f, const Field& g) {
    require(f.size() == g.size(), "inner: size mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
    return s * f.cell();
}

inline double l2_norm(const Field& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

inline double sup_norm(const Field& f) {
    double m = 0;
    for (auto& x : f) m = std::max(m, std::abs(x));
    return m;
}

// Column vector (f, g); for the objects of the theory g = conj(f).
struct PairField {
    Field upper, lower;

    std::size_t size() const { return upper.size(); }
    double cell() const { return upper.cell(); }

    PairField& operator+=(const PairField& o) {
        upper += o.upper;
        lower += o.lower;
        return *this;
    }
    PairField& operator-=(const PairField& o) {
        upper -= o.upper;
        lower -= o.lower;
        return *this;
    }
    PairField& operator*=(cplx a) {
        upper *= a;
        lower *= a;
        return *this;
    }
    PairField& axpy(cplx a, const PairField& o) {
        upper.axpy(a, o.upper);
        lower.axpy(a, o.lower);
        return *this;
    }
    friend PairField operator+(PairField a, const PairField& b) { return a += b; }
    friend PairField operator-(PairField a, const PairField& b) { return a -= b; }
    friend PairField operator*(cplx a, PairField b) { return b *= a; }
    friend PairField operator-(PairField a) { return a *= -1.0; }
};

inline PairField conj_pair(const Field& f) { return {f, conj(f)}; }

inline PairField zeros_like(const PairField& f) {
    return {Field(f.size(), f.cell()), Field(f.size(), f.cell())};
}

// <F, G> = int F1 conj(G1) + F2 conj(G2)
inline cplx inner(const PairField& f, const PairField& g) {
    return inner(f.upper, g.upper) + inner(f.lower, g.lower);
}

inline double l2_norm(const PairField& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

inline PairField sigma3(PairField f) {
    f.lower *= -1.0;
    return f;
}
// i sigma_3 F
inline PairField i_sigma3(PairField f) {
    f.upper *= I;
    f.lower *= -I;
    return f;
}

inline double conjugate_symmetry_defect(const PairField& f) {
    double m = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        m = std::max(m, std::abs(f.lower[i] - std::conj(f.upper[i])));
    return m;
}

inline bool is_finite(const Field& f) {
    return std::all_of(f.begin(), f.end(),
                       [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

}  // namespace soliton_lab
