#pragma once

#include <limits>
#include <numeric>
#include <span>

#include "soliton_lab/field.hpp"
#include "soliton_lab/grid.hpp"
#include "soliton_lab/radial.hpp"

namespace soliton_lab {

// |f| with its sample measures, in decreasing order (ties by index).
struct Rearrangement {
    std::vector<std::size_t> order;
    std::vector<double> value;       // f*_j
    std::vector<double> cumulative;  // m_j = measure of the first j+1 samples
};

inline Rearrangement rearrange(std::span<const double> abs_f, std::span<const double> measure) {
    require(abs_f.size() == measure.size(), "rearrange: one measure per sample");
    Rearrangement r;
    r.order.resize(abs_f.size());
    std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    std::stable_sort(r.order.begin(), r.order.end(), [&](auto a, auto b) { return abs_f[a] > abs_f[b]; });
    double m = 0.0;
    for (auto i : r.order) {
        require(measure[i] > 0, "rearrange: sample measures must be positive");
        m += measure[i];
        r.value.push_back(abs_f[i]);
        r.cumulative.push_back(m);
    }
    return r;
}

// (int_0^inf (t^{1/p} f*(t))^q dt/t)^{1/q} for the step function f*; on each
// step the integral is f_j^q (p/q)(m_j^{q/p} - m_{j-1}^{q/p}). q = inf gives
// sup_j m_j^{1/p} f_j.
inline double lorentz_norm(std::span<const double> abs_f, std::span<const double> measure, double p, double q) {
    if (!(p >= 1) || std::isinf(p)) throw InvalidArgument("lorentz_norm: need 1 <= p < inf");
    if (!(q >= 1)) throw InvalidArgument("lorentz_norm: need q >= 1");
    Rearrangement r = rearrange(abs_f, measure);
    if (std::isinf(q)) {
        double s = 0.0;
        for (std::size_t j = 0; j < r.value.size(); ++j) s = std::max(s, std::pow(r.cumulative[j], 1 / p) * r.value[j]);
        return s;
    }
    double s = 0.0, prev = 0.0;
    for (std::size_t j = 0; j < r.value.size(); ++j) {
        if (r.value[j] == 0.0) break;
        double cur = std::pow(r.cumulative[j], q / p);
        s += std::pow(r.value[j], q) * (p / q) * (cur - prev);
        prev = cur;
    }
    return std::pow(s, 1 / q);
}

inline std::vector<double> abs_values(const Field& f) {
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
    return a;
}

inline double lorentz_norm(const Field& f, const CartGrid& g, double p, double q) {
    std::vector<double> m(f.size(), g.cell());
    return lorentz_norm(abs_values(f), m, p, q);
}

// Radial s-wave channel: |psi(r)| = |u| Y00 / r on shells of measure 4 pi r^2 h.
inline double lorentz_norm(const Field& f, const ChannelGrid& cg, double p, double q) {
    require(cg.channels() == 1 && cg.ell(0) == 0, "lorentz_norm: radial layout must be a single s-wave channel");
    const auto r = cg.radial_grid().nodes();
    const double h = cg.radial_grid().spacing();
    std::vector<double> a(f.size()), m(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        a[i] = std::abs(f[i]) / (std::sqrt(4 * pi) * r[i]);
        m[i] = 4 * pi * r[i] * r[i] * h;
    }
    return lorentz_norm(a, m, p, q);
}

// f = sum_k alpha_k a_k with disjoint supports: the k-th support holds the
// samples of rearranged measure in (2^{k-1} mu_1, 2^k mu_1], mu_1 being the
// measure of the largest sample; blocks that split a run of equal values
// are merged. Each atom has sup |a_k| * mu(supp)^{1/p} = 1.
struct Atom {
    double coefficient = 0.0;
    double measure = 0.0;
    std::vector<std::size_t> support;
    std::vector<cplx> values;  // a_k on the support
};

struct AtomicDecomposition {
    double p = 1.0;
    std::vector<Atom> atoms;

    double coefficient_norm(double q) const {
        if (std::isinf(q)) {
            double s = 0.0;
            for (const auto& a : atoms) s = std::max(s, a.coefficient);
            return s;
        }
        double s = 0.0;
        for (const auto& a : atoms) s += std::pow(a.coefficient, q);
        return std::pow(s, 1 / q);
    }

    std::vector<cplx> reconstruct(std::size_t n) const {
        std::vector<cplx> f(n, 0.0);
        for (const auto& a : atoms)
            for (std::size_t j = 0; j < a.support.size(); ++j) f[a.support[j]] += a.coefficient * a.values[j];
        return f;
    }
};

// An indicator of any measure is a single atom with ||f||_{p,q} / alpha =
// (p/q)^{1/q}; where that leaves [2^{-2/p}, 2^{2/p}] the two-sided bound with
// those constants fails on a finite grid no matter how the blocks are cut.
inline bool equivalence_constants_obstructed(double p, double q) {
    const double single = std::isinf(q) ? 1.0 : std::pow(p / q, 1 / q);
    return single > std::pow(2.0, 2 / p) || single < std::pow(2.0, -2 / p);
}

inline AtomicDecomposition atomic_decompose(std::span<const cplx> f, std::span<const double> measure, double p) {
    if (!(p >= 1) || std::isinf(p)) throw InvalidArgument("atomic_decompose: need 1 <= p < inf");
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
    Rearrangement r = rearrange(a, measure);
    AtomicDecomposition out;
    out.p = p;
    std::size_t n = 0;
    while (n < r.value.size() && r.value[n] > 0) ++n;
    if (n == 0) return out;
    const double mu1 = r.cumulative[0];
    auto block = [&](std::size_t j) {
        double x = r.cumulative[j] / mu1;
        return x <= 1.0 ? 0 : int(std::ceil(std::log2(x) - 1e-12));
    };
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && block(end) == block(start)) ++end;
        while (end < n && r.value[end] == r.value[end - 1]) ++end;  // keep ties together
        Atom at;
        at.measure = r.cumulative[end - 1] - (start ? r.cumulative[start - 1] : 0.0);
        at.coefficient = r.value[start] * std::pow(at.measure, 1 / p);
        for (std::size_t j = start; j < end; ++j) {
            at.support.push_back(r.order[j]);
            at.values.push_back(f[r.order[j]] / at.coefficient);
        }
        out.atoms.push_back(std::move(at));
        start = end;
    }
    return out;
}

inline AtomicDecomposition atomic_decompose(const Field& f, const CartGrid& g, double p) {
    std::vector<double> m(f.size(), g.cell());
    return atomic_decompose(f.span(), m, p);
}

}  // namespace soliton_lab
