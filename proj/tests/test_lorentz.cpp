#include <gtest/gtest.h>

#include <random>

#include "soliton_lab/lorentz.hpp"

using namespace soliton_lab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Heavy-tailed magnitudes on a random subset, so several dyadic levels are hit.
std::vector<cplx> random_field(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);
    const double spread = 0.5 + 2.5 * u(rng), fill = 0.05 + 0.95 * u(rng);
    std::vector<cplx> f(n, 0.0);
    for (auto& x : f)
        if (u(rng) < fill) x = std::polar(std::exp(spread * z(rng)), 2 * pi * u(rng));
    return f;
}

double norm_of(const std::vector<cplx>& f, const std::vector<double>& m, double p, double q) {
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
    return lorentz_norm(a, m, p, q);
}

}  // namespace

TEST(LorentzNorm, IndicatorClosedForm) {
    // ||chi_A||_{p,q} = (p/q)^{1/q} mu(A)^{1/p}
    std::vector<double> a(10, 0.0), m(10, 0.3);
    for (int i = 0; i < 4; ++i) a[i] = 1.0;
    EXPECT_NEAR(lorentz_norm(a, m, 2.0, 1.0), 2.0 * std::sqrt(1.2), 1e-14);
    EXPECT_NEAR(lorentz_norm(a, m, 3.0, 3.0), std::cbrt(1.2), 1e-14);
    EXPECT_NEAR(lorentz_norm(a, m, 6.0, kInf), std::pow(1.2, 1.0 / 6), 1e-14);
}

TEST(LorentzNorm, DiagonalIsLp) {
    std::mt19937_64 rng(3);
    std::vector<double> m(300, 0.01);
    auto f = random_field(rng, 300);
    double lp = 0;
    for (auto x : f) lp += std::pow(std::abs(x), 2.5) * 0.01;
    EXPECT_NEAR(norm_of(f, m, 2.5, 2.5) / std::pow(lp, 1 / 2.5), 1.0, 1e-12);
}

TEST(LorentzNorm, RejectsBadExponents) {
    std::vector<double> a{1.0}, m{1.0};
    EXPECT_THROW(lorentz_norm(a, m, 0.5, 1.0), InvalidArgument);
    EXPECT_THROW(lorentz_norm(a, m, 2.0, 0.5), InvalidArgument);
}

TEST(Atomic, SingleCellIndicator) {
    std::vector<cplx> f(16, 0.0);
    f[5] = 1.0;
    std::vector<double> m(16, 0.125);
    for (double p : {1.2, 2.0, 6.0}) {
        auto d = atomic_decompose(f, m, p);
        ASSERT_EQ(d.atoms.size(), 1u);
        EXPECT_NEAR(d.atoms[0].coefficient, std::pow(0.125, 1 / p), 1e-15);
        EXPECT_EQ(d.atoms[0].support, std::vector<std::size_t>{5});
    }
}

TEST(Atomic, IndicatorOfDyadicMeasure) {
    for (int j : {-2, 0, 3}) {
        const int cells = 16;
        const double cell = std::ldexp(1.0, j) / cells;
        std::vector<cplx> f(64, 0.0);
        for (int i = 0; i < cells; ++i) f[3 * i + 1] = I;
        std::vector<double> m(64, cell);
        auto d = atomic_decompose(f, m, 1.2);
        ASSERT_EQ(d.atoms.size(), 1u) << j;
        EXPECT_NEAR(d.atoms[0].coefficient, std::pow(2.0, j / 1.2), 1e-13) << j;
        EXPECT_NEAR(d.atoms[0].measure, std::ldexp(1.0, j), 1e-13);
    }
}

TEST(Atomic, ZeroFieldHasNoAtoms) {
    std::vector<cplx> f(8, 0.0);
    std::vector<double> m(8, 1.0);
    EXPECT_TRUE(atomic_decompose(f, m, 2.0).atoms.empty());
}

TEST(Atomic, AtomsAreNormalizedDisjointAndReconstructExactly) {
    std::mt19937_64 rng(11);
    std::vector<double> m(4096, 1.0 / 4096);
    for (int trial = 0; trial < 20; ++trial) {
        auto f = random_field(rng, m.size());
        auto d = atomic_decompose(f, m, 1.5);
        std::vector<int> seen(f.size(), 0);
        double prev_measure = 0;
        for (std::size_t k = 0; k < d.atoms.size(); ++k) {
            const auto& a = d.atoms[k];
            double sup = 0;
            for (auto v : a.values) sup = std::max(sup, std::abs(v));
            EXPECT_NEAR(sup * std::pow(a.measure, 1 / 1.5), 1.0, 1e-13);
            for (auto i : a.support) ++seen[i];
            // full blocks double in measure; the last one holds whatever is left
            if (k + 1 < d.atoms.size()) EXPECT_GE(a.measure, prev_measure);
            prev_measure = a.measure;
        }
        for (int s : seen) EXPECT_LE(s, 1);
        auto g = d.reconstruct(f.size());
        double err = 0;
        for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(g[i] - f[i]) / (std::abs(f[i]) + 1e-300));
        EXPECT_LT(err, 1e-14) << trial;
    }
}

TEST(Atomic, TiesAreBrokenByIndex) {
    std::vector<cplx> f{1.0, 2.0, 1.0, 2.0, 1.0};
    std::vector<double> m(5, 1.0);
    auto d = atomic_decompose(f, m, 2.0);
    ASSERT_FALSE(d.atoms.empty());
    EXPECT_EQ(d.atoms[0].support.front(), 1u);
}

TEST(Atomic, NormEquivalenceWithProofConstants) {
    std::mt19937_64 rng(2024);
    std::vector<double> m(2048, 0.5);
    int checked = 0;
    for (double p : {1.2, 1.5, 2.0, 3.0, 6.0})
        for (double q : {1.0, 1.2, 2.0, kInf}) {
            if (equivalence_constants_obstructed(p, q)) continue;
            ++checked;
            const double c = std::pow(2.0, 2 / p);
            for (int trial = 0; trial < 200; ++trial) {
                auto f = random_field(rng, m.size());
                const double ratio = norm_of(f, m, p, q) / atomic_decompose(f, m, p).coefficient_norm(q);
                EXPECT_GE(ratio, 1 / c) << p << ' ' << q;
                EXPECT_LE(ratio, c) << p << ' ' << q;
            }
        }
    EXPECT_EQ(checked, 15);
}

TEST(Atomic, ObstructedPairsFailOnIndicators) {
    for (auto [p, q] : {std::pair{3.0, 1.0}, {6.0, 1.0}, {6.0, 2.0}}) {
        ASSERT_TRUE(equivalence_constants_obstructed(p, q));
        std::vector<cplx> f(32, 1.0);
        std::vector<double> m(32, 1.0);
        EXPECT_GT(norm_of(f, m, p, q) / atomic_decompose(f, m, p).coefficient_norm(q), std::pow(2.0, 2 / p));
    }
    EXPECT_FALSE(equivalence_constants_obstructed(1.2, 1.0));
}

TEST(Atomic, CartesianOverload) {
    CartGrid g(8, 4.0);
    Field f = g.sample([](const Vec3& x) { return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]))); });
    auto d = atomic_decompose(f, g, 1.2);
    auto r = d.reconstruct(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(r[i] - f[i]), 0.0, 1e-15);
}
