#include <gtest/gtest.h>

#include <random>

#include "soliton_lab/grid.hpp"
#include "soliton_lab/lorentz.hpp"
#include "soliton_lab/radial.hpp"

using namespace soliton_lab;

namespace {

Field plane_wave(const CartGrid& g, std::array<int, 3> m) {
    const double k0 = 2 * pi / g.box_length();
    return g.sample([&](const Vec3& x) { return std::exp(I * k0 * (m[0] * x[0] + m[1] * x[1] + m[2] * x[2])); });
}

double max_diff(const Field& a, const Field& b) {
    double e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

}  // namespace

TEST(Grid, LaplacianOfConstantVanishes) {
    CartGrid g(16, 10.0);
    Field one = g.sample([](const Vec3&) { return cplx(1.0); });
    EXPECT_LT(sup_norm(spectral_laplacian(one, g)), 1e-12);
}

TEST(Grid, LaplacianOfPlaneWave) {
    CartGrid g(16, 10.0);
    const std::array<int, 3> m{2, -3, 1};
    Field f = plane_wave(g, m);
    const double k2 = sq(2 * pi / g.box_length()) * (4 + 9 + 1);
    EXPECT_LT(max_diff(spectral_laplacian(f, g), -k2 * f), 1e-10 * k2);
}

TEST(Grid, LaplacianMatchesFiniteDifferenceToSecondOrder) {
    // Seven-point stencil error is O(h^2); halving h must cut it by about 4.
    auto err = [](int n) {
        CartGrid g(n, 12.0);
        Field f = g.sample([](const Vec3& x) { return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]))); });
        Field L = spectral_laplacian(f, g);
        const double h = g.spacing();
        double e = 0;
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j)
                for (int k = 1; k < n - 1; ++k) {
                    cplx fd = f[g.index(i + 1, j, k)] + f[g.index(i - 1, j, k)] + f[g.index(i, j + 1, k)] +
                              f[g.index(i, j - 1, k)] + f[g.index(i, j, k + 1)] + f[g.index(i, j, k - 1)] -
                              6.0 * f[g.index(i, j, k)];
                    e = std::max(e, std::abs(fd / (h * h) - L[g.index(i, j, k)]));
                }
        return e;
    };
    const double e1 = err(32), e2 = err(64);
    EXPECT_NEAR(e1 / e2, 4.0, 0.5);
}

TEST(Grid, SobolevNormOfZero) {
    CartGrid g(8, 5.0);
    EXPECT_EQ(sobolev_norm(g.zeros(), 0.5, g), 0.0);
}

TEST(Grid, SobolevNormOfPlaneWave) {
    CartGrid g(16, 10.0);
    Field f = plane_wave(g, {1, 2, 0});
    const double k = 2 * pi / g.box_length() * std::sqrt(5.0);
    for (double s : {0.5, 1.0}) EXPECT_NEAR(sobolev_norm(f, s, g), std::pow(k, s) * l2_norm(f), 1e-10 * l2_norm(f));
}

TEST(Grid, HalfNormMatchesDirectModeSum) {
    CartGrid g(8, 6.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N;
    // band-limited: a random combination of lattice modes with |m_i| < 3
    std::vector<std::pair<std::array<int, 3>, cplx>> modes;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c) modes.push_back({{a, b, c}, cplx(N(rng), N(rng))});
    Field f = g.zeros();
    double direct = 0;
    const double k0 = 2 * pi / g.box_length(), vol = std::pow(g.box_length(), 3);
    for (auto& [m, c] : modes) {
        f.axpy(c, plane_wave(g, m));
        direct += std::sqrt(double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2])) * k0 * std::norm(c) * vol;
    }
    EXPECT_NEAR(sq(sobolev_norm(f, 0.5, g)) / direct, 1.0, 1e-12);
}

TEST(Grid, FreePropagatorIsUnitary) {
    CartGrid g(16, 10.0);
    Field f = g.sample([](const Vec3& x) { return cplx(std::exp(-x[0] * x[0] - 2 * x[1] * x[1]), x[2] * std::exp(-x[2] * x[2])); });
    EXPECT_NEAR(l2_norm(free_propagate(f, g, 0.7)), l2_norm(f), 1e-12 * l2_norm(f));
    EXPECT_LT(max_diff(free_propagate(free_propagate(f, g, 0.3), g, -0.3), f), 1e-12);
}

TEST(Grid, LatticeShiftMatchesTranslate) {
    // wide enough box and fine enough grid that the Gaussian is periodic and
    // band-limited to working precision
    CartGrid g(32, 12.0);
    Field f = g.sample([](const Vec3& x) { return cplx(std::exp(-sq(x[0]) - sq(x[1] - 0.5) - sq(x[2]))); });
    const double h = g.spacing();
    EXPECT_LT(max_diff(lattice_shift(f, g, {1, -2, 3}), translate(f, g, {h, -2 * h, 3 * h})), 1e-6);
}

TEST(Grid, RejectsBadSizes) {
    EXPECT_THROW(CartGrid(12, 1.0), InvalidArgument);
    EXPECT_THROW(CartGrid(16, -1.0), InvalidArgument);
    CartGrid g(8, 4.0);
    EXPECT_THROW(sobolev_norm(g.zeros(), 0.3, g), InvalidArgument);
}

// Lorentz quasi-norm of the rearrangement, as specified for the grid layer.
TEST(GridLorentz, IndicatorWithPEqualQ) {
    std::vector<double> a(20, 0.0), m(20, 0.25);
    for (int i = 0; i < 8; ++i) a[i * 2] = 1.0;  // measure 2
    for (double p : {1.0, 1.5, 3.0}) EXPECT_NEAR(lorentz_norm(a, m, p, p), std::pow(2.0, 1 / p), 1e-14);
}

TEST(GridLorentz, PEqualsQEqualsTwoIsL2) {
    CartGrid g(8, 4.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    Field f = g.zeros();
    for (auto& z : f) z = cplx(N(rng), N(rng));
    EXPECT_NEAR(lorentz_norm(f, g, 2, 2) / l2_norm(f), 1.0, 1e-12);
}

TEST(GridLorentz, TwoLevelStepMatchesClosedForm) {
    // f* = 3 on [0, 1), 1 on [1, 4): ||f||^q = (p/q)(3^q + (4^{q/p} - 1))
    std::vector<double> a{1, 3, 1, 1}, m{1, 1, 1, 1};
    for (auto [p, q] : {std::pair{1.5, 1.0}, {2.0, 3.0}, {3.0, 1.2}}) {
        const double want = std::pow((p / q) * (std::pow(3.0, q) + std::pow(4.0, q / p) - 1), 1 / q);
        EXPECT_NEAR(lorentz_norm(a, m, p, q), want, 1e-13 * want);
    }
    EXPECT_NEAR(lorentz_norm(a, m, 2.0, INFINITY), std::max(3.0, 2.0), 1e-14);
}

TEST(GridLorentz, RejectsBadExponents) {
    std::vector<double> a{1}, m{1};
    EXPECT_THROW(lorentz_norm(a, m, 0.5, 1), InvalidArgument);
    EXPECT_THROW(lorentz_norm(a, m, INFINITY, 1), InvalidArgument);
    EXPECT_THROW(lorentz_norm(a, m, 2, 0.5), InvalidArgument);
}

TEST(Radial, KineticMatchesGaussianLaplacian) {
    ChannelGrid cg = ChannelGrid::radial(RadialGrid(12.0, 240));
    Field f = cg.from_profile(0, [](double r) { return cplx(std::exp(-r * r)); });
    Field L = cg.laplacian(f);
    double e = 0;
    for (int i = 0; i < cg.n_r(); ++i) {
        const double r = cg.radial_grid().node(i);
        e = std::max(e, std::abs(L[i] / r - (4 * r * r - 6) * std::exp(-r * r)));
    }
    EXPECT_LT(e, 1e-10);
}
