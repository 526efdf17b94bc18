#include <gtest/gtest.h>

#include <random>

#include "soliton_lab/projections.hpp"

using namespace soliton_lab;

namespace {

struct Setup {
    GroundState gs = solve_ground_state(1.0);
    ChannelGrid cg{RadialGrid(30.0, 600), {0, 1, 1, 1}};
    ImaginaryPair unit = compute_imaginary_pair(gs, RadialGrid(30.0, 600));
    SolitonParams p{1.0, 0.4};
    ProjectionSet ps{[&] {
        SpectralFrame fr = tangent_frame(p, gs, cg);
        attach_pair(fr, unit, cg);
        return fr;
    }()};
};

const Setup& setup() {
    static const Setup s;
    return s;
}

// Smooth random pair: a few Gaussian shells per channel with random
// complex weights, r^ell regular at the origin.
PairField random_pair(std::mt19937_64& rng, const ChannelGrid& cg) {
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(0.0, 6.0);
    auto one = [&] {
        Field f = cg.zeros();
        for (int c = 0; c < cg.channels(); ++c)
            for (int j = 0; j < 3; ++j) {
                const double r0 = U(rng), w = 0.5 + 0.3 * U(rng);
                const cplx a(N(rng), N(rng));
                const int ell = cg.ell(c);
                f += cg.from_profile(c, [&](double r) { return a * std::pow(r, ell) * std::exp(-sq((r - r0) / w)); });
            }
        return f;
    };
    return {one(), one()};
}

}  // namespace

TEST(Projections, PairProjectorsActOnEigenfunctions) {
    const auto& fr = setup().ps.frame();
    const auto& ps = setup().ps;
    const double n = l2_norm(fr.f_plus);
    EXPECT_LT(l2_norm(ps(Projection::Plus, fr.f_plus) - fr.f_plus), 1e-6 * n);
    EXPECT_LT(l2_norm(ps(Projection::Plus, fr.f_minus)), 1e-6 * n);
    EXPECT_LT(l2_norm(ps(Projection::Minus, fr.f_minus) - fr.f_minus), 1e-6 * n);
    EXPECT_LT(l2_norm(ps(Projection::Minus, fr.f_plus)), 1e-6 * n);
}

TEST(Projections, ZeroProjectorFixesTangents) {
    const auto& fr = setup().ps.frame();
    for (int k = 0; k < 8; ++k) {
        const PairField& t = fr.tangent[k];
        EXPECT_LT(l2_norm(setup().ps(Projection::Zero, t) - t), 1e-5 * l2_norm(t)) << direction_name[k];
        EXPECT_LT(l2_norm(setup().ps(Projection::Continuous, t)), 1e-5 * l2_norm(t)) << direction_name[k];
    }
}

TEST(Projections, AlgebraOnRandomFields) {
    std::mt19937_64 rng(20240611);
    const Projection all[4] = {Projection::Zero, Projection::Plus, Projection::Minus, Projection::Continuous};
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        PairField f = random_pair(rng, setup().cg);
        const double nf = l2_norm(f);
        PairField Pf[4];
        for (int b = 0; b < 4; ++b) Pf[b] = setup().ps(all[b], f);
        PairField sum = Pf[0] + Pf[1] + Pf[2] + Pf[3];
        worst = std::max(worst, l2_norm(sum - f) / nf);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                PairField ab = setup().ps(all[a], Pf[b]);
                if (a == b) ab -= Pf[b];
                worst = std::max(worst, l2_norm(ab) / nf);
            }
    }
    EXPECT_LT(worst, 1e-5);
}

TEST(Projections, ContinuousPartIsSymplecticallyOrthogonal) {
    std::mt19937_64 rng(5);
    const auto& fr = setup().ps.frame();
    for (int trial = 0; trial < 10; ++trial) {
        PairField f = random_pair(rng, setup().cg);
        PairField c = setup().ps(Projection::Continuous, f);
        for (int g = 0; g < 8; ++g)
            EXPECT_LT(std::abs(inner(c, fr.cotangent[g])), 1e-5 * l2_norm(f) * l2_norm(fr.cotangent[g]));
        EXPECT_LT(std::abs(inner(c, i_sigma3(fr.f_plus))), 1e-5 * l2_norm(f) * l2_norm(fr.f_plus));
        EXPECT_LT(std::abs(inner(c, i_sigma3(fr.f_minus))), 1e-5 * l2_norm(f) * l2_norm(fr.f_minus));
        PairField cc = setup().ps(Projection::Continuous, c);
        EXPECT_LT(l2_norm(cc - c), 1e-5 * l2_norm(f));
    }
}

TEST(Projections, OrthogonalityIffNoZeroComponent) {
    std::mt19937_64 rng(11);
    const auto& ps = setup().ps;
    const auto& fr = ps.frame();
    PairField f = random_pair(rng, setup().cg);
    PairField R = f - ps(Projection::Zero, f);
    const double n = l2_norm(f);
    double worst = 0;
    for (auto r : ps.orthogonality_residuals(R)) worst = std::max(worst, std::abs(r));
    EXPECT_LT(worst, 1e-8 * n * std::sqrt(fr.norm2));
    EXPECT_LT(l2_norm(ps(Projection::Zero, R)), 1e-8 * n);
    // adding a tangent breaks both at once
    for (int k : {kAlpha, kGamma, kV2, kD3}) {
        PairField S = R;
        S.axpy(0.1, fr.tangent[k]);
        double m = 0;
        for (auto r : ps.orthogonality_residuals(S)) m = std::max(m, std::abs(r));
        EXPECT_GT(m, 1e-3 * std::sqrt(fr.norm2) * l2_norm(fr.tangent[k]) * 0.1) << direction_name[k];
        EXPECT_NEAR(l2_norm(ps(Projection::Zero, S)), 0.1 * l2_norm(fr.tangent[k]), 1e-6 * n) << direction_name[k];
    }
}

TEST(Projections, NeedsAttachedPair) {
    SpectralFrame fr = tangent_frame(SolitonParams{1.0}, setup().gs, setup().cg);
    EXPECT_THROW(ProjectionSet{fr}, InvalidArgument);
}
