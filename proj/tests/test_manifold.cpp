#include <gtest/gtest.h>

#include <numbers>

#include "goldens.hpp"
#include "soliton_lab/manifold.hpp"

using namespace soliton_lab;

namespace {

const GroundState& gs1() {
    static const GroundState g = solve_ground_state(1.0);
    return g;
}

// The shooting layout: s-wave on (20, 320) with its own pair.
struct Shooting {
    RadialGrid rg{20.0, 320};
    ChannelGrid cg = ChannelGrid::radial(rg);
    ImaginaryPair unit = compute_imaginary_pair(gs1(), rg);
    SpectralFrame fr = spectral_frame(SolitonParams{1.0}, gs1(), cg, unit);

    ShootProblem problem(double eps) const {
        PairField R0 = eps > 0 ? continuous_perturbation({eps}, fr, cg) : conj_pair(cg.zeros());
        return make_shoot_problem(R0, SolitonParams{1.0}, gs1(), cg, unit);
    }
};

const Shooting& shooting() {
    static const Shooting s;
    return s;
}

}  // namespace

// ------------------------------------------------------------------ hyp

TEST(Hyp, HomogeneousCase) {
    HypSystem sys;
    sys.sigma = [](double t) { return 1.0 + t; };
    sys.f1 = [](double) { return 0.0; };
    sys.f2 = [](double) { return 0.0; };
    sys.x2_0 = 0.7;
    sys.horizon = 5.0;
    sys.dt = 0.05;
    HypSolution s = solve_hyp_bounded(sys);
    EXPECT_EQ(s.x1_required_initial, 0.0);
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        const double t = s.t[k];
        EXPECT_EQ(s.x1[k], 0.0);
        EXPECT_NEAR(s.x2[k], 0.7 * std::exp(-t - 0.5 * t * t), 1e-10) << t;
    }
}

TEST(Hyp, ExponentialForcingOfTheGrowingComponent) {
    HypSystem sys;
    sys.sigma = [](double) { return 2.0; };
    sys.f1 = [](double t) { return std::exp(-t); };
    sys.f2 = [](double) { return 0.0; };
    sys.horizon = 20.0;
    sys.dt = 0.01;
    HypSolution s = solve_hyp_bounded(sys);
    EXPECT_NEAR(s.x1_required_initial, -1.0 / 3.0, 1e-10);
    const double H = sys.horizon;
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        const double t = s.t[k];
        // cut at the horizon: -(e^{-t} - e^{2t - 3H}) / 3
        EXPECT_NEAR(s.x1[k], -(std::exp(-t) - std::exp(2 * t - 3 * H)) / 3.0, 1e-10) << t;
        if (t < 10) EXPECT_NEAR(s.x1[k], -std::exp(-t) / 3.0, 1e-10) << t;
    }
}

TEST(Hyp, IndicatorForcingOfTheDecayingComponent) {
    HypSystem sys;
    sys.sigma = [](double) { return 1.0; };
    sys.f1 = [](double) { return 0.0; };
    sys.f2 = [](double t) { return t < 1.0 ? 1.0 : 0.0; };
    sys.x2_0 = 0.25;
    sys.horizon = 10.0;
    sys.dt = 0.01;
    HypSolution s = solve_hyp_bounded(sys);
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        const double t = s.t[k];
        const double expect = t <= 1.0 ? 0.25 * std::exp(-t) + 1.0 - std::exp(-t)
                                       : 0.25 * std::exp(-t) + (std::numbers::e - 1.0) * std::exp(-t);
        EXPECT_NEAR(s.x2[k], expect, 1e-10) << t;
    }
}

TEST(Hyp, RejectsNonPositiveSigma) {
    HypSystem sys;
    sys.sigma = [](double t) { return 1.0 - t; };
    sys.f1 = sys.f2 = [](double) { return 0.0; };
    sys.horizon = 2.0;
    EXPECT_THROW(solve_hyp_bounded(sys), InvalidArgument);
}

TEST(Hyp, SampledSystemInterpolates) {
    std::vector<double> t, sg, f1, f2;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.05 * i);
        sg.push_back(2.0);
        f1.push_back(0.0);
        f2.push_back(1.0);
    }
    HypSolution s = solve_hyp_bounded(hyp_from_samples(t, sg, f1, f2, 0.0));
    for (std::size_t k = 0; k < s.t.size(); ++k) EXPECT_NEAR(s.x2[k], 0.5 * (1 - std::exp(-2 * s.t[k])), 1e-10);
}

// ------------------------------------------------------------- shooting

TEST(Perturbation, HasNoDiscreteComponents) {
    const auto& S = shooting();
    PairField R0 = continuous_perturbation({1e-3}, S.fr, S.cg);
    EXPECT_NEAR(l2_norm(R0) / 1e-3, 1.0, 0.5);
    ProjectionSet ps(S.fr);
    EXPECT_LT(l2_norm(ps(Projection::Continuous, R0) - R0), 1e-6 * l2_norm(R0));
    EXPECT_THROW(continuous_perturbation({1e-3, 1.0, 0.0}, S.fr, S.cg), InvalidArgument);
}

TEST(Shoot, ZeroDataGivesZeroOffset) {
    ShootOptions opt;
    opt.mode = ShootMode::Linearized;
    opt.T = 1.0;
    opt.dt = 5e-4;
    ShootResult r = shoot_h(shooting().problem(0.0), opt);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(std::abs(r.h_star), 1e-10);
    for (const auto& s : r.trajectory.samples) EXPECT_LT(std::abs(s.b), r.target);
}

TEST(Shoot, LinearizedDichotomyAndUniqueness) {
    // The linear flow keeps Pc data out of the unstable direction, so h* = 0
    // from any bracket and h * F- grows exactly like e^{sigma t}.
    const auto& S = shooting();
    ShootProblem p = S.problem(1e-3);
    ShootOptions opt;
    opt.mode = ShootMode::Linearized;
    opt.T = 1.0;
    opt.dt = 5e-4;
    ShootResult a = shoot_h(p, opt, std::make_pair(-1e-6, 3e-6));
    ShootResult b = shoot_h(p, opt, std::make_pair(-5e-6, 1e-6));
    EXPECT_TRUE(a.converged);
    EXPECT_TRUE(b.converged);
    EXPECT_NEAR(a.h_star, b.h_star, 1e-9);
    EXPECT_LT(std::abs(a.h_star), 1e-9);

    Shot up = run_shot(p, a.h_star + 1e-6, opt, true, false);
    std::vector<double> t, db;
    for (std::size_t i = 0; i < up.samples.size(); ++i) {
        t.push_back(up.samples[i].t);
        db.push_back(up.samples[i].b - a.trajectory.samples[i].b);
    }
    EXPECT_NEAR(growth_rate(t, db, 0.25, 0.75) / S.unit.sigma, 1.0, 0.01);
    EXPECT_NEAR(db.front() / 1e-6, 1.0, 1e-3);
}

TEST(Shoot, NoSignChangeOnOneSidedBracket) {
    ShootOptions opt;
    opt.mode = ShootMode::Linearized;
    opt.T = 0.5;
    opt.dt = 5e-4;
    EXPECT_THROW(shoot_h(shooting().problem(1e-3), opt, std::make_pair(1e-6, 2e-6)), NoSignChange);
}

TEST(Shoot, NonlinearGoldenOffsetAndExplicitFormula) {
    ShootProblem p = shooting().problem(1e-3);
    ShootOptions opt;  // nonlinear, T = 2, dt = 2e-4
    ShootResult r = shoot_h(p, opt);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(std::abs(r.b_final), 1e-6 * l2_norm(p.R0));
    EXPECT_NEAR(r.h_star / golden::h_star_1e3, 1.0, 1e-3);
    TrajectoryTerms terms = trajectory_terms(p, r.trajectory);
    const double he = h_explicit(terms, opt.T);
    EXPECT_LE(std::abs(he - r.h_star), std::max(1e-8, 0.05 * std::abs(r.h_star)));
}

TEST(HExplicit, UnperturbedSolitonGivesZero) {
    ShootProblem p = shooting().problem(0.0);
    ShootOptions opt;
    opt.mode = ShootMode::Linearized;
    opt.T = 0.5;
    opt.dt = 5e-4;
    Shot s = run_shot(p, 0.0, opt, true, false);
    TrajectoryTerms terms = trajectory_terms(p, s);
    EXPECT_EQ(h_explicit(terms, opt.T), 0.0);
}

// ----------------------------------------------------------- scattering

TEST(Scattering, ZeroTrajectory) {
    auto cg = shooting().cg;
    std::vector<double> t{0.0, 0.5, 1.0};
    std::vector<PairField> R(3, conj_pair(cg.zeros())), src = R;
    ScatteringCheck sc = scattering_check(t, R, src, cg);
    EXPECT_EQ(l2_norm(sc.r_free), 0.0);
    for (double d : sc.defect) EXPECT_EQ(d, 0.0);
}

TEST(Scattering, FreeDataScattersToItself) {
    auto cg = shooting().cg;
    Field f = cg.from_profile(0, [](double r) { return cplx(std::exp(-sq(r - 2)), 0.2 * std::exp(-r * r)); });
    PairField r0 = conj_pair(f);
    std::vector<double> t;
    std::vector<PairField> R, src;
    for (int i = 0; i <= 8; ++i) {
        t.push_back(0.125 * i);
        R.push_back(free_pair_flow(r0, cg, t.back()));
        src.push_back(conj_pair(cg.zeros()));
    }
    ScatteringCheck sc = scattering_check(t, R, src, cg);
    EXPECT_LT(l2_norm(sc.r_free - r0), 1e-12 * l2_norm(r0));
    for (double d : sc.defect) EXPECT_LT(d, 1e-10 * sobolev_norm(r0, 0.5, cg));
}

TEST(GrowthRate, FitsExponential) {
    std::vector<double> t, y;
    for (int i = 0; i <= 20; ++i) {
        t.push_back(0.1 * i);
        y.push_back(-3e-7 * std::exp(4.5 * t.back()));
    }
    EXPECT_NEAR(growth_rate(t, y, 0.5, 1.5), 4.5, 1e-10);
    EXPECT_THROW(growth_rate(t, y, 5.0, 6.0), InvalidArgument);
}
