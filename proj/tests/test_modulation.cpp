#include <gtest/gtest.h>

#include "soliton_lab/modulation.hpp"

using namespace soliton_lab;

namespace {

const GroundState& gs1() {
    static const GroundState g = solve_ground_state(1.0);
    return g;
}

const ImaginaryPair& unit() {
    static const ImaginaryPair p = compute_imaginary_pair(gs1(), RadialGrid(30.0, 600));
    return p;
}

ChannelGrid s_wave() { return ChannelGrid::radial(RadialGrid(30.0, 600)); }

double param_distance(const SolitonParams& a, const SolitonParams& b) {
    auto x = a.to_array(), y = b.to_array();
    double m = 0;
    for (int k = 0; k < 8; ++k) m = std::max(m, std::abs(x[k] - y[k]));
    return m;
}

// Unit bump in the continuous subspace of the s-wave frame at p.
PairField continuous_bump(const SolitonParams& p, const ChannelGrid& cg) {
    ProjectionSet ps(spectral_frame(p, gs1(), cg, unit()));
    Field b = cg.from_profile(0, [](double r) { return cplx(std::exp(-sq(r - 1.0)), 0.3 * std::exp(-sq(r - 1.0))); });
    PairField c = ps(Projection::Continuous, conj_pair(b));
    return (1.0 / l2_norm(c)) * c;
}

}  // namespace

TEST(ProjectToManifold, ExactSolitonIsAFixedPoint) {
    CartGrid g(32, 16.0);
    const SolitonParams star{1.1, 0.3, {0.1, 0.0, -0.05}, {0.2, -0.1, 0.0}};
    PairField psi = make_soliton(star, gs1(), g);
    SolitonParams guess = star;
    guess.alpha += 0.05;
    guess.gamma -= 0.05;
    guess.v[0] += 0.03;
    guess.d[2] += 0.05;
    ModulationState st = project_to_manifold(psi, guess, gs1(), g);
    EXPECT_LT(param_distance(st.pi, star), 1e-8);
    EXPECT_LT(l2_norm(st.R), 1e-8 * l2_norm(psi));
    for (double r : st.residuals) EXPECT_LT(std::abs(r), 1e-12 * l2_norm(psi) * l2_norm(psi));
}

TEST(ProjectToManifold, ContinuousBumpStaysInR) {
    auto cg = s_wave();
    const SolitonParams star{1.0, 0.2};
    PairField bump = 1e-3 * continuous_bump(star, cg);
    PairField psi = make_soliton(star, gs1(), cg) + bump;
    SolitonParams guess = star;
    guess.alpha += 0.02;
    ModulationState st = project_to_manifold(psi, guess, gs1(), cg);
    EXPECT_LT(param_distance(st.pi, star), 1e-6);
    EXPECT_LT(l2_norm(st.R - bump), 1e-6 * l2_norm(bump) + 1e-9);
}

TEST(ProjectToManifold, AlphaTangentIsAbsorbedIntoAlpha) {
    auto cg = s_wave();
    const SolitonParams star{1.0, 0.0};
    SpectralFrame fr = tangent_frame(star, gs1(), cg);
    for (double eps : {1e-3, 1e-4}) {
        PairField psi = make_soliton(star, gs1(), cg);
        psi.axpy(eps, fr.tangent[kAlpha]);
        ModulationState st = project_to_manifold(psi, star, gs1(), cg);
        EXPECT_NEAR(st.pi.alpha - star.alpha, eps, 10 * eps * eps) << eps;
        EXPECT_NEAR(st.pi.gamma, 0.0, 10 * eps * eps) << eps;
        EXPECT_LT(l2_norm(st.R), 10 * eps * eps * l2_norm(fr.tangent[kAlpha])) << eps;
    }
}

TEST(ProjectToManifold, PhaseAndLatticeShiftEquivariance) {
    CartGrid g(32, 16.0);
    const SolitonParams star{1.0, 0.1, {0.05, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    Field bump = g.sample([](const Vec3& x) { return cplx(1e-3 * std::exp(-sq(x[0] - 1) - sq(x[1]) - sq(x[2] + 0.5)), 0.0); });
    PairField psi = make_soliton(star, gs1(), g) + conj_pair(bump);
    ModulationState a = project_to_manifold(psi, star, gs1(), g);

    const double gam = 0.7;
    const std::array<int, 3> s{2, 0, -1};
    Field moved = std::exp(I * gam) * lattice_shift(psi.upper, g, s);
    // shifting e^{i v.x} by s h also moves the phase by -v.s h, with the
    // velocity the projection found (the bump perturbs it)
    const double h = g.spacing();
    double extra = 0;
    for (int k = 0; k < 3; ++k) extra -= a.pi.v[k] * s[k] * h;
    SolitonParams guess = star;
    guess.gamma += gam + extra;
    for (int k = 0; k < 3; ++k) guess.d[k] += s[k] * h;
    ModulationState b = project_to_manifold(conj_pair(moved), guess, gs1(), g);
    EXPECT_NEAR(b.pi.alpha, a.pi.alpha, 1e-6);
    EXPECT_NEAR(b.pi.gamma, a.pi.gamma + gam + extra, 1e-6);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(b.pi.v[k], a.pi.v[k], 1e-6);
        EXPECT_NEAR(b.pi.d[k], a.pi.d[k] + s[k] * h, 1e-6);
    }
}

TEST(ProjectToManifold, RejectsFarGuess) {
    auto cg = s_wave();
    PairField psi = make_soliton(SolitonParams{1.0}, gs1(), cg);
    EXPECT_THROW(project_to_manifold(psi, SolitonParams{2.0}, gs1(), cg), OutsideCaptureRadius);
}

TEST(ModulationRhs, ZeroRemainderGivesZeroRates) {
    CartGrid g(32, 16.0);
    ModulationState st;
    st.pi = SolitonParams{1.2, 0.4, {0.1, 0.0, 0.0}, {0.0, 0.3, 0.0}};
    st.R = conj_pair(g.zeros());
    for (double r : modulation_rhs(st, gs1(), g)) EXPECT_EQ(r, 0.0);
}

TEST(ModulationRhs, RatesAreQuadraticInContinuousR) {
    auto cg = s_wave();
    const SolitonParams p{1.0};
    PairField b = continuous_bump(p, cg);
    std::vector<double> le, lr;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        ModulationState st;
        st.pi = p;
        st.R = eps * b;
        auto r = modulation_rhs(st, gs1(), cg);
        le.push_back(std::log(eps));
        lr.push_back(std::log(std::hypot(r[kAlpha], r[kGamma])));
    }
    EXPECT_NEAR((lr[0] - lr[2]) / (le[0] - le[2]), 2.0, 0.1);
}

TEST(NonlinearTerm, RealCaseMatchesExpansion) {
    for (double w : {0.0, 0.5, 2.0})
        for (double r : {-0.3, 0.1, 1.5}) {
            const double expect = std::pow(w + r, 3) - w * w * w - 3 * w * w * r;
            EXPECT_NEAR(nonlinear_term(cplx(w), cplx(r)).real(), expect, 1e-13);
            EXPECT_EQ(nonlinear_term(cplx(w), cplx(r)).imag(), 0.0);
        }
}

TEST(NonlinearTerm, ComplexCaseMatchesDefinition) {
    const cplx w(0.7, -0.2), r(0.1, 0.3);
    const cplx full = std::norm(w + r) * (w + r) - std::norm(w) * w - 2 * std::norm(w) * r - w * w * std::conj(r);
    EXPECT_LT(std::abs(nonlinear_term(w, r) - full), 1e-15);
}

TEST(TrackDecomposition, ExactStandingSolitonHasConstantParameters) {
    auto cg = s_wave();
    const SolitonParams p{1.0, 0.2};
    auto path = ModulationPath::constant(p, 1.0);
    std::vector<double> t;
    std::vector<PairField> traj;
    for (int i = 0; i <= 10; ++i) {
        t.push_back(0.1 * i);
        traj.push_back(make_soliton(path.effective(t.back()), gs1(), cg));
    }
    Decomposition dec = track_decomposition(t, traj, p, gs1(), cg);
    EXPECT_LT(dec.rate_l1, 1e-8);
    for (const auto& s : dec.states) EXPECT_LT(l2_norm(s.R), 1e-10 * l2_norm(traj[0]));
}

TEST(TrackDecomposition, MovingSolitonRecoversBoost) {
    CartGrid g(32, 16.0);
    const SolitonParams p{1.0, 0.0, {0.3, -0.1, 0.0}, {-0.5, 0.0, 0.2}};
    auto path = ModulationPath::constant(p, 1.0);
    std::vector<double> t;
    std::vector<PairField> traj;
    for (int i = 0; i <= 4; ++i) {
        t.push_back(0.25 * i);
        traj.push_back(moving_soliton(path, t.back(), gs1(), g));
    }
    Decomposition dec = track_decomposition(t, traj, p, gs1(), g);
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(dec.states[i].pi.v[k], p.v[k], 1e-5);
            // static position y = 2 v t + D
            EXPECT_NEAR(dec.states[i].pi.d[k], p.d[k] + 2 * p.v[k] * t[i], 1e-5);
        }
        const SolitonParams m = dec.path.at(t[i]);
        EXPECT_LT(param_distance(m, p), 1e-5);
    }
}
