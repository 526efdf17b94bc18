#pragma once

#include "soliton_lab/projections.hpp"

namespace soliton_lab {

struct ModulationState {
    SolitonParams pi;
    PairField R;
    std::array<double, 8> residuals{};  // <R, Xi_f(W_pi)>
    int iterations = 0;
    double contraction = 0.0;           // ||psi - W(pi)|| / ||psi - W(guess)|| in H^{1/2}
};

struct ProjectionOptions {
    double capture_fraction = 0.1;  // delta = fraction * ||W(guess)||_{H^{1/2}}
    int max_iterations = 60;
    double tol = 1e-13;             // on max |<R, Xi_f>| / (||Xi_f|| ||W||)
};

// Parameter slots that a backend can represent.
inline std::vector<int> active_parameters(const CartGrid&) { return {0, 1, 2, 3, 4, 5, 6, 7}; }
inline std::vector<int> active_parameters(const ChannelGrid&) { return {kAlpha, kGamma}; }

// d W / d pi_f; the D slots of the frame hold the translation generator
// d_{x_k} W, which is minus the parameter derivative.
inline double parameter_sign(int f) { return f >= kD1 ? -1.0 : 1.0; }

namespace detail {

template <class Grid>
std::array<double, 8> pairings(const PairField& R, const SpectralFrame& fr) {
    std::array<double, 8> r;
    for (int g = 0; g < 8; ++g) r[g] = inner(R, fr.cotangent[g]).real();
    return r;
}

}  // namespace detail

// Find pi with <psi - W(pi), Xi_f(W(pi))> = 0 for the active slots,
// Newton-like with the frame pairing matrix as Jacobian.
template <class Grid>
ModulationState project_to_manifold(const PairField& psi, const SolitonParams& guess, const GroundState& gs,
                                    const Grid& g, const ProjectionOptions& opt = {}) {
    const auto act = active_parameters(g);
    const int m = int(act.size());
    ModulationState st;
    st.pi = guess;
    double r0 = 0.0;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
        PairField W = make_soliton(st.pi, gs, g);
        SpectralFrame fr = tangent_frame(st.pi, gs, g);
        st.R = psi - W;
        st.residuals = detail::pairings<Grid>(st.R, fr);
        st.iterations = it;
        const double wn = std::sqrt(fr.norm2);
        if (it == 0) {
            r0 = sobolev_norm(st.R, 0.5, g);
            double delta = opt.capture_fraction * sobolev_norm(W, 0.5, g);
            if (r0 > delta)
                throw OutsideCaptureRadius("project_to_manifold: ||psi - W(guess)||_{H^1/2} = " + std::to_string(r0) +
                                           " exceeds capture radius " + std::to_string(delta));
        }
        double worst = 0.0;
        for (int a : act) worst = std::max(worst, std::abs(st.residuals[a]) / (l2_norm(fr.cotangent[a]) * wn));
        if (worst < opt.tol || last_step < 1e-15) break;
        if (it >= opt.max_iterations)
            throw NewtonDivergence("project_to_manifold: no convergence after " + std::to_string(it) +
                                   " iterations (residual " + std::to_string(worst) + ")");
        Eigen::MatrixXd J(m, m);
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) {
            rhs(i) = st.residuals[act[i]];
            for (int j = 0; j < m; ++j)
                J(i, j) = parameter_sign(act[j]) * inner(fr.tangent[act[j]], fr.cotangent[act[i]]).real();
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) throw SingularModulationMatrix("project_to_manifold: singular pairing matrix");
        Eigen::VectorXd d = lu.solve(rhs);
        auto p = st.pi.to_array();
        for (int i = 0; i < m; ++i) p[act[i]] += d(i);
        if (!(p[kAlpha] > 0) || !d.allFinite())
            throw NewtonDivergence("project_to_manifold: iterate left the parameter domain");
        st.pi = SolitonParams::from_array(p);
        last_step = d.cwiseAbs().maxCoeff();
    }
    st.contraction = r0 > 0 ? sobolev_norm(st.R, 0.5, g) / r0 : 0.0;
    return st;
}

// N(R, W) = |w + r|^2 (w + r) - |w|^2 w - 2|w|^2 r - w^2 conj r
//         = 2|r|^2 w + conj(w) r^2 + |r|^2 r, pointwise.
inline cplx nonlinear_term(cplx w, cplx r) {
    return 2.0 * std::norm(r) * w + std::conj(w) * r * r + std::norm(r) * r;
}

// Pointwise N(R, W) on a backend; on channel grids both fields must be
// radial (s-wave).
inline Field nonlinear_term(const Field& w, const Field& r, const CartGrid&) {
    Field out = w;
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = nonlinear_term(w[i], r[i]);
    return out;
}
inline Field nonlinear_term(const Field& w, const Field& r, const ChannelGrid& cg) {
    require(cg.channels() == 1 && cg.ell(0) == 0, "nonlinear_term: channel grids need a single s-wave");
    const auto& rg = cg.radial_grid();
    Field out = cg.zeros();
    for (int i = 0; i < cg.n_r(); ++i) {
        double s = Y00 / rg.node(i);  // u -> f
        out[i] = nonlinear_term(w[i] * s, r[i] * s) / s;
    }
    return out;
}

// (N, -conj N): the nonlinear part of the forcing in i R_t + H_pi R = F.
template <class Grid>
PairField nonlinear_pair(const PairField& W, const PairField& R, const Grid& g) {
    Field n = nonlinear_term(W.upper, R.upper, g);
    return {n, -conj(n)};
}

// Rates from d/dt <R, Xi_f(W_pi)> = 0:
//   sum_g pidot_g (<d_g W, Xi_f> - <R, d_g Xi_f>) = i <(N, -conj N), Xi_f>.
// d_g Xi_f is differenced with step 1e-5.
template <class Grid>
std::array<double, 8> modulation_rhs(const ModulationState& st, const GroundState& gs, const Grid& g) {
    const auto act = active_parameters(g);
    const int m = int(act.size());
    SpectralFrame fr = tangent_frame(st.pi, gs, g);
    PairField W = make_soliton(st.pi, gs, g);
    PairField Np = nonlinear_pair(W, st.R, g);
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd rhs(m);
    const bool zero_R = l2_norm(st.R) == 0.0;
    std::vector<std::array<PairField, 8>> dxi(8);
    if (!zero_R) {
        for (int j = 0; j < m; ++j) {
            const double h = 1e-5 * (act[j] == kAlpha ? st.pi.alpha : 1.0);
            auto p = st.pi.to_array(), q = p;
            p[act[j]] += h;
            q[act[j]] -= h;
            auto cp = cotangent_vectors(tangent_vectors(SolitonParams::from_array(p), gs, g));
            auto cq = cotangent_vectors(tangent_vectors(SolitonParams::from_array(q), gs, g));
            for (int f = 0; f < 8; ++f) dxi[act[j]][f] = (1.0 / (2 * h)) * (cp[f] - cq[f]);
        }
    }
    for (int i = 0; i < m; ++i) {
        const int f = act[i];
        rhs(i) = (I * inner(Np, fr.cotangent[f])).real();
        for (int j = 0; j < m; ++j) {
            const int gg = act[j];
            double a = parameter_sign(gg) * inner(fr.tangent[gg], fr.cotangent[f]).real();
            if (!zero_R) a -= inner(st.R, dxi[gg][f]).real();
            A(i, j) = a;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(m - 1) < 1e-10 * sv(0)) throw SingularModulationMatrix("modulation_rhs: near-singular 8x8 system");
    Eigen::VectorXd x = svd.solve(rhs);
    std::array<double, 8> out{};
    for (int i = 0; i < m; ++i) out[act[i]] = x(i);
    return out;
}

struct Decomposition {
    std::vector<double> t;
    std::vector<ModulationState> states;  // static parameters of the nearest soliton
    ModulationPath path;                  // the same, in moving-soliton form
    double rate_l1 = 0.0;                 // int |pidot| dt over the path
};

// Project every frame, seeding each with the previous result, and rewrite
// the static parameters in moving-soliton form: Gamma = theta - int (alpha^2
// - |v|^2), D = D_static - 2 int v (trapezoid on the frame times).
template <class Grid>
Decomposition track_decomposition(const std::vector<double>& times, const std::vector<PairField>& traj,
                                  const SolitonParams& guess, const GroundState& gs, const Grid& g,
                                  const ProjectionOptions& opt = {}) {
    require(times.size() == traj.size() && !times.empty(), "track_decomposition: empty or mismatched trajectory");
    Decomposition dec;
    SolitonParams seed = guess;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        try {
            dec.states.push_back(project_to_manifold(traj[i], seed, gs, g, opt));
        } catch (const OutsideCaptureRadius& e) {
            throw OutsideCaptureRadius(std::string(e.what()) + " at t = " + std::to_string(times[i]));
        }
        dec.t.push_back(times[i]);
        seed = dec.states.back().pi;
        // carry the phase forward so the next guess stays inside the capture radius
        if (i + 1 < traj.size()) {
            double dt = times[i + 1] - times[i];
            seed.gamma += dt * (sq(seed.alpha) - dot(seed.v, seed.v));
            for (int k = 0; k < 3; ++k) seed.d[k] += 2 * dt * seed.v[k];
        }
    }
    std::vector<SolitonParams> moving;
    double theta = 0.0;
    Vec3 y{0, 0, 0};
    for (std::size_t i = 0; i < dec.states.size(); ++i) {
        const auto& s = dec.states[i].pi;
        if (i > 0) {
            const auto& q = dec.states[i - 1].pi;
            double dt = times[i] - times[i - 1];
            theta += 0.5 * dt * (sq(s.alpha) - dot(s.v, s.v) + sq(q.alpha) - dot(q.v, q.v));
            for (int k = 0; k < 3; ++k) y[k] += dt * (s.v[k] + q.v[k]);
        }
        SolitonParams p = s;
        p.gamma -= theta;
        for (int k = 0; k < 3; ++k) p.d[k] -= y[k];
        moving.push_back(p);
    }
    if (times.size() >= 2) {
        dec.path = ModulationPath(times, moving);
        dec.rate_l1 = dec.path.l1_rate_norm();
    } else {
        dec.path = ModulationPath(times, moving, {std::array<double, 8>{}});
    }
    return dec;
}

}  // namespace soliton_lab
