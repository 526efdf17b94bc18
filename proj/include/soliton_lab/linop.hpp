#pragma once

#include <memory>
#include <optional>
#include <ostream>

#include <Eigen/Dense>

#include "soliton_lab/soliton.hpp"

namespace soliton_lab {

enum class OperatorKind { MatrixHamiltonian, Reference, LPlus, LMinus, TimeDependent, Free };

inline const char* to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::MatrixHamiltonian: return "H(W)";
        case OperatorKind::Reference: return "H(1,0,0,0)";
        case OperatorKind::LPlus: return "L+";
        case OperatorKind::LMinus: return "L-";
        case OperatorKind::TimeDependent: return "H_pi(t)";
        case OperatorKind::Free: return "H0";
    }
    return "?";
}

// Matrix-free linear operator with an optional dense assembly per angular
// sector (radial backends only).
template <class T>
class OperatorHandle {
public:
    using Map = std::function<T(const T&)>;
    using Assembly = std::function<Eigen::MatrixXcd(int ell)>;

    OperatorHandle(OperatorKind kind, Map apply, Map adjoint, Assembly assemble = {})
        : kind_(kind), apply_(std::move(apply)), adjoint_(std::move(adjoint)), assemble_(std::move(assemble)) {}

    T apply(const T& f) const { return apply_(f); }
    T operator()(const T& f) const { return apply_(f); }
    T apply_adjoint(const T& f) const { return adjoint_(f); }

    bool has_assembly() const { return bool(assemble_); }
    Eigen::MatrixXcd assemble_radial(int ell) const {
        require(has_assembly(), std::string("assemble_radial: no dense assembly for ") + to_string(kind_));
        return assemble_(ell);
    }

    OperatorKind kind() const { return kind_; }
    std::string descriptor() const { return to_string(kind_); }

private:
    OperatorKind kind_;
    Map apply_, adjoint_;
    Assembly assemble_;
};

using MatrixOperator = OperatorHandle<PairField>;
using ScalarOperator = OperatorHandle<Field>;

// ------------------------------------------------------------ backend glue

inline Field laplacian(const Field& f, const CartGrid& g) { return spectral_laplacian(f, g); }
inline Field laplacian(const Field& f, const ChannelGrid& cg) { return cg.laplacian(f); }

// Sample points at which pointwise potentials live: all grid points for
// Cartesian grids, radial nodes for channel grids.
inline std::size_t potential_size(const CartGrid& g) { return g.size(); }
inline std::size_t potential_size(const ChannelGrid& cg) { return std::size_t(cg.n_r()); }

template <class V>
Field pointwise(std::span<const V> v, Field f, const CartGrid&) {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= v[i];
    return f;
}
template <class V>
Field pointwise(std::span<const V> v, Field f, const ChannelGrid& cg) {
    return cg.multiply(v, std::move(f));
}

// Pointwise values of w from the upper component: on channel grids the field
// must be a radial function carried by the s-wave.
inline std::vector<cplx> soliton_values(const PairField& W, const CartGrid&) {
    return {W.upper.begin(), W.upper.end()};
}
inline std::vector<cplx> soliton_values(const PairField& W, const ChannelGrid& cg) {
    auto sl = channel_slots(cg);
    require(sl.s >= 0, "soliton_values: layout lacks an s-wave channel");
    auto u = cg.channel(W.upper, sl.s);
    std::vector<cplx> w(cg.n_r());
    for (int i = 0; i < cg.n_r(); ++i) w[i] = u[i] * Y00 / cg.radial_grid().node(i);
    return w;
}

// Pointwise matrix potential [[a, b], [c, -a]] plus a scalar shift -m sigma_3
// and a drift term -2i v.grad on both components.
struct MatrixPotential {
    std::vector<double> a;
    std::vector<cplx> b, c;
    double mass = 0.0;
    Vec3 v{0, 0, 0};
};

// V = [[2|w|^2, w^2], [-conj(w)^2, -2|w|^2]]
inline MatrixPotential soliton_potential(std::span<const cplx> w) {
    MatrixPotential V;
    V.a.resize(w.size());
    V.b.resize(w.size());
    V.c.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        V.a[i] = 2 * std::norm(w[i]);
        V.b[i] = w[i] * w[i];
        V.c[i] = -std::conj(w[i] * w[i]);
    }
    return V;
}

inline PairField drift(const PairField& f, const Vec3& v, const CartGrid& g) {
    PairField out = zeros_like(f);
    for (int k = 0; k < 3; ++k) {
        if (v[k] == 0.0) continue;
        out.upper.axpy(-2.0 * I * v[k], spectral_derivative(f.upper, g, k));
        out.lower.axpy(-2.0 * I * v[k], spectral_derivative(f.lower, g, k));
    }
    return out;
}
inline PairField drift(const PairField& f, const Vec3& v, const ChannelGrid&) {
    require(v == Vec3{0, 0, 0}, "channel operators carry no drift term");
    return zeros_like(f);
}

// Delta sigma_3 + V - m sigma_3 - 2i v.grad, and its adjoint.
template <class Grid>
PairField apply_matrix(const MatrixPotential& V, const PairField& f, const Grid& g, bool adjoint) {
    PairField out{laplacian(f.upper, g), -laplacian(f.lower, g)};
    std::vector<cplx> b = V.b, c = V.c;
    if (adjoint) {
        // [[a, b], [c, -a]]^* = [[a, conj c], [conj b, -a]]
        for (std::size_t i = 0; i < b.size(); ++i) {
            b[i] = std::conj(V.c[i]);
            c[i] = std::conj(V.b[i]);
        }
    }
    std::span<const double> a(V.a);
    out.upper += pointwise(a, f.upper, g);
    out.upper += pointwise(std::span<const cplx>(b), f.lower, g);
    out.lower += pointwise(std::span<const cplx>(c), f.upper, g);
    out.lower -= pointwise(a, f.lower, g);
    if (V.mass != 0.0) {
        out.upper.axpy(-V.mass, f.upper);
        out.lower.axpy(V.mass, f.lower);
    }
    if (V.v != Vec3{0, 0, 0}) out += drift(f, V.v, g);
    return out;
}

// Dense 2N x 2N block of the matrix operator on sector ell, acting on (u, u~).
inline Eigen::MatrixXcd assemble_matrix(const MatrixPotential& V, const ChannelGrid& cg, int ell) {
    const int n = cg.n_r();
    const Eigen::MatrixXd& K = kinetic_matrix(cg.radial_grid(), ell);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    M.topLeftCorner(n, n) = -K.cast<cplx>();
    M.bottomRightCorner(n, n) = K.cast<cplx>();
    for (int i = 0; i < n; ++i) {
        M(i, i) += V.a[i] - V.mass;
        M(i, n + i) += V.b[i];
        M(n + i, i) += V.c[i];
        M(n + i, n + i) += -V.a[i] + V.mass;
    }
    return M;
}

template <class Grid>
MatrixOperator make_matrix_operator(OperatorKind kind, MatrixPotential V, const Grid& g) {
    auto pv = std::make_shared<const MatrixPotential>(std::move(V));
    auto apply = [pv, g](const PairField& f) { return apply_matrix(*pv, f, g, false); };
    auto adjoint = [pv, g](const PairField& f) { return apply_matrix(*pv, f, g, true); };
    typename MatrixOperator::Assembly assemble;
    if constexpr (std::is_same_v<Grid, ChannelGrid>)
        assemble = [pv, g](int ell) { return assemble_matrix(*pv, g, ell); };
    return MatrixOperator(kind, apply, adjoint, assemble);
}

// ---------------------------------------------------------------- builders

// H(W) = [[Delta + 2|w|^2, w^2], [-conj w^2, -Delta - 2|w|^2]] - 2i v.grad
//        - (alpha^2 + |v|^2) sigma_3
template <class Grid>
MatrixOperator build_matrix_hamiltonian(const PairField& W, const SolitonParams& p, const Grid& g) {
    auto w = soliton_values(W, g);
    MatrixPotential V = soliton_potential(w);
    V.mass = p.alpha * p.alpha + dot(p.v, p.v);
    V.v = p.v;
    return make_matrix_operator(OperatorKind::MatrixHamiltonian, std::move(V), g);
}

// Linearization about phi(., 1): [[Delta - 1 + 2 phi^2, phi^2], [-phi^2, -Delta + 1 - 2 phi^2]].
template <class Grid>
MatrixOperator build_reference_hamiltonian(const GroundState& gs, const Grid& g) {
    PairField W = make_soliton(SolitonParams{}, gs, g);
    MatrixPotential V = soliton_potential(soliton_values(W, g));
    V.mass = 1.0;
    return make_matrix_operator(OperatorKind::Reference, std::move(V), g);
}

// H_0 = Delta sigma_3 - mu sigma_3
template <class Grid>
MatrixOperator build_free(double mu, const Grid& g) {
    MatrixPotential V;
    std::size_t n = potential_size(g);
    V.a.assign(n, 0.0);
    V.b.assign(n, 0.0);
    V.c.assign(n, 0.0);
    V.mass = mu;
    return make_matrix_operator(OperatorKind::Free, std::move(V), g);
}

// H_pi(t) = Delta sigma_3 + V_pi(t), V from the moving soliton w_pi(t).
template <class Grid>
MatrixOperator build_time_dependent(const ModulationPath& path, double t, const GroundState& gs, const Grid& g) {
    PairField W = make_soliton(path.effective(t), gs, g);
    MatrixPotential V = soliton_potential(soliton_values(W, g));
    return make_matrix_operator(OperatorKind::TimeDependent, std::move(V), g);
}

// L+- = -Delta + alpha^2 - (2 +- 1) phi^2
template <class Grid>
ScalarOperator build_scalar_L(int sign, const GroundState& gs, const Grid& g) {
    require(sign == 1 || sign == -1, "build_scalar_L: sign must be +1 or -1");
    const double c = sign > 0 ? 3.0 : 1.0;
    auto w = soliton_values(make_soliton(SolitonParams{gs.alpha}, gs, g), g);
    auto pot = std::make_shared<std::vector<double>>(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) (*pot)[i] = gs.alpha * gs.alpha - c * std::norm(w[i]);
    auto apply = [pot, g](const Field& f) {
        Field out = -laplacian(f, g);
        out += pointwise(std::span<const double>(*pot), f, g);
        return out;
    };
    typename ScalarOperator::Assembly assemble;
    if constexpr (std::is_same_v<Grid, ChannelGrid>) {
        assemble = [pot, g](int ell) {
            Eigen::MatrixXcd M = kinetic_matrix(g.radial_grid(), ell).template cast<cplx>();
            for (int i = 0; i < g.n_r(); ++i) M(i, i) += (*pot)[i];
            return M;
        };
    }
    return ScalarOperator(sign > 0 ? OperatorKind::LPlus : OperatorKind::LMinus, apply, apply, assemble);
}

// Real symmetric dense L+- on sector ell of a radial grid.
inline Eigen::MatrixXd scalar_L_matrix(int sign, const GroundState& gs, const RadialGrid& rg, int ell) {
    const double c = sign > 0 ? 3.0 : 1.0;
    Eigen::MatrixXd M = kinetic_matrix(rg, ell);
    GroundState q = at_alpha(gs, gs.alpha);
    for (int i = 0; i < rg.n(); ++i) M(i, i) += q.alpha * q.alpha - c * sq(q(rg.node(i)));
    return M;
}

// Triplet export (row col re im), nonzeros only.
inline void write_triplets(std::ostream& os, const Eigen::MatrixXcd& M, double drop = 0.0) {
    os.precision(17);
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            if (std::abs(M(i, j)) > drop) os << i << ' ' << j << ' ' << M(i, j).real() << ' ' << M(i, j).imag() << '\n';
}

}  // namespace soliton_lab
