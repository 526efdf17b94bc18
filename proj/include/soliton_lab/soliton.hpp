#pragma once

#include <map>

#include "soliton_lab/grid.hpp"
#include "soliton_lab/ground_state.hpp"

namespace soliton_lab {

// pi = (alpha, Gamma, v, D)
struct SolitonParams {
    double alpha = 1.0;
    double gamma = 0.0;
    Vec3 v{0, 0, 0};
    Vec3 d{0, 0, 0};

    std::array<double, 8> to_array() const {
        return {alpha, gamma, v[0], v[1], v[2], d[0], d[1], d[2]};
    }
    static SolitonParams from_array(const std::array<double, 8>& a) {
        return {a[0], a[1], {a[2], a[3], a[4]}, {a[5], a[6], a[7]}};
    }
    bool is_standing() const {
        return v == Vec3{0, 0, 0} && d == Vec3{0, 0, 0};
    }
};

// Slot order of the eight directions in frames and parameter vectors.
enum Direction : int { kAlpha = 0, kGamma = 1, kV1 = 2, kV2 = 3, kV3 = 4, kD1 = 5, kD2 = 6, kD3 = 7 };
inline constexpr const char* direction_name[8] = {"alpha", "gamma", "v1", "v2", "v3", "d1", "d2", "d3"};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Time-sampled parameters pi(t) with rates; values between nodes are linear.
class ModulationPath {
public:
    ModulationPath() = default;
    ModulationPath(std::vector<double> t, std::vector<SolitonParams> p,
                   std::vector<std::array<double, 8>> rates = {})
        : t_(std::move(t)), p_(std::move(p)), rates_(std::move(rates)) {
        require(!t_.empty() && t_.size() == p_.size(), "ModulationPath: nodes and params mismatch");
        for (std::size_t i = 1; i < t_.size(); ++i)
            require(t_[i] > t_[i - 1], "ModulationPath: nodes must increase");
        for (auto& q : p_) require(q.alpha > 0, "ModulationPath: alpha must be positive");
        if (rates_.empty()) rates_ = difference_rates();
        require(rates_.size() == t_.size(), "ModulationPath: rates mismatch");
        // cumulative trapezoid integrals of alpha^2 - |v|^2 and 2 v
        theta_.assign(t_.size(), 0.0);
        y_.assign(t_.size(), Vec3{0, 0, 0});
        for (std::size_t i = 1; i < t_.size(); ++i) {
            double dt = t_[i] - t_[i - 1];
            theta_[i] = theta_[i - 1] + 0.5 * dt * (phase_rate(p_[i - 1]) + phase_rate(p_[i]));
            for (int k = 0; k < 3; ++k) y_[i][k] = y_[i - 1][k] + dt * (p_[i - 1].v[k] + p_[i].v[k]);
        }
    }

    static ModulationPath constant(const SolitonParams& p, double t_end) {
        require(t_end > 0, "ModulationPath::constant: t_end must be positive");
        return ModulationPath({0.0, t_end}, {p, p}, {std::array<double, 8>{}, std::array<double, 8>{}});
    }

    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    const std::vector<double>& times() const { return t_; }
    const std::vector<SolitonParams>& params() const { return p_; }
    const std::vector<std::array<double, 8>>& rates() const { return rates_; }

    SolitonParams at(double t) const {
        auto [i, s] = locate(t);
        auto a = p_[i].to_array(), b = p_[std::min(i + 1, p_.size() - 1)].to_array();
        std::array<double, 8> c;
        for (int k = 0; k < 8; ++k) c[k] = (1 - s) * a[k] + s * b[k];
        return SolitonParams::from_array(c);
    }
    std::array<double, 8> rate(double t) const {
        auto [i, s] = locate(t);
        auto& a = rates_[i];
        auto& b = rates_[std::min(i + 1, rates_.size() - 1)];
        std::array<double, 8> c;
        for (int k = 0; k < 8; ++k) c[k] = (1 - s) * a[k] + s * b[k];
        return c;
    }

    // int_0^t (alpha^2 - |v|^2) by the trapezoid rule on the nodes.
    double phase_integral(double t) const {
        auto [i, s] = locate(t);
        if (s == 0) return theta_[i];
        double dt = t - t_[i];
        return theta_[i] + 0.5 * dt * (phase_rate(p_[i]) + phase_rate(at(t)));
    }
    // 2 int_0^t v
    Vec3 position_integral(double t) const {
        auto [i, s] = locate(t);
        if (s == 0) return y_[i];
        double dt = t - t_[i];
        SolitonParams q = at(t);
        Vec3 y = y_[i];
        for (int k = 0; k < 3; ++k) y[k] += dt * (p_[i].v[k] + q.v[k]);
        return y;
    }
    // Parameters of the static soliton that coincides with w_pi(t).
    SolitonParams effective(double t) const {
        SolitonParams q = at(t);
        q.gamma += phase_integral(t);
        Vec3 y = position_integral(t);
        for (int k = 0; k < 3; ++k) q.d[k] += y[k];
        return q;
    }

    // int |pi'| dt (sum of component L1 norms), trapezoid.
    double l1_rate_norm() const {
        double s = 0;
        for (std::size_t i = 1; i < t_.size(); ++i)
            for (int k = 0; k < 8; ++k)
                s += 0.5 * (t_[i] - t_[i - 1]) * (std::abs(rates_[i - 1][k]) + std::abs(rates_[i][k]));
        return s;
    }

private:
    static double phase_rate(const SolitonParams& p) { return p.alpha * p.alpha - dot(p.v, p.v); }

    std::pair<std::size_t, double> locate(double t) const {
        const double eps = 1e-12 * std::max(1.0, std::abs(t_.back()));
        if (t < t_.front() - eps || t > t_.back() + eps)
            throw ExtrapolationBeyondPath("ModulationPath: t = " + std::to_string(t) + " outside [" +
                                          std::to_string(t_.front()) + ", " + std::to_string(t_.back()) + "]");
        if (t_.size() == 1 || t <= t_.front()) return {0, 0.0};
        if (t >= t_.back()) return {t_.size() - 1, 0.0};
        std::size_t i = std::upper_bound(t_.begin(), t_.end(), t) - t_.begin() - 1;
        double s = (t - t_[i]) / (t_[i + 1] - t_[i]);
        return {i, s};
    }

    std::vector<std::array<double, 8>> difference_rates() const {
        std::vector<std::array<double, 8>> r(t_.size(), std::array<double, 8>{});
        if (t_.size() < 2) return r;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            std::size_t a = i == 0 ? 0 : i - 1, b = std::min(i + 1, t_.size() - 1);
            auto pa = p_[a].to_array(), pb = p_[b].to_array();
            for (int k = 0; k < 8; ++k) r[i][k] = (pb[k] - pa[k]) / (t_[b] - t_[a]);
        }
        return r;
    }

    std::vector<double> t_;
    std::vector<SolitonParams> p_;
    std::vector<std::array<double, 8>> rates_;
    std::vector<double> theta_;
    std::vector<Vec3> y_;
};

inline GroundState at_alpha(const GroundState& gs, double alpha) {
    return gs.alpha == alpha ? gs : rescale(gs, alpha);
}

// Periodic (minimum image) displacement x - d on a Cartesian grid.
inline Vec3 min_image(const Vec3& x, const Vec3& d, double L) {
    Vec3 r;
    for (int k = 0; k < 3; ++k) {
        double s = x[k] - d[k];
        r[k] = s - L * std::round(s / L);
    }
    return r;
}

// ---------------------------------------------------------------- Cartesian

// w(pi)(x) = e^{i(Gamma + v.x)} phi(x - D, alpha) as the pair (w, conj w).
inline PairField make_soliton(const SolitonParams& p, const GroundState& gs, const CartGrid& g) {
    GroundState q = at_alpha(gs, p.alpha);
    Field w = g.sample([&](const Vec3& x) {
        Vec3 r = min_image(x, p.d, g.box_length());
        return std::exp(I * (p.gamma + dot(p.v, x))) * q(std::sqrt(dot(r, r)));
    });
    return conj_pair(w);
}

// Tangent vectors in slot order: d_alpha W (centered difference of rescaled
// ground states), d_Gamma W = i sigma_3 W, d_{v_k} W = (i x_k w, -i x_k conj w),
// d_{D_k} W = d_{x_k} W (the translation generator).
inline std::array<PairField, 8> tangent_vectors(const SolitonParams& p, const GroundState& gs,
                                                const CartGrid& g) {
    std::array<PairField, 8> t;
    const double da = 1e-4 * p.alpha;
    SolitonParams lo = p, hi = p;
    lo.alpha -= da;
    hi.alpha += da;
    t[kAlpha] = (1.0 / (2 * da)) * (make_soliton(hi, gs, g) - make_soliton(lo, gs, g));
    PairField W = make_soliton(p, gs, g);
    t[kGamma] = i_sigma3(W);
    for (int k = 0; k < 3; ++k) {
        Field xw = W.upper;
        for (std::size_t idx = 0; idx < g.size(); ++idx) xw[idx] *= g.point(idx)[k];
        t[kV1 + k] = {I * xw, -I * conj(xw)};
        // derivative of e^{i v.x} phi(x - D) from the radial profile
        GroundState q = at_alpha(gs, p.alpha);
        Field dw = g.sample([&](const Vec3& x) {
            Vec3 r = min_image(x, p.d, g.box_length());
            double rr = std::sqrt(dot(r, r));
            double dphi = rr > 0 ? q.derivative(rr) * r[k] / rr : 0.0;
            return std::exp(I * (p.gamma + dot(p.v, x))) * (I * p.v[k] * q(rr) + dphi);
        });
        t[kD1 + k] = conj_pair(dw);
    }
    return t;
}

// Xi_alpha = i s3 d_Gamma W, Xi_Gamma = i s3 d_alpha W, Xi_{v_k} = i s3 d_{D_k} W,
// Xi_{D_k} = i s3 d_{v_k} W.
inline std::array<PairField, 8> cotangent_vectors(const std::array<PairField, 8>& t) {
    std::array<PairField, 8> c;
    c[kAlpha] = i_sigma3(t[kGamma]);
    c[kGamma] = i_sigma3(t[kAlpha]);
    for (int k = 0; k < 3; ++k) {
        c[kV1 + k] = i_sigma3(t[kD1 + k]);
        c[kD1 + k] = i_sigma3(t[kV1 + k]);
    }
    return c;
}

// Trigonometric interpolant of f evaluated at a * x along one axis, for every
// line of the grid.
inline Field dilate_axis(const Field& f, const CartGrid& g, int axis, double a) {
    const int n = g.n();
    const double L = g.box_length();
    // E[j][m] = basis mode m evaluated at a * x_j, relative to the box origin.
    std::vector<cplx> E(std::size_t(n) * n);
    for (int j = 0; j < n; ++j) {
        double xj = a * g.coord(j) + 0.5 * L;
        for (int m = 0; m < n; ++m) {
            double k = g.wavenumber(m);
            E[std::size_t(j) * n + m] = m == n / 2 ? cplx(std::cos(k * xj)) : std::exp(I * k * xj);
        }
    }
    // Forward DFT matrix (1/n normalized), x_j relative to box origin.
    std::vector<cplx> Fm(std::size_t(n) * n);
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j) Fm[std::size_t(m) * n + j] = std::exp(-2.0 * pi * I * double(m) * double(j) / double(n)) / double(n);
    // Combined resampling matrix M = E * Fm.
    std::vector<cplx> M(std::size_t(n) * n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) {
            cplx e = E[std::size_t(j) * n + m];
            for (int i = 0; i < n; ++i) M[std::size_t(j) * n + i] += e * Fm[std::size_t(m) * n + i];
        }
    Field out = g.zeros();
    std::vector<cplx> line(n), res(n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            auto idx = [&](int s) {
                return axis == 0 ? g.index(s, p, q) : axis == 1 ? g.index(p, s, q) : g.index(p, q, s);
            };
            for (int s = 0; s < n; ++s) line[s] = f[idx(s)];
            for (int j = 0; j < n; ++j) {
                cplx acc = 0;
                for (int i = 0; i < n; ++i) acc += M[std::size_t(j) * n + i] * line[i];
                res[j] = acc;
            }
            for (int s = 0; s < n; ++s) out[idx(s)] = res[s];
        }
    return out;
}

// Parameters of a symmetry transformation of NLS: phase, boost, shift,
// scaling and the time at which the transformed field is observed.
struct SymmetryTransform {
    double gamma = 0.0;
    Vec3 v{0, 0, 0};
    Vec3 d{0, 0, 0};
    double alpha = 1.0;
    double t = 0.0;
};

// (g f)(x) = e^{i(Gamma + v.x - t|v|^2)} alpha f(alpha (x - 2 t v - D)); f is the
// field at time alpha^2 t. The lower component transforms by conjugation.
inline PairField symmetry_apply(const SymmetryTransform& s, const PairField& f, const CartGrid& g) {
    require(s.alpha > 0, "symmetry_apply: alpha must be positive");
    Vec3 c;
    for (int k = 0; k < 3; ++k) c[k] = 2 * s.t * s.v[k] + s.d[k];
    auto one = [&](const Field& h, double sign) {
        // h(alpha x - alpha c) = (translate by alpha c, then dilate about 0)
        Vec3 ac{s.alpha * c[0], s.alpha * c[1], s.alpha * c[2]};
        Field r = (ac == Vec3{0, 0, 0}) ? h : translate(h, g, ac);
        if (s.alpha != 1.0)
            for (int ax = 0; ax < 3; ++ax) r = dilate_axis(r, g, ax, s.alpha);
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            Vec3 x = g.point(idx);
            r[idx] *= s.alpha * std::exp(sign * I * (s.gamma + dot(s.v, x) - s.t * dot(s.v, s.v)));
        }
        return r;
    };
    return {one(f.upper, 1.0), one(f.lower, -1.0)};
}

// w_pi(t): the soliton with the accumulated phase and position integrals.
inline PairField moving_soliton(const ModulationPath& path, double t, const GroundState& gs, const CartGrid& g) {
    return make_soliton(path.effective(t), gs, g);
}

// ------------------------------------------------------------ radial channels

// Channel slots of the s-wave and the three Cartesian p-waves.
struct ChannelSlots {
    int s = -1;
    std::array<int, 3> p{-1, -1, -1};
};

inline ChannelSlots channel_slots(const ChannelGrid& cg) {
    ChannelSlots sl;
    int np = 0;
    for (int c = 0; c < cg.channels(); ++c) {
        if (cg.ell(c) == 0 && sl.s < 0) sl.s = c;
        if (cg.ell(c) == 1 && np < 3) sl.p[np++] = c;
    }
    return sl;
}

inline const double Y00 = 1.0 / std::sqrt(4 * pi);        // s-wave harmonic
inline const double Y1 = std::sqrt(3.0 / (4 * pi));       // coefficient of x_k / r

// Standing soliton (v = 0, D = 0) in a channel layout: only the s-wave is
// populated.
inline PairField make_soliton(const SolitonParams& p, const GroundState& gs, const ChannelGrid& cg) {
    require(p.is_standing(), "make_soliton: channel layouts hold standing solitons only");
    auto sl = channel_slots(cg);
    require(sl.s >= 0, "make_soliton: layout lacks an s-wave channel");
    GroundState q = at_alpha(gs, p.alpha);
    const cplx ph = std::exp(I * p.gamma);
    Field w = cg.from_profile(sl.s, [&](double r) { return ph * q(r) / Y00; });
    return conj_pair(w);
}

inline std::array<PairField, 8> tangent_vectors(const SolitonParams& p, const GroundState& gs,
                                                const ChannelGrid& cg) {
    require(p.is_standing(), "tangent_vectors: channel layouts hold standing solitons only");
    auto sl = channel_slots(cg);
    require(sl.s >= 0, "tangent_vectors: layout lacks an s-wave channel");
    // Without p-wave channels the v and D directions are not representable
    // and stay zero.
    std::array<PairField, 8> t;
    for (auto& x : t) x = conj_pair(cg.zeros());
    const double da = 1e-4 * p.alpha;
    SolitonParams lo = p, hi = p;
    lo.alpha -= da;
    hi.alpha += da;
    t[kAlpha] = (1.0 / (2 * da)) * (make_soliton(hi, gs, cg) - make_soliton(lo, gs, cg));
    PairField W = make_soliton(p, gs, cg);
    t[kGamma] = i_sigma3(W);
    GroundState q = at_alpha(gs, p.alpha);
    const cplx ph = std::exp(I * p.gamma);
    for (int k = 0; k < 3 && sl.p[2] >= 0; ++k) {
        // x_k w = r phi(r) (x_k / r)
        Field xw = cg.from_profile(sl.p[k], [&](double r) { return ph * r * q(r) / Y1; });
        t[kV1 + k] = {I * xw, -I * conj(xw)};
        Field dw = cg.from_profile(sl.p[k], [&](double r) { return ph * q.derivative(r) / Y1; });
        t[kD1 + k] = conj_pair(dw);
    }
    return t;
}

// 8x8 pairing matrix G(g, f) = <d_f W, Xi_g>.
inline Eigen::Matrix<cplx, 8, 8> frame_gram(const std::array<PairField, 8>& tangent,
                                            const std::array<PairField, 8>& cotangent) {
    Eigen::Matrix<cplx, 8, 8> G;
    for (int gi = 0; gi < 8; ++gi)
        for (int f = 0; f < 8; ++f) G(gi, f) = inner(tangent[f], cotangent[gi]);
    return G;
}

// Tangent and cotangent vectors of a soliton together with the imaginary
// eigenpair when it has been attached.
struct SpectralFrame {
    SolitonParams params;
    std::array<PairField, 8> tangent, cotangent;
    double norm2 = 0.0;  // ||W||^2 of the pair (twice ||w||^2)
    bool has_pair = false;
    double sigma = 0.0;
    PairField f_plus, f_minus;
    // <F+, i s3 F-> and <F-, i s3 F+> of the alpha = 1 pair.
    double kappa_plus = 0.0, kappa_minus = 0.0;
};

template <class Grid>
SpectralFrame tangent_frame(const SolitonParams& p, const GroundState& gs, const Grid& g) {
    SpectralFrame fr;
    fr.params = p;
    fr.tangent = tangent_vectors(p, gs, g);
    fr.cotangent = cotangent_vectors(fr.tangent);
    fr.norm2 = sq(l2_norm(make_soliton(p, gs, g)));
    return fr;
}

}  // namespace soliton_lab
