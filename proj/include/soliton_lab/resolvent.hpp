#pragma once

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "soliton_lab/evolve.hpp"
#include "soliton_lab/lorentz.hpp"
#include "soliton_lab/spectrum.hpp"

namespace soliton_lab {

// ------------------------------------------------------------ free kernels

// k with k^2 = zeta and Im k >= 0. On the cut zeta > 0 the sign is the limit
// from Im zeta > 0 (above) or Im zeta < 0 (below).
inline cplx outgoing_root(cplx zeta, bool from_above) {
    cplx k = std::sqrt(zeta);
    if (k.imag() < 0) k = -k;
    if (k.imag() == 0.0 && zeta.real() > 0) k = from_above ? std::abs(k) : -std::abs(k);
    return k;
}

// (H0 - z)^{-1}(x, y) as a function of |x - y|, boundary values taken from
// the lower half-plane. Scalar H0 = -Delta: e^{ik d} / (4 pi d), k^2 = z.
// Matrix H0 = diag(Delta - mu, -Delta + mu):
// diag(-e^{i k1 d}, e^{i k2 d}) / (4 pi d) with k1^2 = -mu - z, k2^2 = z - mu.
struct FreeResolvent {
    cplx z;
    bool matrix = false;
    double mu = 1.0;

    cplx k_upper() const { return outgoing_root(-mu - z, true); }
    cplx k_lower() const { return outgoing_root(matrix ? z - mu : z, false); }

    cplx scalar(double d) const { return std::exp(I * k_lower() * d) / (4 * pi * d); }
    std::array<cplx, 2> diagonal(double d) const {
        return {-std::exp(I * k_upper() * d) / (4 * pi * d), std::exp(I * k_lower() * d) / (4 * pi * d)};
    }
};

inline FreeResolvent free_resolvent_kernel(cplx z) { return {z, false, 0.0}; }
inline FreeResolvent free_resolvent_kernel(cplx z, double mu) { return {z, true, mu}; }

namespace detail {

// Spherical Bessel j_ell for ell <= 1 at complex x.
inline cplx sph_j(int ell, cplx x) {
    if (ell == 0) return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    if (std::abs(x) < 0.1) {
        cplx x2 = x * x;
        return x / 3.0 * (1.0 - x2 / 10.0 + x2 * x2 / 280.0 - x2 * x2 * x2 / 15120.0);
    }
    return std::sin(x) / (x * x) - std::cos(x) / x;
}

}  // namespace detail

// Partial-wave kernel of (-d^2/dr^2 + ell(ell+1)/r^2 - k^2)^{-1} on u = r f,
// G(r, s) = A(r<) B(r>) with (ell = 0) A = sin(kx)/k, B = e^{ikx} and
// (ell = 1) A = x j1(kx)/k, B = e^{ikx}(1 - ikx)/x.
struct PartialWave {
    int ell = 0;
    cplx k;

    PartialWave(int l, cplx kk) : ell(l), k(kk) { require(l == 0 || l == 1, "PartialWave: ell must be 0 or 1"); }

    cplx A(double x) const {
        if (std::abs(k * x) < 1e-8) return ell == 0 ? cplx(x) : cplx(x * x / 3.0);
        return ell == 0 ? std::sin(k * x) / k : x * detail::sph_j(1, k * x) / k;
    }
    cplx B(double x) const {
        cplx e = std::exp(I * k * x);
        return ell == 0 ? e : e * (1.0 - I * k * x) / x;
    }
    cplx operator()(double r, double s) const { return A(std::min(r, s)) * B(std::max(r, s)); }
};

// Gauss-Legendre panels on [0, r_max] with per-panel cumulative integration
// matrices, so the kink of G on the diagonal is integrated to full order.
class PanelGrid {
public:
    PanelGrid(double r_max = 8.0, int panels = 16, int order = 10) : r_max_(r_max), panels_(panels), p_(order) {
        require(r_max > 0 && panels >= 1 && order >= 2, "PanelGrid: need r_max > 0, panels >= 1, order >= 2");
        // Golub-Welsch
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(p_, p_);
        for (int k = 1; k < p_; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        t_ = es.eigenvalues();
        w_ = 2 * es.eigenvectors().row(0).array().square().transpose();
        // Legendre Vandermonde and running integrals int_{-1}^{t_a} P_k
        Eigen::MatrixXd P(p_, p_ + 1), S(p_, p_);
        for (int a = 0; a < p_; ++a) {
            P(a, 0) = 1;
            P(a, 1) = t_(a);
            for (int k = 1; k < p_; ++k) P(a, k + 1) = ((2 * k + 1) * t_(a) * P(a, k) - k * P(a, k - 1)) / (k + 1);
            S(a, 0) = t_(a) + 1;
            for (int k = 1; k < p_; ++k) S(a, k) = (P(a, k + 1) - P(a, k - 1)) / (2 * k + 1);
        }
        Eigen::MatrixXd V = P.leftCols(p_);
        cum_ = S * V.inverse();
    }

    int size() const { return panels_ * p_; }
    int order() const { return p_; }
    double r_max() const { return r_max_; }
    double half_width() const { return 0.5 * r_max_ / panels_; }
    int panel(int i) const { return i / p_; }
    double node(int i) const { return (2 * (i / p_) + 1 + t_(i % p_)) * half_width(); }
    double weight(int i) const { return w_(i % p_) * half_width(); }
    std::vector<double> nodes() const {
        std::vector<double> r(size());
        for (int i = 0; i < size(); ++i) r[i] = node(i);
        return r;
    }
    // int over [panel start, node a] of the interpolant through the panel's
    // nodes, weight on node b (both local indices)
    double left(int a, int b) const { return cum_(a, b) * half_width(); }
    double right(int a, int b) const { return (w_(b) - cum_(a, b)) * half_width(); }

private:
    double r_max_;
    int panels_, p_;
    Eigen::VectorXd t_, w_;
    Eigen::MatrixXd cum_;
};

// (G f)(r_i) = int_0^R G(r_i, s) f(s) ds as a matrix on the panel nodes.
inline Eigen::MatrixXcd partial_wave_matrix(const PanelGrid& g, const PartialWave& G) {
    const int n = g.size(), p = g.order();
    Eigen::MatrixXcd K(n, n);
    for (int i = 0; i < n; ++i) {
        const double ri = g.node(i);
        const cplx Ai = G.A(ri), Bi = G.B(ri);
        for (int j = 0; j < n; ++j) {
            const double rj = g.node(j);
            if (g.panel(j) != g.panel(i)) {
                K(i, j) = g.weight(j) * G(ri, rj);
            } else {
                const int a = i % p, b = j % p;
                K(i, j) = g.left(a, b) * G.A(rj) * Bi + g.right(a, b) * Ai * G.B(rj);
            }
        }
    }
    return K;
}

// ------------------------------------------------------------- potentials

enum class PotentialKind { ScalarReal, ScalarComplex, Matrix };

inline const char* to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::ScalarReal: return "scalar-real";
        case PotentialKind::ScalarComplex: return "scalar-complex";
        case PotentialKind::Matrix: return "matrix";
    }
    return "?";
}

// Radial potential on the nodes of `grid` (its support), one partial wave.
// Scalar: H = -Delta + V. Matrix: H = diag(Delta - mu, -Delta + mu) +
// [[w1, w2], [-conj w2, -w1]].
struct PotentialSpec {
    PotentialKind kind = PotentialKind::ScalarReal;
    PanelGrid grid;
    int ell = 0;
    std::vector<cplx> v;
    std::vector<double> w1;
    std::vector<cplx> w2;
    double mu = 1.0;

    int block() const { return kind == PotentialKind::Matrix ? 2 : 1; }

    template <class Fn>
    static PotentialSpec scalar(PanelGrid g, Fn&& fn, int ell = 0) {
        PotentialSpec p;
        p.grid = g;
        p.ell = ell;
        bool real = true;
        for (double r : g.nodes()) {
            cplx x = fn(r);
            real = real && x.imag() == 0.0;
            p.v.push_back(x);
        }
        p.kind = real ? PotentialKind::ScalarReal : PotentialKind::ScalarComplex;
        return p;
    }

    template <class F1, class F2>
    static PotentialSpec matrix(PanelGrid g, F1&& w1, F2&& w2, double mu, int ell = 0) {
        PotentialSpec p;
        p.kind = PotentialKind::Matrix;
        p.grid = g;
        p.ell = ell;
        p.mu = mu;
        for (double r : g.nodes()) {
            p.w1.push_back(w1(r));
            p.w2.push_back(w2(r));
        }
        return p;
    }
};

// V = -c on r < radius.
inline PotentialSpec square_well(double c, double radius = 1.0, int panels = 2, int ell = 0) {
    return PotentialSpec::scalar(PanelGrid(radius, panels, 10), [c](double) { return cplx(-c); }, ell);
}

// The linearization around W = e^{i Gamma} phi_alpha, cut off at r_max.
inline PotentialSpec soliton_matrix_potential(const GroundState& gs, double r_max = 12.0, int panels = 12,
                                              int ell = 0) {
    auto phi2 = [&gs](double r) { return sq(gs(r)); };
    return PotentialSpec::matrix(
        PanelGrid(r_max, panels, 10), [&](double r) { return 2 * phi2(r); }, [&](double r) { return cplx(phi2(r)); },
        sq(gs.alpha), ell);
}

// V = V1 V2 per node: scalar V1 = |V|^{1/2} sgn V, V2 = |V|^{1/2}; matrix
// V2 = (s3 V)^{1/2} (principal root of the selfadjoint [[w1, w2],
// [conj w2, w1]]) and V1 = s3 V2.
struct Factorization {
    int d = 1;
    std::vector<Eigen::MatrixXcd> v1, v2;
};

inline Factorization factorize(const PotentialSpec& V) {
    Factorization f;
    f.d = V.block();
    const int n = V.grid.size();
    for (int i = 0; i < n; ++i) {
        if (V.kind != PotentialKind::Matrix) {
            cplx x = V.v[i];
            double m = std::sqrt(std::abs(x));
            cplx sgn = std::abs(x) > 0 ? x / std::abs(x) : cplx(1.0);
            f.v1.push_back(Eigen::MatrixXcd::Constant(1, 1, m * sgn));
            f.v2.push_back(Eigen::MatrixXcd::Constant(1, 1, m));
        } else {
            Eigen::Matrix2cd S;
            S << V.w1[i], V.w2[i], std::conj(V.w2[i]), V.w1[i];
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(S);
            Eigen::Vector2cd rt;
            for (int j = 0; j < 2; ++j) rt(j) = std::sqrt(cplx(es.eigenvalues()(j)));
            Eigen::Matrix2cd R = es.eigenvectors() * rt.asDiagonal() * es.eigenvectors().adjoint();
            Eigen::Matrix2cd s3 = Eigen::Vector2cd(1.0, -1.0).asDiagonal();
            f.v1.push_back(s3 * R);
            f.v2.push_back(R);
        }
    }
    return f;
}

// max_i |V1 V2 - V| at the nodes.
inline double factorization_defect(const PotentialSpec& V, const Factorization& f) {
    double e = 0.0;
    for (int i = 0; i < V.grid.size(); ++i) {
        Eigen::MatrixXcd P = f.v1[i] * f.v2[i], T(f.d, f.d);
        if (f.d == 1) {
            T(0, 0) = V.v[i];
        } else {
            T << V.w1[i], V.w2[i], -std::conj(V.w2[i]), -V.w1[i];
        }
        e = std::max(e, (P - T).cwiseAbs().maxCoeff());
    }
    return e;
}

// Free resolvent on the support nodes, block-diagonal in the matrix case.
inline Eigen::MatrixXcd resolvent_matrix(const PotentialSpec& V, cplx z) {
    if (V.block() == 1) return partial_wave_matrix(V.grid, PartialWave(V.ell, outgoing_root(z, false)));
    const int n = V.grid.size();
    Eigen::MatrixXcd K1 = partial_wave_matrix(V.grid, PartialWave(V.ell, outgoing_root(-V.mu - z, true)));
    Eigen::MatrixXcd K2 = partial_wave_matrix(V.grid, PartialWave(V.ell, outgoing_root(z - V.mu, false)));
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            G(2 * i, 2 * j) = -K1(i, j);
            G(2 * i + 1, 2 * j + 1) = K2(i, j);
        }
    return G;
}

// T(z) = i V2 R0(z) V1 on the support nodes, conjugated by the square root
// of the quadrature weights so that matrix norms approximate L^2 norms.
inline Eigen::MatrixXcd birman_schwinger(const PotentialSpec& V, const Factorization& f, cplx z) {
    const int n = V.grid.size(), d = f.d;
    Eigen::MatrixXcd G = resolvent_matrix(V, z);
    for (int i = 0; i < n; ++i) G.middleRows(d * i, d) *= std::sqrt(V.grid.weight(i));
    for (int j = 0; j < n; ++j) G.middleCols(d * j, d) /= std::sqrt(V.grid.weight(j));
    for (int i = 0; i < n; ++i) G.middleRows(d * i, d) = f.v2[i] * G.middleRows(d * i, d);
    for (int j = 0; j < n; ++j) G.middleCols(d * j, d) = G.middleCols(d * j, d) * f.v1[j];
    return I * G;
}

inline Eigen::MatrixXcd birman_schwinger(const PotentialSpec& V, cplx z) {
    return birman_schwinger(V, factorize(V), z);
}

// Smallest singular value of I - i T(z) = I + V2 R0(z) V1.
inline double exceptional_indicator(const PotentialSpec& V, const Factorization& f, cplx z) {
    Eigen::MatrixXcd M = -I * birman_schwinger(V, f, z);
    M += Eigen::MatrixXcd::Identity(M.rows(), M.cols());
    return detail::min_singular_value(M, 60);
}

// Smallest c > 0 for which c V has an exceptional value at z = 0, i.e.
// -1/c is a real eigenvalue of V2 R0(0) V1.
inline double critical_coupling(const PotentialSpec& shape) {
    Eigen::MatrixXcd K = -I * birman_schwinger(shape, cplx(0.0));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(K, false);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        cplx m = es.eigenvalues()(i);
        if (m.real() < 0 && std::abs(m.imag()) < 1e-10 * std::abs(m)) best = std::min(best, -1.0 / m.real());
    }
    if (!std::isfinite(best)) throw NoSignChange("critical_coupling: no attractive channel");
    return best;
}

// ------------------------------------------------------------------ scans

struct ScanRegion {
    double re_min = -2, re_max = 2, im_min = -2, im_max = 2;
    int n_re = 41, n_im = 41;  // Im z = 0 rows use lower-half-plane boundary values
};

struct ExceptionalSample {
    cplx z;
    double smin = 0.0;
};

struct ExceptionalScan {
    std::vector<ExceptionalSample> samples;
    std::vector<ExceptionalSample> flagged;  // refined local minima below flag_below
    double refine_below = 0.1, flag_below = 1e-4;
};

namespace detail {

inline ExceptionalSample refine_dip(const PotentialSpec& V, const Factorization& f, cplx z0, double dre,
                                    double dim, bool on_axis) {
    cplx z = z0;
    double val = exceptional_indicator(V, f, z);
    for (int sweep = 0; sweep < 4 && val > 1e-14; ++sweep) {
        auto [x, fx] = boost::math::tools::brent_find_minima(
            [&](double x) { return exceptional_indicator(V, f, cplx(x, z.imag())); }, z.real() - dre,
            z.real() + dre, 40);
        if (fx < val) {
            z = cplx(x, z.imag());
            val = fx;
        }
        if (on_axis) break;
        auto [y, fy] = boost::math::tools::brent_find_minima(
            [&](double y) { return exceptional_indicator(V, f, cplx(z.real(), y)); }, z.imag() - dim,
            z.imag() + dim, 40);
        if (fy < val) {
            z = cplx(z.real(), y);
            val = fy;
        }
        dre *= 0.5;
        dim *= 0.5;
    }
    return {z, val};
}

}  // namespace detail

// Grid scan of the indicator with dip refinement. Local minima of the
// sampled indicator below refine_below are refined by alternating Brent
// searches in Re z and Im z; refined values below flag_below are flagged.
inline ExceptionalScan scan_exceptional(const PotentialSpec& V, const ScanRegion& reg, double refine_below = 0.1,
                                        double flag_below = 1e-4) {
    require(reg.n_re >= 2 && reg.n_im >= 1, "scan_exceptional: need n_re >= 2 and n_im >= 1");
    Factorization f = factorize(V);
    ExceptionalScan out;
    out.refine_below = refine_below;
    out.flag_below = flag_below;
    const double dre = (reg.re_max - reg.re_min) / (reg.n_re - 1);
    const double dim = reg.n_im > 1 ? (reg.im_max - reg.im_min) / (reg.n_im - 1) : 0.0;
    std::vector<double> ims;
    for (int j = 0; j < reg.n_im; ++j) ims.push_back(reg.im_min + j * dim);
    std::vector<double> vals(std::size_t(reg.n_re) * ims.size());
    std::vector<cplx> zs(vals.size());
    for (std::size_t j = 0; j < ims.size(); ++j)
        for (int i = 0; i < reg.n_re; ++i) zs[j * reg.n_re + i] = cplx(reg.re_min + i * dre, ims[j]);
    parallel_for(zs.size(), [&](std::size_t k) { vals[k] = exceptional_indicator(V, f, zs[k]); });
    for (std::size_t k = 0; k < zs.size(); ++k) out.samples.push_back({zs[k], vals[k]});

    auto is_min = [&](int i, int j) {
        double v = vals[j * reg.n_re + i];
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                int ii = i + di, jj = j + dj;
                if ((di || dj) && ii >= 0 && ii < reg.n_re && jj >= 0 && jj < int(ims.size()) &&
                    vals[jj * reg.n_re + ii] < v)
                    return false;
            }
        return true;
    };
    for (std::size_t j = 0; j < ims.size(); ++j)
        for (int i = 0; i < reg.n_re; ++i) {
            if (vals[j * reg.n_re + i] >= refine_below || !is_min(i, int(j))) continue;
            auto dip = detail::refine_dip(V, f, zs[j * reg.n_re + i], dre, dim > 0 ? dim : dre, dim == 0.0);
            if (dip.smin >= flag_below) continue;
            bool dup = false;
            for (const auto& q : out.flagged) dup = dup || std::abs(q.z - dip.z) < 1e-6 * (1 + std::abs(q.z));
            if (!dup) out.flagged.push_back(dip);
        }
    return out;
}

// ---------------------------------------------------- dispersive integral

struct DispersiveCheck {
    std::vector<double> t, weak_l6, sup_norm, running;  // running = int_0^t ||e^{itH0} f||_{L^{6,inf}}
    std::vector<double> dyadic;                         // 2^n sup_{[2^n, 2^{n+1})} ||.||_{L^{6,inf}}
    int dyadic_first = 0;
    double input_norm = 0.0;                            // ||f||_{L^{6/5,1}}
    double ratio = 0.0;                                 // running(T) / input_norm
};

// Free evolution of an s-wave field on a radial box (exact sine-transform
// propagator), sampled every dt on [0, T]; the running integral is the
// trapezoid rule.
inline DispersiveCheck dispersive_integral_check(const Field& f, const ChannelGrid& cg, double T, double dt,
                                                 int dyadic_first = -3) {
    require_s_wave(cg);
    require(T > 0 && dt > 0, "dispersive_integral_check: need T > 0 and dt > 0");
    DispersiveCheck out;
    out.dyadic_first = dyadic_first;
    out.input_norm = lorentz_norm(f, cg, 1.2, 1.0);
    const auto r = cg.radial_grid().nodes();
    const int steps = int(std::ceil(T / dt - 1e-9));
    Field psi = f;
    for (int s = 0; s <= steps; ++s) {
        const double t = s * T / steps;
        if (s > 0) psi = free_step(psi, cg, T / steps);
        double sup = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) sup = std::max(sup, std::abs(psi[i]) / (std::sqrt(4 * pi) * r[i]));
        out.t.push_back(t);
        out.weak_l6.push_back(lorentz_norm(psi, cg, 6.0, std::numeric_limits<double>::infinity()));
        out.sup_norm.push_back(sup);
        double run = out.running.empty()
                         ? 0.0
                         : out.running.back() + 0.5 * (T / steps) * (out.weak_l6[s] + out.weak_l6[s - 1]);
        out.running.push_back(run);
    }
    for (int n = dyadic_first;; ++n) {
        const double a = std::ldexp(1.0, n), b = 2 * a;
        if (a > T) break;
        double m = 0.0;
        for (std::size_t i = 0; i < out.t.size(); ++i)
            if (out.t[i] >= a && out.t[i] < b) m = std::max(m, out.weak_l6[i]);
        out.dyadic.push_back(a * m);
    }
    out.ratio = out.input_norm > 0 ? out.running.back() / out.input_norm : 0.0;
    return out;
}

}  // namespace soliton_lab
