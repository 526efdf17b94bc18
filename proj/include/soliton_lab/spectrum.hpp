#pragma once

#include <boost/math/tools/minima.hpp>

#include "soliton_lab/linop.hpp"

namespace soliton_lab {

// The eigenpair H F+ = i sigma F+, F+ = (f, conj f), f = a + i b, stored on
// the s-wave of a radial grid as u = r a / Y00 etc. so that grid inner
// products equal integrals over R^3.
struct ImaginaryPair {
    RadialGrid grid;
    double alpha = 1.0;
    double sigma = 0.0;
    std::vector<double> a, b;
    double residual = 0.0;  // ||H F+ - i sigma F+|| / ||F+||
};

namespace detail {

inline Field s_wave(const ChannelGrid& cg, std::span<const double> u, std::span<const double> v, double sign) {
    auto sl = channel_slots(cg);
    require(sl.s >= 0, "s_wave: layout lacks an s-wave channel");
    Field f = cg.zeros();
    auto c = cg.channel(f, sl.s);
    for (int i = 0; i < cg.n_r(); ++i) c[i] = cplx(u[i], sign * v[i]);
    return f;
}

}  // namespace detail

// F+ (plus = true) or F- on the s-wave of cg, unscaled (alpha of the pair).
inline PairField lift_pair(const ImaginaryPair& p, const ChannelGrid& cg, bool plus) {
    require(cg.radial_grid() == p.grid, "lift_pair: radial grid mismatch");
    return conj_pair(detail::s_wave(cg, p.a, p.b, plus ? 1.0 : -1.0));
}

// sigma and F+ from the s-wave block of a standing real H (Gamma = 0).
// With L+ = -A - B and L- = -A + B read off the assembled block
// [[A, B], [-B, -A]], the pair solves L+ a = sigma b, L- b = -sigma a. The
// symmetric S = L-^{1/2} L+ L-^{1/2} has lowest eigenvalue -sigma^2.
inline ImaginaryPair compute_imaginary_pair(const MatrixOperator& H, const ChannelGrid& cg, double alpha = 1.0) {
    const int n = cg.n_r();
    const double h = cg.cell();
    Eigen::MatrixXcd M = H.assemble_radial(0);
    Eigen::MatrixXcd A = M.topLeftCorner(n, n), B = M.topRightCorner(n, n);
    require(A.imag().cwiseAbs().maxCoeff() < 1e-12 && B.imag().cwiseAbs().maxCoeff() < 1e-12,
            "compute_imaginary_pair: H must be real (standing soliton with Gamma = 0)");
    Eigen::MatrixXd Lp = -(A + B).real(), Lm = (B - A).real();
    Lp = 0.5 * (Lp + Lp.transpose());
    Lm = 0.5 * (Lm + Lm.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(Lm);
    Eigen::VectorXd sq_ev = em.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd& Q = em.eigenvectors();
    Eigen::MatrixXd S = sq_ev.asDiagonal() * (Q.transpose() * Lp * Q) * sq_ev.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
    const double lo = es.eigenvalues()(0);
    if (!(lo < -1e-8))
        throw NoImaginaryEigenvalue("compute_imaginary_pair: L-^{1/2} L+ L-^{1/2} has no negative eigenvalue (lowest " +
                                    std::to_string(lo) + ")");
    ImaginaryPair p;
    p.grid = cg.radial_grid();
    p.alpha = alpha;
    p.sigma = std::sqrt(-lo);
    Eigen::VectorXd u = Q * (sq_ev.asDiagonal() * es.eigenvectors().col(0));
    // normalization int a b dx = -1/2, sign a(0) > 0
    Eigen::VectorXd Lu = Lp * u;
    double s = std::sqrt(-p.sigma / (2.0 * h * u.dot(Lu)));
    if (u(0) < 0) s = -s;
    Eigen::VectorXd a = s * u, b = (s / p.sigma) * Lu;
    p.a.assign(a.data(), a.data() + n);
    p.b.assign(b.data(), b.data() + n);

    PairField F = lift_pair(p, cg, true);
    PairField r = H.apply(F);
    r.axpy(-I * p.sigma, F);
    p.residual = l2_norm(r) / l2_norm(F);
    return p;
}

// Convenience: the pair of H(W) for the standing soliton of gs on rg.
inline ImaginaryPair compute_imaginary_pair(const GroundState& gs, const RadialGrid& rg) {
    ChannelGrid cg = ChannelGrid::radial(rg);
    SolitonParams p{gs.alpha};
    auto H = build_matrix_hamiltonian(make_soliton(p, gs, cg), p, cg);
    return compute_imaginary_pair(H, cg, gs.alpha);
}

// Radial grid matched to scale alpha: the alpha = 1 grid shrunk by 1/alpha.
inline RadialGrid scaled_grid(const RadialGrid& g, double alpha) {
    require(alpha > 0, "scaled_grid: alpha must be positive");
    return RadialGrid(g.r_max() / alpha, g.n());
}

// <F+, i s3 F-> (plus = true) or <F-, i s3 F+> of a pair.
inline double pair_kappa(const ImaginaryPair& p, bool plus) {
    ChannelGrid cg = ChannelGrid::radial(p.grid);
    PairField Fp = lift_pair(p, cg, true), Fm = lift_pair(p, cg, false);
    return plus ? inner(Fp, i_sigma3(Fm)).real() : inner(Fm, i_sigma3(Fp)).real();
}

// Attach F+-(W) = e^{i(v.x + Gamma) s3} e^{-D.grad} Dil_alpha F+-(1), with
// Dil_a f = a^3 f(a x), to a frame; unit is the alpha = 1 pair.
inline void attach_pair(SpectralFrame& fr, const ImaginaryPair& unit, const ChannelGrid& cg) {
    require(unit.alpha == 1.0, "attach_pair: expects the alpha = 1 pair");
    require(fr.params.is_standing(), "attach_pair: channel layouts hold standing solitons only");
    const double al = fr.params.alpha;
    const cplx ph = std::exp(I * fr.params.gamma);
    std::vector<cplx> ua(unit.a.begin(), unit.a.end()), ub(unit.b.begin(), unit.b.end());
    SpectralRadialFunction fa(unit.grid, ua), fb(unit.grid, ub);
    const auto& rg = cg.radial_grid();
    // u -> alpha^2 u(alpha r), evaluated through the spectral interpolant
    auto one = [&](double sign) {
        return conj_pair(cg.from_profile(channel_slots(cg).s, [&](double r) {
            return ph * al * al * (fa.u(al * r).real() + sign * I * fb.u(al * r).real()) / r;
        }));
    };
    require(channel_slots(cg).s >= 0 && rg.r_max() > 0, "attach_pair: layout lacks an s-wave channel");
    fr.f_plus = one(1.0);
    fr.f_minus = one(-1.0);
    fr.sigma = al * al * unit.sigma;
    fr.kappa_plus = pair_kappa(unit, true);
    fr.kappa_minus = pair_kappa(unit, false);
    fr.has_pair = true;
}

inline void attach_pair(SpectralFrame& fr, const ImaginaryPair& unit, const CartGrid& g) {
    require(unit.alpha == 1.0, "attach_pair: expects the alpha = 1 pair");
    std::vector<cplx> ua(unit.a.begin(), unit.a.end()), ub(unit.b.begin(), unit.b.end());
    SpectralRadialFunction fa(unit.grid, ua), fb(unit.grid, ub);
    const auto& p = fr.params;
    const double al = p.alpha, a3 = al * al * al;
    auto one = [&](double sign) {
        Field f = g.sample([&](const Vec3& x) {
            Vec3 r = min_image(x, p.d, g.box_length());
            double rr = al * std::sqrt(dot(r, r));
            cplx val = (fa(rr).real() + sign * I * fb(rr).real()) * Y00;
            return a3 * std::exp(I * (p.gamma + dot(p.v, x))) * val;
        });
        return conj_pair(f);
    };
    fr.f_plus = one(1.0);
    fr.f_minus = one(-1.0);
    fr.sigma = al * al * unit.sigma;
    fr.kappa_plus = pair_kappa(unit, true);
    fr.kappa_minus = pair_kappa(unit, false);
    fr.has_pair = true;
}

template <class Grid>
SpectralFrame spectral_frame(const SolitonParams& p, const GroundState& gs, const Grid& g, const ImaginaryPair& unit) {
    SpectralFrame fr = tangent_frame(p, gs, g);
    attach_pair(fr, unit, g);
    return fr;
}

// ------------------------------------------------------ generalized kernel

struct ChainResidual {
    std::string relation;
    double residual = 0.0;  // relative to the norm of the leading term
};

// Primal chain H d_Gamma W = 0, H d_alpha W = -2i alpha d_Gamma W,
// H d_{D_k} W = 0, H d_{v_k} W = 2i d_{D_k} W and the adjoint chain
// H* Xi_alpha = 0, H* Xi_Gamma = -2i alpha Xi_alpha, H* Xi_{v_k} = 0,
// H* Xi_{D_k} = 2i Xi_{v_k}.
inline std::vector<ChainResidual> generalized_nullspace_check(const SpectralFrame& fr, const MatrixOperator& H) {
    const double al = fr.params.alpha;
    const auto& T = fr.tangent;
    const auto& X = fr.cotangent;
    std::vector<ChainResidual> out;
    auto rel = [&](std::string name, const PairField& lhs, const PairField* rhs, cplx c, double scale) {
        PairField r = lhs;
        if (rhs) r.axpy(-c, *rhs);
        out.push_back({std::move(name), l2_norm(r) / scale});
    };
    const double nG = l2_norm(T[kGamma]);
    rel("H dGamma W = 0", H.apply(T[kGamma]), nullptr, 0.0, nG);
    rel("H dalpha W = -2i alpha dGamma W", H.apply(T[kAlpha]), &T[kGamma], -2.0 * I * al, 2 * al * nG);
    for (int k = 0; k < 3; ++k) {
        const std::string s = std::to_string(k + 1);
        rel("H dD" + s + " W = 0", H.apply(T[kD1 + k]), nullptr, 0.0, l2_norm(T[kD1 + k]));
        rel("H dv" + s + " W = 2i dD" + s + " W", H.apply(T[kV1 + k]), &T[kD1 + k], 2.0 * I,
            2 * l2_norm(T[kD1 + k]));
    }
    rel("H* Xi_alpha = 0", H.apply_adjoint(X[kAlpha]), nullptr, 0.0, l2_norm(X[kAlpha]));
    rel("H* Xi_Gamma = -2i alpha Xi_alpha", H.apply_adjoint(X[kGamma]), &X[kAlpha], -2.0 * I * al,
        2 * al * l2_norm(X[kAlpha]));
    for (int k = 0; k < 3; ++k) {
        const std::string s = std::to_string(k + 1);
        rel("H* Xi_v" + s + " = 0", H.apply_adjoint(X[kV1 + k]), nullptr, 0.0, l2_norm(X[kV1 + k]));
        rel("H* Xi_D" + s + " = 2i Xi_v" + s, H.apply_adjoint(X[kD1 + k]), &X[kV1 + k], 2.0 * I,
            2 * l2_norm(X[kV1 + k]));
    }
    return out;
}

// Eigenvalues of the assembled sector block of a matrix operator.
inline Eigen::VectorXcd sector_eigenvalues(const MatrixOperator& H, int ell) {
    Eigen::MatrixXcd M = H.assemble_radial(ell);
    if (M.imag().cwiseAbs().maxCoeff() == 0.0) return Eigen::EigenSolver<Eigen::MatrixXd>(M.real(), false).eigenvalues();
    return Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(M, false).eigenvalues();
}

// ------------------------------------------------------------- certificate

namespace detail {

// Weighted resolvent norm ||w (L - lambda)^{-1} w|| for L = -d^2/dr^2 +
// ell(ell+1)/r^2 + 1 + V(r) on u = r f, lambda = 1 - eps, with w = (1 + r^2)^{-1}
// and the exact decaying exterior solution closing the grid at r_max.
template <class Pot>
double edge_resolvent_norm(Pot&& V, int ell, double eps, double r_max, int n) {
    const double h = r_max / n, kap = std::sqrt(eps);
    auto ext = [&](double r) {  // r k_ell(kappa r) up to constants
        double e = std::exp(-kap * (r - r_max));
        return ell == 0 ? e : e * (1 + 1 / (kap * r));
    };
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double r = (i + 1) * h;
        A(i, i) = 2 / (h * h) + ell * (ell + 1) / (r * r) + eps + V(r);
        if (i > 0) A(i, i - 1) = A(i - 1, i) = -1 / (h * h);
    }
    A(n - 1, n - 1) -= ext(r_max + h) / ext(r_max) / (h * h);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = 1 / (1 + sq((i + 1) * h));
    Eigen::MatrixXd G = A.ldlt().solve(Eigen::MatrixXd(w.asDiagonal()));
    G = w.asDiagonal() * G;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Smallest singular value by inverse power iteration on (M^* M)^{-1}.
inline double min_singular_value(const Eigen::MatrixXcd& M, int iters = 30) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(M.rows()).normalized();
    double s = 0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXcd y = lu.solve(x);
        Eigen::VectorXcd z = lu.adjoint().solve(y);
        double nz = z.norm();
        double s_new = 1.0 / std::sqrt(nz);
        x = z / nz;
        if (it > 3 && std::abs(s_new - s) < 1e-6 * s_new) {
            s = s_new;
            break;
        }
        s = s_new;
    }
    return s;
}

}  // namespace detail

struct ScanPoint {
    int ell = 0;
    double lambda = 0.0;
    double smin = 0.0;
};

struct CertificateOptions {
    int l_max = 4;
    double lambda_max = 5.0;
    RadialGrid grid{};             // eigenvalue lists
    RadialGrid scan_grid{30.0, 300};  // embedded scan
    double zero_tol = 1e-4;
    double edge_threshold = 0.25;
    std::vector<double> edge_eps{1e-2, 1e-3, 1e-4};
    int edge_n = 800;
    double cap_strength = 2.0;
    double cap_start = 0.6;  // fraction of r_max where the absorber starts
    int scan_points = 41;
    double refine_below = 0.1;
    double dip_threshold = 1e-3;
};

struct SpectralCertificate {
    std::vector<std::pair<int, double>> l_plus_in_window, l_minus_in_window;  // (ell, lambda) in (0, 1]
    std::vector<std::pair<int, double>> l_plus_zero_modes, l_minus_zero_modes;
    std::vector<double> edge_norms_plus, edge_norms_minus;
    double edge_indicator = 0.0;
    std::vector<ScanPoint> embedded_scan, embedded_dips;
    double sigma = 0.0;
    bool verdict = false;
    CertificateOptions options;
};

// Dense L+- eigenvalues per sector, an s/p-wave threshold-resonance
// indicator, and an absorbing-potential scan of H for real eigenvalues
// embedded in (1, lambda_max].
inline std::vector<ScanPoint> embedded_scan(const MatrixOperator& H, const RadialGrid& rg, int l_max,
                                            const CertificateOptions& opt, std::vector<ScanPoint>* dips) {
    const int n = rg.n();
    const double r0 = opt.cap_start * rg.r_max();
    std::vector<ScanPoint> out;
    for (int ell = 0; ell <= l_max; ++ell) {
        Eigen::MatrixXcd M = H.assemble_radial(ell);
        for (int i = 0; i < n; ++i) {
            double r = rg.node(i);
            double w = r > r0 ? sq((r - r0) / (rg.r_max() - r0)) : 0.0;
            M(i, i) -= I * opt.cap_strength * w;
            M(n + i, n + i) -= I * opt.cap_strength * w;
        }
        auto smin = [&](double lam) {
            Eigen::MatrixXcd A = M;
            A.diagonal().array() -= lam;
            return detail::min_singular_value(A);
        };
        std::vector<ScanPoint> row;
        for (int j = 0; j < opt.scan_points; ++j) {
            double lam = 1.0 + (opt.lambda_max - 1.0) * (j + 1) / opt.scan_points;
            row.push_back({ell, lam, smin(lam)});
        }
        const double dl = (opt.lambda_max - 1.0) / opt.scan_points;
        for (std::size_t j = 0; j < row.size(); ++j) {
            bool left = j == 0 || row[j].smin <= row[j - 1].smin;
            bool right = j + 1 == row.size() || row[j].smin <= row[j + 1].smin;
            if (!(left && right) || row[j].smin > opt.refine_below) continue;
            double a = std::max(1.0, row[j].lambda - dl), b = std::min(opt.lambda_max, row[j].lambda + dl);
            auto [lam, val] = boost::math::tools::brent_find_minima(smin, a, b, 30);
            if (dips && val < opt.dip_threshold) dips->push_back({ell, lam, val});
        }
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

inline SpectralCertificate verify_spectral_assumption(const GroundState& gs1, const CertificateOptions& opt = {}) {
    require(opt.l_max >= 0 && opt.lambda_max > 1.0, "verify_spectral_assumption: need l_max >= 0, lambda_max > 1");
    GroundState gs = at_alpha(gs1, 1.0);
    SpectralCertificate c;
    c.options = opt;

    for (int sign : {1, -1}) {
        for (int ell = 0; ell <= opt.l_max; ++ell) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scalar_L_matrix(sign, gs, opt.grid, ell),
                                                              Eigen::EigenvaluesOnly);
            for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
                double l = es.eigenvalues()(k);
                if (l > 1.0) break;
                auto& zero = sign > 0 ? c.l_plus_zero_modes : c.l_minus_zero_modes;
                auto& win = sign > 0 ? c.l_plus_in_window : c.l_minus_in_window;
                if (std::abs(l) < opt.zero_tol)
                    zero.push_back({ell, l});
                else if (l > 0.0)
                    win.push_back({ell, l});
            }
        }
    }

    // Threshold resonance: ||w (L - (1 - eps))^{-1} w|| ~ eps^{-1/2} if
    // present, bounded otherwise; indicator is minus the fitted log-log slope.
    const double r_edge = std::max(40.0, opt.grid.r_max());
    std::vector<double> le;
    for (double e : opt.edge_eps) le.push_back(std::log(e));
    for (int sign : {1, -1}) {
        const double cc = sign > 0 ? 3.0 : 1.0;
        for (int ell = 0; ell <= std::min(1, opt.l_max); ++ell) {
            std::vector<double> ln;
            for (double e : opt.edge_eps) {
                double nv = detail::edge_resolvent_norm([&](double r) { return -cc * sq(gs(r)); }, ell, e, r_edge,
                                                        opt.edge_n);
                if (ell == 0) (sign > 0 ? c.edge_norms_plus : c.edge_norms_minus).push_back(nv);
                ln.push_back(std::log(nv));
            }
            c.edge_indicator = std::max(c.edge_indicator, -fit_slope(le, ln));
        }
    }

    ChannelGrid sg = ChannelGrid::radial(opt.scan_grid);
    auto H = build_reference_hamiltonian(gs, sg);
    c.embedded_scan = embedded_scan(H, opt.scan_grid, opt.l_max, opt, &c.embedded_dips);

    c.sigma = compute_imaginary_pair(gs, opt.grid).sigma;
    c.verdict = c.l_plus_in_window.empty() && c.l_minus_in_window.empty() &&
                c.edge_indicator < opt.edge_threshold && c.embedded_dips.empty();
    return c;
}

}  // namespace soliton_lab
