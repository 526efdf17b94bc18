#pragma once

#include <memory>

#include "soliton_lab/spectrum.hpp"

namespace soliton_lab {

enum class Projection { Zero, Plus, Minus, Continuous };

inline const char* to_string(Projection p) {
    switch (p) {
        case Projection::Zero: return "0";
        case Projection::Plus: return "+";
        case Projection::Minus: return "-";
        case Projection::Continuous: return "c";
    }
    return "?";
}

// Riesz projections of H(W):
//   P0 f = sum_{f,g} d_f W (G^{-1})_{fg} <f, Xi_g>,  G_{gf} = <d_f W, Xi_g>,
//   P+- f = alpha^{-3} kappa+-^{-1} <f, i s3 F-+> F+-,
//   Pc = 1 - P0 - P+ - P-.
class ProjectionSet {
public:
    explicit ProjectionSet(SpectralFrame fr) : fr_(std::make_shared<const SpectralFrame>(std::move(fr))) {
        require(fr_->has_pair, "ProjectionSet: frame needs the imaginary pair");
        Eigen::Matrix<cplx, 8, 8> G = frame_gram(fr_->tangent, fr_->cotangent);
        // directions the layout cannot carry have zero tangents; invert the rest
        std::vector<int> act;
        for (int k = 0; k < 8; ++k)
            if (l2_norm(fr_->tangent[k]) > 0) act.push_back(k);
        const int m = int(act.size());
        Eigen::MatrixXcd Gs(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Gs(i, j) = G(act[i], act[j]);
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(Gs);
        if (!lu.isInvertible()) throw SingularModulationMatrix("ProjectionSet: singular frame Gram matrix");
        Eigen::MatrixXcd inv = lu.inverse();
        ginv_.setZero();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) ginv_(act[i], act[j]) = inv(i, j);
        const double a3 = std::pow(fr_->params.alpha, 3);
        cp_ = 1.0 / (a3 * fr_->kappa_plus);
        cm_ = 1.0 / (a3 * fr_->kappa_minus);
    }

    const SpectralFrame& frame() const { return *fr_; }

    // Coordinates of P0 f along the eight tangent vectors.
    std::array<cplx, 8> zero_coefficients(const PairField& f) const {
        Eigen::Matrix<cplx, 8, 1> p;
        for (int g = 0; g < 8; ++g) p(g) = inner(f, fr_->cotangent[g]);
        Eigen::Matrix<cplx, 8, 1> c = ginv_ * p;
        std::array<cplx, 8> out;
        for (int k = 0; k < 8; ++k) out[k] = c(k);
        return out;
    }
    cplx plus_coefficient(const PairField& f) const { return cp_ * inner(f, i_sigma3(fr_->f_minus)); }
    cplx minus_coefficient(const PairField& f) const { return cm_ * inner(f, i_sigma3(fr_->f_plus)); }

    PairField apply(Projection which, const PairField& f) const {
        switch (which) {
            case Projection::Zero: {
                PairField out = zeros_like(f);
                auto c = zero_coefficients(f);
                for (int k = 0; k < 8; ++k) out.axpy(c[k], fr_->tangent[k]);
                return out;
            }
            case Projection::Plus: return plus_coefficient(f) * fr_->f_plus;
            case Projection::Minus: return minus_coefficient(f) * fr_->f_minus;
            case Projection::Continuous: {
                PairField out = f;
                out -= apply(Projection::Zero, f);
                out.axpy(-plus_coefficient(f), fr_->f_plus);
                out.axpy(-minus_coefficient(f), fr_->f_minus);
                return out;
            }
        }
        return f;
    }
    PairField operator()(Projection which, const PairField& f) const { return apply(which, f); }

    // The eight pairings <f, Xi_g>.
    std::array<cplx, 8> orthogonality_residuals(const PairField& f) const {
        std::array<cplx, 8> out;
        for (int g = 0; g < 8; ++g) out[g] = inner(f, fr_->cotangent[g]);
        return out;
    }

private:
    std::shared_ptr<const SpectralFrame> fr_;
    Eigen::Matrix<cplx, 8, 8> ginv_;
    cplx cp_, cm_;
};

inline PairField apply_projection(Projection which, const ProjectionSet& ps, const PairField& f) {
    return ps.apply(which, f);
}

}  // namespace soliton_lab
