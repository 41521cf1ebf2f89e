#pragma once

// Pusz-Woronowicz representation of a pair (A, B) of PSD matrices and the
// binary functional calculus built on it.
//
// With Q an orthonormal basis of ran(A+B) and Lambda the corresponding
// eigenvalues, H_{A,B} is identified with C^r and
//
//   T = Lambda^{1/2} Q*             (r x n)
//   X = A^{1/2} Q Lambda^{-1/2}     (n x r),  X T = A^{1/2}
//   Y = B^{1/2} Q Lambda^{-1/2}     (n x r),  Y T = B^{1/2}
//   R = X* X,  S = I - R
//
// phi(A, B) = T* f(R) T where f is the profile of phi.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "pw_function.hpp"
#include "tolerance.hpp"

namespace pwcalc {

struct PwRepresentation {
    std::size_t dim = 0;   // n
    std::size_t rank = 0;  // r = rank(A + B)

    PsdMatrix a;
    PsdMatrix b;
    PsdMatrix sqrt_a;
    PsdMatrix sqrt_b;

    Matrix support_basis;                    // Q, n x r
    std::vector<double> support_eigenvalues; // Lambda, ascending, all > support_tol
    Matrix transfer;                         // T, r x n
    Matrix left_contraction;                 // X, n x r
    Matrix right_contraction;                // Y, n x r
    Matrix left_density;                     // R, r x r
    Matrix right_density;                    // S, r x r
    Matrix left_isometry;                    // U, polar part of X
    Matrix right_isometry;                   // V, polar part of Y
    SpectralDecomposition left_spectrum;     // spectral decomposition of R

    ToleranceConfig tol;
};

enum class SpectralBand { zero, interior, one };

inline SpectralBand classify(double x, const ToleranceConfig& tol) {
    if (x <= tol.zero_tol) return SpectralBand::zero;
    if (x >= 1.0 - tol.one_tol) return SpectralBand::one;
    return SpectralBand::interior;
}

/// Profile values on the spectrum of R with zero/one classification applied.
struct SpectralProfile {
    std::vector<double> values;  // one per eigenvalue of R, may contain +inf
    std::size_t num_zero = 0;
    std::size_t num_one = 0;
    /// Distance of the nearest interior eigenvalue to a classification
    /// threshold; +inf when no eigenvalue is interior.
    double spectral_margin = kInf;
};

namespace detail {

inline void require_same_dim(const PsdMatrix& a, const PsdMatrix& b, const char* what) {
    if (a.dim() != b.dim())
        fail(ErrorKind::input, std::string(what) + ": dimension mismatch " + std::to_string(a.dim()) +
                                   " vs " + std::to_string(b.dim()));
}

inline double relative_residual(const Matrix& got, const Matrix& want) {
    const double scale = frobenius_norm(want);
    const double diff = frobenius_norm(got - want);
    return scale > 0.0 ? diff / scale : diff;
}

} // namespace detail

inline PwRepresentation build_rep(const PsdMatrix& a, const PsdMatrix& b, const ToleranceConfig& tol = {}) {
    tol.validate();
    detail::require_same_dim(a, b, "build_rep");
    PwRepresentation rep;
    rep.tol = tol;
    rep.dim = a.dim();
    rep.a = a;
    rep.b = b;
    // rounding-level eigenvalues would otherwise come back at their square root
    rep.sqrt_a = psd_sqrt(a, tol.support_threshold(a.dim(), a.spectral_norm()));
    rep.sqrt_b = psd_sqrt(b, tol.support_threshold(b.dim(), b.spectral_norm()));

    const std::size_t n = rep.dim;
    const PsdMatrix sum = a + b;
    const auto& spec = sum.spectrum();
    const double thr = tol.support_threshold(n, sum.spectral_norm());

    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < n; ++k)
        if (spec.eigenvalues[k] > thr) kept.push_back(k);
    const std::size_t r = kept.size();
    rep.rank = r;

    rep.support_basis = Matrix(n, r);
    rep.support_eigenvalues.resize(r);
    Matrix inv_sqrt_lambda(r, r);
    rep.transfer = Matrix(r, n);
    for (std::size_t c = 0; c < r; ++c) {
        const double lam = spec.eigenvalues[kept[c]];
        rep.support_eigenvalues[c] = lam;
        inv_sqrt_lambda(c, c) = 1.0 / std::sqrt(lam);
        for (std::size_t i = 0; i < n; ++i) {
            rep.support_basis(i, c) = spec.basis(i, kept[c]);
            rep.transfer(c, i) = std::sqrt(lam) * std::conj(spec.basis(i, kept[c]));
        }
    }

    const Matrix q_scaled = rep.support_basis * inv_sqrt_lambda;
    rep.left_contraction = rep.sqrt_a.matrix() * q_scaled;
    rep.right_contraction = rep.sqrt_b.matrix() * q_scaled;
    rep.left_density = hermitian_part(q_scaled.adjoint() * a.matrix() * q_scaled);
    rep.right_density = hermitian_part(Matrix::identity(r) - rep.left_density);

    if (r > 0) {
        const double res_x =
            detail::relative_residual(rep.left_contraction * rep.transfer, rep.sqrt_a.matrix());
        const double res_y =
            detail::relative_residual(rep.right_contraction * rep.transfer, rep.sqrt_b.matrix());
        if (res_x > 1e-6 || res_y > 1e-6)
            fail(ErrorKind::numeric, "representation residual too large: |XT - A^1/2| = " +
                                         format_real(res_x) + ", |YT - B^1/2| = " + format_real(res_y));
    }

    rep.left_spectrum = eig_hermitian(HermitianMatrix::trusted(rep.left_density));

    // Supports of U and V follow the same zero/one classification that the
    // functional calculus applies to the spectrum of R (S = I - R).
    rep.left_isometry = polar_isometry(rep.left_contraction, tol.zero_tol);
    rep.right_isometry = polar_isometry(rep.right_contraction, tol.one_tol);
    return rep;
}

/// Gamma(C~) = T* C~ T.
inline HermitianMatrix gamma(const PwRepresentation& rep, const Matrix& ct) {
    if (ct.rows() != rep.rank || ct.cols() != rep.rank)
        fail(ErrorKind::input, "gamma expects an r x r operand with r = " + std::to_string(rep.rank));
    return HermitianMatrix::trusted(rep.transfer.adjoint() * ct * rep.transfer);
}

/// Inverse of gamma on operators dominated by a multiple of A + B:
/// returns D D* with D = Lambda^{-1/2} Q* C^{1/2}.
inline PsdMatrix gamma_inv(const PwRepresentation& rep, const PsdMatrix& c) {
    if (c.dim() != rep.dim)
        fail(ErrorKind::input, "gamma_inv: dimension mismatch " + std::to_string(c.dim()) + " vs " +
                                   std::to_string(rep.dim));
    Matrix d(rep.rank, rep.dim);
    const Matrix sqrt_c = psd_sqrt(c).matrix();
    for (std::size_t k = 0; k < rep.rank; ++k) {
        const double s = 1.0 / std::sqrt(rep.support_eigenvalues[k]);
        for (std::size_t j = 0; j < rep.dim; ++j) {
            cplx acc{};
            for (std::size_t i = 0; i < rep.dim; ++i) acc += std::conj(rep.support_basis(i, k)) * sqrt_c(i, j);
            d(k, j) = s * acc;
        }
    }
    const Matrix pulled = hermitian_part(d * d.adjoint());
    const double res = detail::relative_residual(gamma(rep, pulled).matrix(), c.matrix());
    if (res > rep.tol.domination_tol)
        fail(ErrorKind::domination, "operand is not dominated by a multiple of A+B (round-trip residual " +
                                        format_real(res) + " > domination_tol " +
                                        format_real(rep.tol.domination_tol) + ")");
    return PsdMatrix::trusted(pulled);
}

/// Evaluates f on the spectrum of R. Eigenvalues within zero_tol of 0 take
/// the stored f(0), those within one_tol of 1 take f(1).
inline SpectralProfile spectral_profile(const PwRepresentation& rep, const PwFunction& f) {
    SpectralProfile out;
    out.values.reserve(rep.rank);
    const auto& tol = rep.tol;
    for (double x : rep.left_spectrum.eigenvalues) {
        switch (classify(x, tol)) {
        case SpectralBand::zero:
            out.values.push_back(f.f0());
            ++out.num_zero;
            break;
        case SpectralBand::one:
            out.values.push_back(f.f1());
            ++out.num_one;
            break;
        case SpectralBand::interior:
            out.values.push_back(f(x));
            out.spectral_margin = std::min({out.spectral_margin, x - tol.zero_tol, (1.0 - tol.one_tol) - x});
            break;
        }
    }
    return out;
}

struct PwEvaluation {
    HermitianMatrix value;
    SpectralProfile profile;
};

inline PwEvaluation pw_eval_detailed(const PwRepresentation& rep, const PwFunction& f) {
    auto profile = spectral_profile(rep, f);
    for (std::size_t k = 0; k < profile.values.size(); ++k)
        if (std::isinf(profile.values[k]))
            fail(ErrorKind::extended_value,
                 "phi(A,B) is unbounded: profile '" + f.id() + "' is +inf at R-eigenvalue " +
                     format_real(rep.left_spectrum.eigenvalues[k]) + "; use a pairing or trace instead");
    auto value = gamma(rep, rep.left_spectrum.compose(profile.values));
    return {std::move(value), std::move(profile)};
}

inline HermitianMatrix pw_eval(const PwRepresentation& rep, const PwFunction& f) {
    return pw_eval_detailed(rep, f).value;
}

inline HermitianMatrix pw_eval(const PsdMatrix& a, const PsdMatrix& b, const PwFunction& f,
                               const ToleranceConfig& tol = {}) {
    return pw_eval(build_rep(a, b, tol), f);
}

/// Spectral weights w_k = Tr(P_k T rho T*) of the functional rho on the
/// eigenprojections P_k of R.
inline std::vector<double> pairing_weights(const PwRepresentation& rep, const PsdMatrix& rho) {
    if (rho.dim() != rep.dim)
        fail(ErrorKind::input, "pairing: rho has dimension " + std::to_string(rho.dim()) + ", expected " +
                                   std::to_string(rep.dim));
    const Matrix pushed = rep.transfer * rho.matrix() * rep.transfer.adjoint();
    std::vector<double> w(rep.rank);
    for (std::size_t k = 0; k < rep.rank; ++k) {
        const auto v = rep.left_spectrum.vector(k);
        w[k] = dot(v, pushed * std::span<const cplx>(v)).real();
    }
    return w;
}

/// sum_k f(x_k) w_k, extended by +inf when the profile is infinite on a
/// spectral component of non-negligible weight. Weights at or below
/// weight_tol times the total weight contribute nothing (0 * inf = 0).
inline PairingResult pw_pairing_detailed(const PwRepresentation& rep, const PwFunction& f, const PsdMatrix& rho) {
    const auto weights = pairing_weights(rep, rho);
    const auto profile = spectral_profile(rep, f);
    double total = 0.0;
    for (double w : weights) total += std::max(0.0, w);
    const double negligible = rep.tol.weight_tol * total;

    PairingResult out;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double w = weights[k];
        if (w <= negligible) continue;
        if (std::isinf(profile.values[k]))
            out.infinite_weight += w;
        else
            out.finite_part += profile.values[k] * w;
    }
    out.value = out.infinite_weight > 0.0 ? ExtendedReal::infinity() : ExtendedReal(out.finite_part);
    return out;
}

inline ExtendedReal pw_pairing(const PwRepresentation& rep, const PwFunction& f, const PsdMatrix& rho) {
    return pw_pairing_detailed(rep, f, rho).value;
}

inline ExtendedReal pw_pairing(const PsdMatrix& a, const PsdMatrix& b, const PwFunction& f, const PsdMatrix& rho,
                               const ToleranceConfig& tol = {}) {
    return pw_pairing(build_rep(a, b, tol), f, rho);
}

struct SequenceReport {
    std::vector<ExtendedReal> values;
    std::vector<double> gaps;  // |v_{k+1} - v_k|; 0 between two +inf, +inf between finite and +inf
    bool converged = false;    // every gap among the last three values is below conv_tol
};

inline SequenceReport eval_sequence(const PwRepresentation& rep, std::span<const PwFunction> fs,
                                    const PsdMatrix& rho) {
    if (fs.empty()) fail(ErrorKind::input, "eval_sequence needs at least one function");
    SequenceReport out;
    for (const auto& f : fs) out.values.push_back(pw_pairing(rep, f, rho));
    for (std::size_t k = 0; k + 1 < out.values.size(); ++k) {
        const auto& u = out.values[k];
        const auto& v = out.values[k + 1];
        if (u.is_infinite() && v.is_infinite())
            out.gaps.push_back(0.0);
        else if (u.is_infinite() || v.is_infinite())
            out.gaps.push_back(kInf);
        else
            out.gaps.push_back(std::abs(v.value() - u.value()));
    }
    if (out.values.size() >= 3) {
        const auto tail = std::span<const double>(out.gaps).last(2);
        out.converged = std::all_of(tail.begin(), tail.end(), [&](double g) { return g < rep.tol.conv_tol; });
    }
    return out;
}

inline SequenceReport eval_sequence(const PsdMatrix& a, const PsdMatrix& b, std::span<const PwFunction> fs,
                                    const PsdMatrix& rho, const ToleranceConfig& tol = {}) {
    return eval_sequence(build_rep(a, b, tol), fs, rho);
}

} // namespace pwcalc
