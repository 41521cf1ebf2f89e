#pragma once

// Lebesgue decomposition B = Bc + Bs of B relative to A, computed through
// the functional calculus of phi(x,y) = 1_(0,inf)(x) y, together with the
// projection P_{A,B}, singularity / absolute-continuity predicates and
// parallel sums.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "pw_function.hpp"
#include "pw_rep.hpp"

namespace pwcalc {

struct LebesgueDiagnostics {
    std::size_t rank = 0;           // rank of A + B
    std::size_t num_zero_eigs = 0;  // R-eigenvalues classified as 0
    double spectral_margin = kInf;  // nearest retained R-eigenvalue minus zero_tol
    double residual_sum = 0.0;      // ||B - Bc - Bs||_2
    std::vector<std::string> warnings;
};

struct LebesgueDecomposition {
    PsdMatrix absolutely_continuous;  // Bc = [A]B
    PsdMatrix singular;               // Bs
    Matrix projection;                // P_{A,B}
    LebesgueDiagnostics diagnostics;
};

inline PsdMatrix abs_cont_part(const PwRepresentation& rep) {
    return PsdMatrix::trusted(pw_eval(rep, functions::abs_part()));
}

inline PsdMatrix abs_cont_part(const PsdMatrix& a, const PsdMatrix& b, const ToleranceConfig& tol = {}) {
    return abs_cont_part(build_rep(a, b, tol));
}

/// 1_(0,inf)(I - YY*): projection onto the complement of the eigenspace of
/// YY* at 1 (eigenvalues within one_tol of 1 count as 1).
inline Matrix projection_P(const PwRepresentation& rep) {
    const Matrix yy = rep.right_contraction * rep.right_contraction.adjoint();
    const auto spec = eig_hermitian(HermitianMatrix::trusted(yy));
    const double cut = 1.0 - rep.tol.one_tol;
    return spec.apply([cut](double mu) { return mu < cut ? 1.0 : 0.0; });
}

inline Matrix projection_P(const PsdMatrix& a, const PsdMatrix& b, const ToleranceConfig& tol = {}) {
    return projection_P(build_rep(a, b, tol));
}

/// I - VV* + V U*U V*, the polar-part expression for P_{A,B}.
inline Matrix projection_P_polar(const PwRepresentation& rep) {
    const Matrix& u = rep.left_isometry;
    const Matrix& v = rep.right_isometry;
    return hermitian_part(Matrix::identity(rep.dim) - v * v.adjoint() + v * (u.adjoint() * u) * v.adjoint());
}

/// I - YY* + Y U*U Y*.
inline Matrix projection_P_contraction(const PwRepresentation& rep) {
    const Matrix& u = rep.left_isometry;
    const Matrix& y = rep.right_contraction;
    return hermitian_part(Matrix::identity(rep.dim) - y * y.adjoint() + y * (u.adjoint() * u) * y.adjoint());
}

/// Projection onto {xi : B^{1/2} xi in ran(A^{1/2})}, computed without the
/// representation: the kernel of N = (I - P_ranA) B^{1/2}. Since N*N <= B,
/// eigenvalues of N*N are compared against the support threshold of B.
inline Matrix solvable_subspace_projection(const PsdMatrix& a, const PsdMatrix& b, const ToleranceConfig& tol = {}) {
    detail::require_same_dim(a, b, "solvable_subspace_projection");
    const std::size_t n = a.dim();
    const Matrix off_range = Matrix::identity(n) - support_projection(a, tol);
    const Matrix nmat = off_range * psd_sqrt(b).matrix();
    const auto spec = eig_hermitian(HermitianMatrix::trusted(nmat.adjoint() * nmat));
    const double thr = tol.support_threshold(n, b.spectral_norm());
    return spec.apply([thr](double x) { return x <= thr ? 1.0 : 0.0; });
}

inline LebesgueDecomposition lebesgue_decompose(const PwRepresentation& rep) {
    const auto& tol = rep.tol;
    const auto& spec = rep.left_spectrum;
    std::vector<double> cont(rep.rank, 0.0);
    std::vector<double> sing(rep.rank, 0.0);
    LebesgueDiagnostics diag;
    diag.rank = rep.rank;
    for (std::size_t k = 0; k < rep.rank; ++k) {
        const double x = spec.eigenvalues[k];
        switch (classify(x, tol)) {
        case SpectralBand::zero:
            sing[k] = 1.0 - x;  // S E_R({0})
            ++diag.num_zero_eigs;
            break;
        case SpectralBand::interior:
            cont[k] = 1.0 - x;
            diag.spectral_margin = std::min(diag.spectral_margin, x - tol.zero_tol);
            break;
        case SpectralBand::one:
            diag.spectral_margin = std::min(diag.spectral_margin, x - tol.zero_tol);
            break;
        }
    }
    if (diag.spectral_margin < 9.0 * tol.zero_tol)
        diag.warnings.push_back("low spectral margin: an R-eigenvalue lies within 10*zero_tol (zero_tol = " +
                                format_real(tol.zero_tol) + ", margin = " +
                                format_real(diag.spectral_margin) + ")");

    LebesgueDecomposition out;
    out.absolutely_continuous = PsdMatrix::trusted(gamma(rep, spec.compose(cont)));
    out.singular = PsdMatrix::trusted(gamma(rep, spec.compose(sing)));
    out.projection = projection_P(rep);
    diag.residual_sum =
        spectral_norm(rep.b.matrix() - out.absolutely_continuous.matrix() - out.singular.matrix());
    out.diagnostics = std::move(diag);
    return out;
}

inline LebesgueDecomposition lebesgue_decompose(const PsdMatrix& a, const PsdMatrix& b,
                                                const ToleranceConfig& tol = {}) {
    return lebesgue_decompose(build_rep(a, b, tol));
}

struct SingularityReport {
    bool singular = true;
    std::optional<double> witness;  // R-eigenvalue farthest from {0, 1}
    double max_distance = 0.0;      // its distance to {0, 1}
};

/// A and B are mutually singular iff R is a projection, i.e. its spectrum
/// lies in {0, 1}. The zero pair is singular.
inline SingularityReport is_mutually_singular(const PwRepresentation& rep) {
    SingularityReport out;
    for (double x : rep.left_spectrum.eigenvalues) {
        const double d = std::min(std::abs(x), std::abs(1.0 - x));
        if (!out.witness || d > out.max_distance) {
            out.max_distance = d;
            out.witness = x;
        }
    }
    out.singular = out.max_distance <= std::max(rep.tol.zero_tol, rep.tol.one_tol);
    return out;
}

inline SingularityReport is_mutually_singular(const PsdMatrix& a, const PsdMatrix& b,
                                              const ToleranceConfig& tol = {}) {
    return is_mutually_singular(build_rep(a, b, tol));
}

inline constexpr double kAbsContinuityTol = 1e-7;

struct AbsContinuityReport {
    bool abs_continuous = false;
    double projection_deviation = 0.0;  // ||P_{A,B} - I||_2
};

inline AbsContinuityReport is_abs_continuous(const PwRepresentation& rep) {
    AbsContinuityReport out;
    out.projection_deviation = spectral_norm(projection_P(rep) - Matrix::identity(rep.dim));
    out.abs_continuous = out.projection_deviation < kAbsContinuityTol;
    return out;
}

inline AbsContinuityReport is_abs_continuous(const PsdMatrix& a, const PsdMatrix& b,
                                             const ToleranceConfig& tol = {}) {
    return is_abs_continuous(build_rep(a, b, tol));
}

inline PsdMatrix parallel_sum(const PwRepresentation& rep) {
    return PsdMatrix::trusted(pw_eval(rep, functions::parallel()));
}

inline PsdMatrix parallel_sum(const PsdMatrix& a, const PsdMatrix& b, const ToleranceConfig& tol = {}) {
    return parallel_sum(build_rep(a, b, tol));
}

/// (sA):B evaluated through the representation of (A, B) with profile
/// s x (1-x) / (s x + 1 - x).
inline PsdMatrix scaled_parallel_sum(const PwRepresentation& rep, double s) {
    return PsdMatrix::trusted(pw_eval(rep, functions::phi_n(s)));
}

struct ParallelSumLimit {
    PsdMatrix limit;                 // last iterate
    std::vector<PsdMatrix> iterates; // (2^k A):B for k = 0 .. iterations-1
    std::vector<double> gaps;        // Frobenius distance between successive iterates
    bool converged = false;
    bool monotone = true;            // iterates nondecreasing in Loewner order, 1e-9 slack
};

/// Iterates (2^k A):B, k = 0, 1, ..., until the Frobenius gap drops below
/// conv_tol or k reaches max_doublings.
inline ParallelSumLimit parallel_sum_limit(const PwRepresentation& rep) {
    ParallelSumLimit out;
    const double slack = 1e-9 * std::max(1.0, rep.b.spectral_norm());
    out.iterates.push_back(scaled_parallel_sum(rep, 1.0));
    for (int k = 1; k <= rep.tol.max_doublings; ++k) {
        auto next = scaled_parallel_sum(rep, std::ldexp(1.0, k));
        const auto& prev = out.iterates.back();
        const double gap = frobenius_norm(next.matrix() - prev.matrix());
        if (!loewner_leq(prev.matrix(), next.matrix(), slack)) out.monotone = false;
        out.gaps.push_back(gap);
        out.iterates.push_back(std::move(next));
        if (gap < rep.tol.conv_tol) {
            out.converged = true;
            break;
        }
    }
    out.limit = out.iterates.back();
    return out;
}

inline ParallelSumLimit parallel_sum_limit(const PsdMatrix& a, const PsdMatrix& b, const ToleranceConfig& tol = {}) {
    return parallel_sum_limit(build_rep(a, b, tol));
}

/// Four closed forms of A:B built from the contractions X, Y.
struct ParallelSumExpressions {
    Matrix via_right;    // B^{1/2} (I - YY*) B^{1/2}
    Matrix via_left;     // A^{1/2} (I - XX*) A^{1/2}
    Matrix cross_left;   // A^{1/2} X Y* B^{1/2}
    Matrix cross_right;  // B^{1/2} Y X* A^{1/2}
};

inline ParallelSumExpressions parallel_sum_expressions(const PwRepresentation& rep) {
    const Matrix& x = rep.left_contraction;
    const Matrix& y = rep.right_contraction;
    const Matrix& ra = rep.sqrt_a.matrix();
    const Matrix& rb = rep.sqrt_b.matrix();
    const Matrix id = Matrix::identity(rep.dim);
    return {
        rb * (id - y * y.adjoint()) * rb,
        ra * (id - x * x.adjoint()) * ra,
        ra * x * y.adjoint() * rb,
        rb * y * x.adjoint() * ra,
    };
}

inline ParallelSumExpressions parallel_sum_expressions(const PsdMatrix& a, const PsdMatrix& b,
                                                       const ToleranceConfig& tol = {}) {
    return parallel_sum_expressions(build_rep(a, b, tol));
}

} // namespace pwcalc
