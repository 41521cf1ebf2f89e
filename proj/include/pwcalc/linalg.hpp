#pragma once

// Hermitian linear-algebra primitives: validated Hermitian / PSD wrappers, a
// cyclic Jacobi eigensolver, square roots, pseudo-inverse square roots,
// support projections, polar parts and Kronecker products.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "tolerance.hpp"

namespace pwcalc {

/// Square matrix that equals its adjoint up to herm_tol. The stored entries
/// are the Hermitian part of the input, so downstream code may rely on exact
/// symmetry.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(const Matrix& m, const ToleranceConfig& tol = {}) {
        if (!m.square())
            fail(ErrorKind::input, "Hermitian matrix must be square, got " +
                                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        const double scale = std::max(1.0, max_abs(m));
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = i; j < m.cols(); ++j)
                if (std::abs(m(i, j) - std::conj(m(j, i))) > tol.herm_tol * scale)
                    fail(ErrorKind::input, "matrix is not Hermitian at (" + std::to_string(i) +
                                               "," + std::to_string(j) + ")");
        m_ = hermitian_part(m);
    }

    /// Symmetrizes without validation; for results that are Hermitian by construction.
    static HermitianMatrix trusted(const Matrix& m) {
        HermitianMatrix h;
        h.m_ = hermitian_part(m);
        return h;
    }

    std::size_t dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    operator const Matrix&() const noexcept { return m_; }

private:
    Matrix m_;
};

/// Eigenvalues in ascending order with an orthonormal eigenvector basis
/// stored column-wise.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Matrix basis;

    std::size_t dim() const noexcept { return eigenvalues.size(); }

    /// basis * diag(values) * basis^*.
    Matrix compose(std::span<const double> values) const {
        const std::size_t n = basis.rows();
        Matrix out(n, n);
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double w = values[k];
            if (w == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) {
                const cplx vik = w * basis(i, k);
                for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(basis(j, k));
            }
        }
        return hermitian_part(out);
    }

    Matrix apply(const std::function<double(double)>& f) const {
        std::vector<double> v(eigenvalues.size());
        std::transform(eigenvalues.begin(), eigenvalues.end(), v.begin(), f);
        return compose(v);
    }

    Matrix reconstruct() const { return compose(eigenvalues); }

    /// Column k of the basis as a vector.
    std::vector<cplx> vector(std::size_t k) const {
        std::vector<cplx> v(basis.rows());
        for (std::size_t i = 0; i < basis.rows(); ++i) v[i] = basis(i, k);
        return v;
    }

    double max_abs_eigenvalue() const {
        double m = 0.0;
        for (double e : eigenvalues) m = std::max(m, std::abs(e));
        return m;
    }
};

namespace detail {

inline constexpr int kMaxJacobiSweeps = 100;

// One complex Jacobi rotation annihilating a(p,q). G = diag(1, conj(e)) * [[c, s], [-s, c]]
// acting on coordinates (p, q); a <- G* a G and v <- v G.
inline void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const std::size_t n = a.rows();
    const cplx apq = a(p, q);
    const double mag = std::abs(apq);
    const cplx e = apq / mag;
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double zeta = (aqq - app) / (2.0 * mag);
    const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
    const double c = 1.0 / std::hypot(1.0, t);
    const double s = t * c;
    const cplx ce = std::conj(e);

    for (std::size_t k = 0; k < n; ++k) {
        const cplx akp = a(k, p);
        const cplx akq = a(k, q);
        a(k, p) = c * akp - s * ce * akq;
        a(k, q) = s * akp + c * ce * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const cplx apk = a(p, k);
        const cplx aqk = a(q, k);
        a(p, k) = c * apk - s * e * aqk;
        a(q, k) = s * apk + c * e * aqk;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const cplx vkp = v(k, p);
        const cplx vkq = v(k, q);
        v(k, p) = c * vkp - s * ce * vkq;
        v(k, q) = s * vkp + c * ce * vkq;
    }
    a(p, p) = app - t * mag;
    a(q, q) = aqq + t * mag;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
}

} // namespace detail

/// Cyclic two-sided Jacobi. A rotation is skipped when
/// |a_pq| <= eps * sqrt(|a_pp a_qq|), which preserves small eigenvalues to
/// high relative accuracy for (nearly) semidefinite input.
inline SpectralDecomposition eig_hermitian(const HermitianMatrix& h) {
    const std::size_t n = h.dim();
    Matrix a = h.matrix();
    Matrix v = Matrix::identity(n);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();

    bool converged = (n <= 1);
    for (int sweep = 0; sweep < detail::kMaxJacobiSweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= tiny) continue;
                const double scale = std::sqrt(std::abs(a(p, p).real()) * std::abs(a(q, q).real()));
                if (mag <= eps * scale) continue;
                detail::jacobi_rotate(a, v, p, q);
                rotated = true;
            }
        converged = !rotated;
    }
    if (!converged)
        fail(ErrorKind::numeric, "Jacobi eigensolver did not converge in " +
                                     std::to_string(detail::kMaxJacobiSweeps) + " sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.basis = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.basis(i, k) = v(i, order[k]);
    }
    return out;
}

inline SpectralDecomposition eig_hermitian(const Matrix& m) {
    return eig_hermitian(HermitianMatrix(m));
}

/// Hermitian positive semidefinite matrix. Eigenvalues in [-psd_tol, 0) are
/// clamped to zero; anything more negative is rejected.
class PsdMatrix {
public:
    PsdMatrix() = default;

    explicit PsdMatrix(const HermitianMatrix& h, const ToleranceConfig& tol = {}) {
        spectrum_ = eig_hermitian(h);
        const double norm = spectrum_.max_abs_eigenvalue();
        min_eig_ = spectrum_.eigenvalues.empty() ? 0.0 : spectrum_.eigenvalues.front();
        const double threshold = tol.psd_threshold(norm);
        if (min_eig_ < -threshold)
            fail(ErrorKind::not_psd, "matrix is not positive semidefinite: eigenvalue " +
                                         format_real(min_eig_) + " below -psd_tol " +
                                         format_real(-threshold));
        bool clamped = false;
        for (auto& e : spectrum_.eigenvalues)
            if (e < 0.0) {
                e = 0.0;
                clamped = true;
            }
        m_ = clamped ? HermitianMatrix::trusted(spectrum_.reconstruct()) : h;
    }

    explicit PsdMatrix(const Matrix& m, const ToleranceConfig& tol = {})
        : PsdMatrix(HermitianMatrix(m, tol), tol) {}

    /// Wraps a matrix that is PSD by construction (projections, Gram matrices);
    /// clamps rounding noise but never rejects.
    static PsdMatrix trusted(const Matrix& m) {
        ToleranceConfig loose;
        loose.psd_tol = std::numeric_limits<double>::infinity();
        return PsdMatrix(HermitianMatrix::trusted(m), loose);
    }

    std::size_t dim() const noexcept { return m_.dim(); }
    const Matrix& matrix() const noexcept { return m_.matrix(); }
    const HermitianMatrix& hermitian() const noexcept { return m_; }
    operator const Matrix&() const noexcept { return m_.matrix(); }

    /// Smallest eigenvalue seen at validation, before clamping.
    double min_eig() const noexcept { return min_eig_; }
    const SpectralDecomposition& spectrum() const noexcept { return spectrum_; }
    double spectral_norm() const {
        return spectrum_.eigenvalues.empty() ? 0.0 : spectrum_.eigenvalues.back();
    }

private:
    HermitianMatrix m_;
    SpectralDecomposition spectrum_;
    double min_eig_ = 0.0;
};

inline PsdMatrix operator+(const PsdMatrix& a, const PsdMatrix& b) {
    return PsdMatrix::trusted(a.matrix() + b.matrix());
}

inline PsdMatrix scaled(const PsdMatrix& a, double t) {
    if (t < 0.0) fail(ErrorKind::input, "PSD matrices may only be scaled by t >= 0");
    return PsdMatrix::trusted(a.matrix() * t);
}

/// Largest singular value.
inline double spectral_norm(const Matrix& m) {
    if (m.empty()) return 0.0;
    if (m.square()) {
        bool herm = true;
        for (std::size_t i = 0; i < m.rows() && herm; ++i)
            for (std::size_t j = i; j < m.cols(); ++j)
                if (m(i, j) != std::conj(m(j, i))) {
                    herm = false;
                    break;
                }
        if (herm) return eig_hermitian(HermitianMatrix::trusted(m)).max_abs_eigenvalue();
    }
    const Matrix gram = m.rows() >= m.cols() ? m.adjoint() * m : m * m.adjoint();
    return std::sqrt(std::max(0.0, eig_hermitian(HermitianMatrix::trusted(gram)).max_abs_eigenvalue()));
}

inline double min_eigenvalue(const Matrix& m) {
    const auto s = eig_hermitian(HermitianMatrix::trusted(m));
    return s.eigenvalues.empty() ? 0.0 : s.eigenvalues.front();
}

inline double max_eigenvalue(const Matrix& m) {
    const auto s = eig_hermitian(HermitianMatrix::trusted(m));
    return s.eigenvalues.empty() ? 0.0 : s.eigenvalues.back();
}

/// True when lower <= upper in the Loewner order, up to `slack`.
inline bool loewner_leq(const Matrix& lower, const Matrix& upper, double slack) {
    return min_eigenvalue(upper - lower) >= -slack;
}

/// M^{1/2}; eigenvalues at or below `cut` are taken as exact zeros.
inline PsdMatrix psd_sqrt(const PsdMatrix& m, double cut = 0.0) {
    return PsdMatrix::trusted(m.spectrum().apply([cut](double x) { return x > cut ? std::sqrt(x) : 0.0; }));
}

/// Moore-Penrose pseudo-inverse of M^{1/2}; eigenvalues at or below
/// support_tol are treated as zero.
inline HermitianMatrix pinv_sqrt(const PsdMatrix& m, const ToleranceConfig& tol = {}) {
    const double thr = tol.support_threshold(m.dim(), m.spectral_norm());
    return HermitianMatrix::trusted(
        m.spectrum().apply([thr](double x) { return x > thr ? 1.0 / std::sqrt(x) : 0.0; }));
}

/// Orthogonal projection onto ran(M), i.e. 1_(0,inf)(M) with the zero
/// threshold support_tol.
inline Matrix support_projection(const PsdMatrix& m, const ToleranceConfig& tol = {}) {
    const double thr = tol.support_threshold(m.dim(), m.spectral_norm());
    return m.spectrum().apply([thr](double x) { return x > thr ? 1.0 : 0.0; });
}

/// Partial isometry W of the polar decomposition M = W (M*M)^{1/2}.
/// Eigenvalues of M*M at or below `threshold` span ker(W); by default the
/// threshold is r * eps * ||M*M||.
inline Matrix polar_isometry(const Matrix& m, std::optional<double> threshold = std::nullopt) {
    const std::size_t r = m.cols();
    if (r == 0 || m.rows() == 0) return Matrix(m.rows(), r);
    const auto gram = eig_hermitian(HermitianMatrix::trusted(m.adjoint() * m));
    const double lmax = std::max(0.0, gram.eigenvalues.back());
    const double thr = threshold ? *threshold
                                 : static_cast<double>(r) * std::numeric_limits<double>::epsilon() * lmax;
    std::vector<double> inv_sqrt(r);
    for (std::size_t k = 0; k < r; ++k) {
        const double mu = gram.eigenvalues[k];
        inv_sqrt[k] = mu > thr && mu > 0.0 ? 1.0 / std::sqrt(mu) : 0.0;
    }
    Matrix scale(r, r);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                scale(i, j) += inv_sqrt[k] * gram.basis(i, k) * std::conj(gram.basis(j, k));
    return m * scale;
}

inline Matrix kron(const Matrix& a, const Matrix& b, std::size_t max_dim = ToleranceConfig{}.max_dim) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if (rows > max_dim || cols > max_dim)
        fail(ErrorKind::input, "Kronecker product dimension " + std::to_string(std::max(rows, cols)) +
                                   " exceeds the configured maximum " + std::to_string(max_dim));
    Matrix k(rows, cols);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return k;
}

inline PsdMatrix kron(const PsdMatrix& a, const PsdMatrix& b, std::size_t max_dim = ToleranceConfig{}.max_dim) {
    return PsdMatrix::trusted(kron(a.matrix(), b.matrix(), max_dim));
}

} // namespace pwcalc
