#pragma once

// Random generators and independent oracles shared by the test suites.
// Oracles go through Eigen so that they do not share code paths with the
// library under test (the Jacobi solver, the PW representation).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <random>
#include <vector>

#include <pwcalc/linalg.hpp>
#include <pwcalc/matrix.hpp>

namespace pwcalc::testing {

using EMat = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

inline EMat to_eigen(const Matrix& m) {
    EMat e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return e;
}

inline Matrix from_eigen(const EMat& e) {
    Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
    return m;
}

// ---------------------------------------------------------------------------
// generators

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, bool complex = true) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = cplx{g(rng), complex ? g(rng) : 0.0};
    return m;
}

inline Matrix random_hermitian(std::size_t n, Rng& rng) {
    return hermitian_part(random_matrix(n, n, rng));
}

/// G G* / cols with G n x k Gaussian: rank k, kernel only up to rounding.
inline PsdMatrix random_psd_rank(std::size_t n, std::size_t k, Rng& rng) {
    const Matrix g = random_matrix(n, k, rng);
    return PsdMatrix::trusted(g * g.adjoint() * (1.0 / static_cast<double>(std::max<std::size_t>(k, 1))));
}

/// Positive definite with spectrum bounded away from 0.
inline PsdMatrix random_pd(std::size_t n, Rng& rng, double shift = 0.2) {
    const Matrix g = random_matrix(n, n, rng);
    return PsdMatrix::trusted(g * g.adjoint() * (1.0 / static_cast<double>(n)) + Matrix::identity(n) * shift);
}

/// PSD matrix whose kernel contains the listed coordinate vectors exactly
/// (rows and columns are exact zeros), positive definite elsewhere.
inline PsdMatrix exact_kernel_psd(std::size_t n, const std::vector<std::size_t>& kernel, Rng& rng) {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(kernel.begin(), kernel.end(), i) == kernel.end()) live.push_back(i);
    const auto block = random_pd(live.size(), rng);
    Matrix m(n, n);
    for (std::size_t i = 0; i < live.size(); ++i)
        for (std::size_t j = 0; j < live.size(); ++j) m(live[i], live[j]) = block.matrix()(i, j);
    return PsdMatrix::trusted(m);
}

/// Random subset of {0..n-1} of size k.
inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline std::vector<cplx> random_vector(std::size_t n, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& x : v) x = cplx{g(rng), g(rng)};
    return v;
}

inline Matrix random_unitary(std::size_t n, Rng& rng) {
    Eigen::HouseholderQR<EMat> qr(to_eigen(random_matrix(n, n, rng)));
    return from_eigen(qr.householderQ() * EMat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

// ---------------------------------------------------------------------------
// oracles (Eigen only)

inline double oracle_norm(const Matrix& m) {
    if (m.empty()) return 0.0;
    Eigen::JacobiSVD<EMat> svd(to_eigen(m));
    return svd.singularValues()(0);
}

inline EMat eigen_function(const EMat& h, double (*f)(double), double zero_cut = -1.0) {
    Eigen::SelfAdjointEigenSolver<EMat> es(h);
    Eigen::VectorXd d = es.eigenvalues();
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = d(i) <= zero_cut ? 0.0 : f(std::max(0.0, d(i)));
    return es.eigenvectors() * d.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix oracle_sqrt(const Matrix& m, double zero_cut = -1.0) {
    return from_eigen(eigen_function(to_eigen(m), [](double x) { return std::sqrt(x); }, zero_cut));
}

/// Square root ignoring eigenvalues at the library's default support threshold n eps lambda_max.
inline Matrix oracle_support_sqrt(const Matrix& m) {
    const double cut = static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * oracle_norm(m);
    return oracle_sqrt(m, cut);
}

inline Matrix oracle_pinv(const Matrix& m, double rel_cut = 1e-12) {
    const EMat e = to_eigen(m);
    Eigen::SelfAdjointEigenSolver<EMat> es(e);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd d = es.eigenvalues();
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = std::abs(d(i)) > rel_cut * top ? 1.0 / d(i) : 0.0;
    return from_eigen(es.eigenvectors() * d.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint());
}

/// Anderson-Duffin parallel sum A (A+B)^+ B.
inline Matrix oracle_parallel_sum(const Matrix& a, const Matrix& b) {
    return hermitian_part(a * oracle_pinv(a + b) * b);
}

/// A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2} for A positive definite.
inline Matrix oracle_geometric_mean(const Matrix& a, const Matrix& b, double t) {
    const EMat ea = to_eigen(a);
    Eigen::SelfAdjointEigenSolver<EMat> es(ea);
    const Eigen::VectorXd d = es.eigenvalues();
    const EMat sq = es.eigenvectors() * d.cwiseSqrt().cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
    const EMat isq = es.eigenvectors() * d.cwiseSqrt().cwiseInverse().cast<std::complex<double>>().asDiagonal() *
                     es.eigenvectors().adjoint();
    const EMat inner = isq * to_eigen(b) * isq;
    Eigen::SelfAdjointEigenSolver<EMat> ei(0.5 * (inner + inner.adjoint()));
    Eigen::VectorXd p = ei.eigenvalues();
    // rounding-level eigenvalues of the congruence are a numerical kernel
    const double cut = 1e-13 * p.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = p(i) > cut ? std::pow(p(i), t) : 0.0;
    const EMat pw = ei.eigenvectors() * p.cast<std::complex<double>>().asDiagonal() * ei.eigenvectors().adjoint();
    return hermitian_part(from_eigen(sq * pw * sq));
}

inline double oracle_min_eig(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// ||got - want||_2 / max(||want||_2, floor).
inline double rel_err(const Matrix& got, const Matrix& want, double floor = 1e-300) {
    return oracle_norm(got - want) / std::max(oracle_norm(want), floor);
}

inline double abs_err(const Matrix& got, const Matrix& want) { return oracle_norm(got - want); }

} // namespace pwcalc::testing
