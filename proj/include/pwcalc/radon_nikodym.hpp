#pragma once

// Radon-Nikodym layer for nonsingular A. With A invertible, H_{A,B} is the
// whole space and T = (A+B)^{1/2}. Functions of XX* give the derivative-like
// operator H = h(XX*), h(x) = (1-x)/x on (0,1], and
//
//   Bc = A^{1/2} H A^{1/2} = Z* Z,   Z = H^{1/2} A^{1/2}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "lebesgue.hpp"
#include "linalg.hpp"
#include "pw_function.hpp"
#include "pw_rep.hpp"

namespace pwcalc {

struct RnResult {
    PsdMatrix derivative;   // H
    Matrix factor;          // Z = H^{1/2} A^{1/2}
    Matrix reconstruction;  // Z* Z
    double residual = 0.0;  // ||Z*Z - target||_2 / max(||target||_2, ||A||_2)
    double condition = 1.0; // max(1, largest finite value of h on the retained spectrum)
    std::size_t infinite_directions = 0;  // XX*-eigenvalues classified 0 (h suppressed to 0)
    std::size_t near_singular = 0;        // retained XX*-eigenvalues below 10 * zero_tol
};

namespace detail {

inline void require_nonsingular(const PsdMatrix& a, const ToleranceConfig& tol, const char* what) {
    const double thr = tol.support_threshold(a.dim(), a.spectral_norm());
    const double lo = a.spectrum().eigenvalues.empty() ? 0.0 : a.spectrum().eigenvalues.front();
    if (a.dim() == 0 || !(lo > thr))
        fail(ErrorKind::precondition, std::string(what) + " requires A positive definite (smallest eigenvalue " +
                                          format_real(lo) + " <= support_tol " + format_real(thr) + ")");
}

struct XxSpectrum {
    SpectralDecomposition spec;
    std::vector<double> h_values;
    double condition = 1.0;
    std::size_t zero_count = 0;
    std::size_t near_singular = 0;
};

// g(x) is evaluated on the interior of the XX*-spectrum; zero-classified
// eigenvalues map to 0, one-classified ones to g_one.
inline XxSpectrum xx_function(const PwRepresentation& rep, const std::function<double(double)>& g, double g_one) {
    XxSpectrum out;
    const Matrix xx = rep.left_contraction * rep.left_contraction.adjoint();
    out.spec = eig_hermitian(HermitianMatrix::trusted(xx));
    const auto& tol = rep.tol;
    double largest = 0.0;
    for (double mu : out.spec.eigenvalues) {
        double v = 0.0;
        switch (classify(mu, tol)) {
        case SpectralBand::zero: ++out.zero_count; break;
        case SpectralBand::one: v = g_one; break;
        case SpectralBand::interior:
            v = g(mu);
            if (mu < 10.0 * tol.zero_tol) ++out.near_singular;
            break;
        }
        if (std::isfinite(v)) largest = std::max(largest, v);
        out.h_values.push_back(v);
    }
    out.condition = std::max(1.0, largest);
    return out;
}

inline RnResult assemble(const PwRepresentation& rep, const XxSpectrum& xs, const Matrix& target) {
    RnResult out;
    out.derivative = PsdMatrix::trusted(xs.spec.compose(xs.h_values));
    std::vector<double> root(xs.h_values.size());
    std::transform(xs.h_values.begin(), xs.h_values.end(), root.begin(),
                   [](double v) { return std::sqrt(std::max(0.0, v)); });
    out.factor = xs.spec.compose(root) * rep.sqrt_a.matrix();
    out.reconstruction = hermitian_part(out.factor.adjoint() * out.factor);
    const double scale = std::max(spectral_norm(target), rep.a.spectral_norm());
    out.residual = spectral_norm(out.reconstruction - target) / scale;
    out.condition = xs.condition;
    out.infinite_directions = xs.zero_count;
    out.near_singular = xs.near_singular;
    return out;
}

} // namespace detail

inline RnResult rn_factor(const PsdMatrix& a, const PsdMatrix& b, const ToleranceConfig& tol = {}) {
    detail::require_nonsingular(a, tol, "rn_factor");
    const auto rep = build_rep(a, b, tol);
    const auto xs = detail::xx_function(rep, [](double x) { return (1.0 - x) / x; }, 0.0);
    return detail::assemble(rep, xs, abs_cont_part(rep).matrix());
}

/// A^{1/2} h_n(XX*) A^{1/2} with h_n(x) = (1-x)/x on [1/n, 1]; increases to Bc.
inline PsdMatrix rn_approximant(const PsdMatrix& a, const PsdMatrix& b, double n, const ToleranceConfig& tol = {}) {
    detail::require_nonsingular(a, tol, "rn_approximant");
    if (!(n >= 1.0)) fail(ErrorKind::input, "rn_approximant requires n >= 1");
    const auto rep = build_rep(a, b, tol);
    const Matrix xx = rep.left_contraction * rep.left_contraction.adjoint();
    const auto spec = eig_hermitian(HermitianMatrix::trusted(xx));
    const Matrix hn = spec.apply([n](double x) { return x >= 1.0 / n && x > 0.0 ? (1.0 - x) / x : 0.0; });
    const Matrix& ra = rep.sqrt_a.matrix();
    return PsdMatrix::trusted(ra * hn * ra);
}

/// phi(A,B) = A^{1/2} h_phi(XX*) A^{1/2} with h_phi(x) = f(x)/x, for
/// profiles with f(0) = 0 and f >= 0.
inline RnResult kubo_ando_form(const PsdMatrix& a, const PsdMatrix& b, const PwFunction& f,
                               const ToleranceConfig& tol = {}) {
    if (!f.vanishes_at_zero())
        fail(ErrorKind::input, "kubo_ando_form requires f(0) = 0, profile '" + f.id() + "' has f(0) = " +
                                   format_real(f.f0()));
    if (!std::isfinite(f.f1()) || f.f1() < 0.0)
        fail(ErrorKind::input, "kubo_ando_form requires a finite non-negative f(1)");
    detail::require_nonsingular(a, tol, "kubo_ando_form");
    const auto rep = build_rep(a, b, tol);
    const auto xs = detail::xx_function(
        rep,
        [&f](double x) {
            const double v = f(x);
            if (v < 0.0)
                fail(ErrorKind::input, "kubo_ando_form requires f >= 0; profile '" + f.id() +
                                           "' is negative at x = " + format_real(x));
            return v / x;
        },
        f.f1());
    return detail::assemble(rep, xs, pw_eval(rep, f).matrix());
}

/// p(xi) = sum_k h(mu_k) ||P_k xi||^2 over the spectrum of XX*.
inline ExtendedReal form_p(const PsdMatrix& a, const PsdMatrix& b, std::span<const cplx> xi,
                           const ToleranceConfig& tol = {}) {
    detail::require_nonsingular(a, tol, "form_p");
    if (xi.size() != a.dim())
        fail(ErrorKind::input, "form_p: vector has length " + std::to_string(xi.size()) + ", expected " +
                                   std::to_string(a.dim()));
    const auto rep = build_rep(a, b, tol);
    const auto xs = detail::xx_function(rep, [](double x) { return (1.0 - x) / x; }, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < xs.h_values.size(); ++k) {
        if (xs.h_values[k] == 0.0) continue;
        const auto v = xs.spec.vector(k);
        total += xs.h_values[k] * std::norm(dot(v, xi));
    }
    return total;
}

} // namespace pwcalc
