#pragma once

// Weighted geometric means, the power functionals phi_alpha (alpha > 1) and
// the relative-entropy functional psi(x,y) = x log(x/y), paired against
// positive functionals Tr(rho .), plus the tensor-product identities they
// satisfy.

#include <algorithm>
#include <cmath>
#include <string>

#include "linalg.hpp"
#include "pw_function.hpp"
#include "pw_rep.hpp"

namespace pwcalc {

/// phi(A,B) for phi(x,y) = x^alpha y^(1-alpha), alpha in (0,1).
inline PsdMatrix weighted_geometric_mean(const PsdMatrix& a, const PsdMatrix& b, double alpha,
                                         const ToleranceConfig& tol = {}) {
    const auto f = functions::geom(alpha);
    return PsdMatrix::trusted(pw_eval(a, b, f, tol));
}

inline PairingResult phi_alpha_pairing(const PsdMatrix& a, const PsdMatrix& b, double alpha, const PsdMatrix& rho,
                                       const ToleranceConfig& tol = {}) {
    const auto f = functions::power(alpha);
    return pw_pairing_detailed(build_rep(a, b, tol), f, rho);
}

inline PairingResult psi_pairing(const PsdMatrix& a, const PsdMatrix& b, const PsdMatrix& rho,
                                 const ToleranceConfig& tol = {}) {
    return pw_pairing_detailed(build_rep(a, b, tol), functions::entropy(), rho);
}

/// Tr phi(A,B), i.e. the pairing with rho = I.
inline ExtendedReal trace_functional(const PsdMatrix& a, const PsdMatrix& b, const PwFunction& f,
                                     const ToleranceConfig& tol = {}) {
    const auto id = PsdMatrix::trusted(Matrix::identity(a.dim()));
    return pw_pairing(a, b, f, id, tol);
}

/// The two functionals with a product rule under tensor products.
struct TensorFunctional {
    enum class Kind { power, entropy };
    Kind kind = Kind::entropy;
    double alpha = 2.0;  // power only

    static TensorFunctional power(double alpha) { return {Kind::power, alpha}; }
    static TensorFunctional entropy() { return {Kind::entropy, 0.0}; }

    PwFunction function() const {
        return kind == Kind::power ? functions::power(alpha) : functions::entropy();
    }
};

struct TensorPairingReport {
    ExtendedReal lhs;  // pairing of the Kronecker pair against rho1 (x) rho2
    ExtendedReal rhs;  // the same value assembled from the factors
    double residual = 0.0;           // |lhs - rhs| when both are finite
    double relative_residual = 0.0;  // residual / max(1, |lhs|, |rhs|)
    bool infinity_consistent = true; // +inf on both sides or on neither
};

/// Checks
///   phi_a(A1 (x) A2, B1 (x) B2)(rho1 (x) rho2) = phi_a(A1,B1)(rho1) phi_a(A2,B2)(rho2)
///   psi(A1 (x) A2, B1 (x) B2)(rho1 (x) rho2)   = psi(A1,B1)(rho1) Tr(rho2 A2) + Tr(rho1 A1) psi(A2,B2)(rho2)
inline TensorPairingReport tensor_pairing_check(const PsdMatrix& a1, const PsdMatrix& b1, const PsdMatrix& a2,
                                                const PsdMatrix& b2, const PsdMatrix& rho1, const PsdMatrix& rho2,
                                                const TensorFunctional& fn, const ToleranceConfig& tol = {}) {
    detail::require_same_dim(a1, b1, "tensor_pairing_check (slot 1)");
    detail::require_same_dim(a2, b2, "tensor_pairing_check (slot 2)");
    detail::require_same_dim(a1, rho1, "tensor_pairing_check (rho1)");
    detail::require_same_dim(a2, rho2, "tensor_pairing_check (rho2)");
    const auto f = fn.function();

    const auto ak = kron(a1, a2, tol.max_dim);
    const auto bk = kron(b1, b2, tol.max_dim);
    const auto rk = kron(rho1, rho2, tol.max_dim);

    TensorPairingReport out;
    out.lhs = pw_pairing(ak, bk, f, rk, tol);

    const auto p1 = pw_pairing(a1, b1, f, rho1, tol);
    const auto p2 = pw_pairing(a2, b2, f, rho2, tol);
    // Zero factors annihilate +inf only when they vanish at the scale of the
    // weight tolerance.
    if (fn.kind == TensorFunctional::Kind::power) {
        const double s1 = trace(rho1.matrix() * (a1.matrix() + b1.matrix())).real();
        const double s2 = trace(rho2.matrix() * (a2.matrix() + b2.matrix())).real();
        const double slack = tol.weight_tol * std::max(s1, s2);
        out.rhs = ExtendedReal::product(p1, p2, slack);
    } else {
        const double rho2_a2 = trace(rho2.matrix() * a2.matrix()).real();
        const double rho1_a1 = trace(rho1.matrix() * a1.matrix()).real();
        const double s1 = trace(rho1.matrix() * (a1.matrix() + b1.matrix())).real();
        const double s2 = trace(rho2.matrix() * (a2.matrix() + b2.matrix())).real();
        out.rhs = ExtendedReal::product(p1, rho2_a2, tol.weight_tol * s2) +
                  ExtendedReal::product(rho1_a1, p2, tol.weight_tol * s1);
    }

    out.infinity_consistent = out.lhs.is_infinite() == out.rhs.is_infinite();
    if (out.lhs.is_finite() && out.rhs.is_finite()) {
        out.residual = std::abs(out.lhs.value() - out.rhs.value());
        out.relative_residual =
            out.residual / std::max({1.0, std::abs(out.lhs.value()), std::abs(out.rhs.value())});
    }
    return out;
}

} // namespace pwcalc
