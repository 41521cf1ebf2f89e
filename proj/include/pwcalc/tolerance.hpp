#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include "errors.hpp"

namespace pwcalc {

/// Thresholds used to turn exact statements (x = 0, x = 1, C <= A+B, ...)
/// into floating-point decisions. Scale-dependent defaults are resolved
/// against the matrix they apply to.
struct ToleranceConfig {
    double herm_tol = 1e-10;        // relative to max(1, max |entry|)
    double psd_tol_rel = 1e-9;      // times the spectral norm
    std::optional<double> psd_tol;  // absolute override
    std::optional<double> support_tol;  // absolute override; default n * eps * lambda_max
    double zero_tol = 1e-8;         // classification of R-eigenvalues at 0
    double one_tol = 1e-8;          // classification of R-eigenvalues at 1
    double weight_tol = 1e-12;      // relative to the total pairing weight
    double conv_tol = 1e-9;
    int max_doublings = 60;
    double domination_tol = 1e-8;   // relative round-trip residual accepted by gamma_inv
    std::size_t max_dim = 4096;     // largest dimension a Kronecker product may produce

    double psd_threshold(double spectral_norm) const {
        return psd_tol ? *psd_tol : psd_tol_rel * spectral_norm;
    }

    double support_threshold(std::size_t n, double lambda_max) const {
        if (support_tol) return *support_tol;
        return static_cast<double>(n) * std::numeric_limits<double>::epsilon() * lambda_max;
    }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) fail(ErrorKind::input, std::string(name) + " must be strictly positive");
        };
        positive(herm_tol, "herm_tol");
        positive(psd_tol_rel, "psd_tol");
        if (psd_tol) positive(*psd_tol, "psd_tol");
        if (support_tol) positive(*support_tol, "support_tol");
        positive(zero_tol, "zero_tol");
        positive(one_tol, "one_tol");
        positive(weight_tol, "weight_tol");
        positive(conv_tol, "conv_tol");
        positive(domination_tol, "domination_tol");
        if (max_doublings <= 0) fail(ErrorKind::input, "max_doublings must be strictly positive");
        if (max_dim == 0) fail(ErrorKind::input, "max_dim must be strictly positive");
        if (zero_tol + one_tol >= 1.0)
            fail(ErrorKind::input, "zero_tol + one_tol must be below 1");
    }
};

} // namespace pwcalc
