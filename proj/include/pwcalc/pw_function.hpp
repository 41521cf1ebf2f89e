#pragma once

// Degree-1 homogeneous functions phi on [0,inf)^2, represented by their
// profile f(x) = phi(x, 1 - x) on [0, 1]. Homogeneity recovers the rest:
// phi(x, y) = (x + y) f(x / (x + y)).

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "errors.hpp"

namespace pwcalc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A finite real or +inf.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit from finite values

    static constexpr ExtendedReal infinity() { return ExtendedReal(kInf); }

    constexpr bool is_infinite() const noexcept { return value_ == kInf; }
    constexpr bool is_finite() const noexcept { return !is_infinite(); }
    constexpr double value() const noexcept { return value_; }

    friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
        return (a.is_infinite() || b.is_infinite()) ? infinity() : ExtendedReal(a.value_ + b.value_);
    }

    /// Product with the measure-theoretic convention 0 * inf = 0; factors of
    /// magnitude at most `zero_slack` count as zero.
    static ExtendedReal product(ExtendedReal a, ExtendedReal b, double zero_slack = 0.0) {
        const bool a_zero = a.is_finite() && std::abs(a.value_) <= zero_slack;
        const bool b_zero = b.is_finite() && std::abs(b.value_) <= zero_slack;
        if (a.is_infinite() || b.is_infinite()) {
            if (a_zero || b_zero) return ExtendedReal(0.0);
            const double other = a.is_infinite() ? (b.is_infinite() ? 1.0 : b.value_) : a.value_;
            if (other < 0.0)
                fail(ErrorKind::numeric, "product of +inf with a negative value");
            return infinity();
        }
        return ExtendedReal(a.value_ * b.value_);
    }

    friend constexpr bool operator==(ExtendedReal, ExtendedReal) = default;

private:
    double value_ = 0.0;
};

/// Pairing of phi(A,B) against a positive functional; see pw_pairing.
struct PairingResult {
    ExtendedReal value;
    double finite_part = 0.0;      // sum over terms with finite profile value
    double infinite_weight = 0.0;  // spectral weight sitting where the profile is +inf
};

/// Profile of a homogeneous function. `profile` is consulted only strictly
/// inside (0, 1); the endpoint values f0, f1 are stored separately so that
/// indicator-type functions (phi(x,y) = 1_(0,inf)(x) y) keep their exact
/// endpoint semantics.
class PwFunction {
public:
    using Profile = std::function<double(double)>;

    PwFunction(std::string id, Profile profile, double f0, double f1)
        : id_(std::move(id)), profile_(std::move(profile)), f0_(f0), f1_(f1) {
        check_value(f0_, 0.0);
        check_value(f1_, 1.0);
    }

    const std::string& id() const noexcept { return id_; }
    double f0() const noexcept { return f0_; }
    double f1() const noexcept { return f1_; }
    bool vanishes_at_zero() const noexcept { return f0_ == 0.0; }

    /// f(x) for x in [0, 1]; endpoint values are the stored ones.
    double operator()(double x) const {
        if (x <= 0.0) return f0_;
        if (x >= 1.0) return f1_;
        const double v = profile_(x);
        check_value(v, x);
        return v;
    }

private:
    void check_value(double v, double x) const {
        if (std::isnan(v) || v == -kInf)
            fail(ErrorKind::input, "profile '" + id_ + "' returned " + (std::isnan(v) ? "NaN" : "-inf") +
                                       " at x = " + format_real(x));
    }

    std::string id_;
    Profile profile_;
    double f0_;
    double f1_;
};

namespace functions {

/// phi(x,y) = 1_(0,inf)(x) y: the absolutely continuous part [A]B.
inline PwFunction abs_part() {
    return {"abs-part", [](double x) { return 1.0 - x; }, 0.0, 0.0};
}

/// phi(x,y) = xy/(x+y): the parallel sum A:B.
inline PwFunction parallel() {
    return {"parallel", [](double x) { return x * (1.0 - x); }, 0.0, 0.0};
}

/// phi(x,y) = x + y.
inline PwFunction arith() {
    return {"arith", [](double) { return 1.0; }, 1.0, 1.0};
}

/// phi(x,y) = x.
inline PwFunction left() {
    return {"left", [](double x) { return x; }, 0.0, 1.0};
}

/// phi(x,y) = y.
inline PwFunction right() {
    return {"right", [](double x) { return 1.0 - x; }, 1.0, 0.0};
}

/// phi(x,y) = x^alpha y^(1-alpha), alpha in (0,1). In Kubo-Ando notation this
/// is A #_{1-alpha} B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1-alpha} A^{1/2}.
inline PwFunction geom(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(ErrorKind::input, "geom requires alpha in (0,1), got " + format_real(alpha));
    return {"geom:" + format_real(alpha),
            [alpha](double x) { return std::pow(x, alpha) * std::pow(1.0 - x, 1.0 - alpha); }, 0.0, 0.0};
}

/// phi(x,y) = (x/y)^alpha y for alpha > 1, +inf when x > 0 = y.
inline PwFunction power(double alpha) {
    if (!(alpha > 1.0))
        fail(ErrorKind::input, "power requires alpha > 1, got " + format_real(alpha));
    return {"power:" + format_real(alpha),
            [alpha](double x) { return std::pow(x, alpha) * std::pow(1.0 - x, 1.0 - alpha); }, 0.0, kInf};
}

/// phi(x,y) = x log(x/y), +inf when x > 0 = y.
inline PwFunction entropy() {
    return {"entropy", [](double x) { return x * std::log(x / (1.0 - x)); }, 0.0, kInf};
}

/// phi_n(x,y) = nxy/(nx + y), so phi_n(A,B) = (nA):B.
inline PwFunction phi_n(double n) {
    if (!(n > 0.0)) fail(ErrorKind::input, "phi_n requires n > 0");
    return {"phi-n:" + format_real(n),
            [n](double x) { return n * x * (1.0 - x) / (n * x + 1.0 - x); }, 0.0, 0.0};
}

/// h(x) = (1-x)/x on (0,1], 0 at 0.
inline PwFunction h() {
    return {"h", [](double x) { return (1.0 - x) / x; }, 0.0, 0.0};
}

/// h_n(x) = (1-x)/x on [1/n, 1], 0 below 1/n.
inline PwFunction h_n(double n) {
    if (!(n >= 1.0)) fail(ErrorKind::input, "h_n requires n >= 1");
    return {"h-n:" + format_real(n),
            [n](double x) { return x >= 1.0 / n ? (1.0 - x) / x : 0.0; }, 0.0, 0.0};
}

} // namespace functions

} // namespace pwcalc
