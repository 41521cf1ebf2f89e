#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace pwcalc {

enum class ErrorKind {
    input,          // malformed or inconsistent arguments
    precondition,   // a documented precondition of the operation does not hold
    domination,     // operand not dominated by a multiple of A+B
    not_psd,        // eigenvalue below -psd_tol
    numeric,        // eigensolver failure, residual blow-up
    extended_value  // a finite result was requested but the value is +inf
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::input: return "input";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::domination: return "domination";
    case ErrorKind::not_psd: return "not-psd";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::extended_value: return "extended-value";
    }
    return "unknown";
}

/// Short %g rendering for messages and identifiers.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace pwcalc
