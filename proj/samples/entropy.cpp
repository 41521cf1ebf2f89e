// Geometric mean and relative entropy of two qubit states, including a pair
// where the entropy is +inf.

#include <cstdio>

#include <pwcalc/pwcalc.hpp>

using namespace pwcalc;

static void entropy(const char* label, const PsdMatrix& a, const PsdMatrix& b) {
    const auto v = trace_functional(a, b, functions::entropy());
    if (v.is_infinite())
        std::printf("%s: Tr psi = +inf\n", label);
    else
        std::printf("%s: Tr psi = %.12f\n", label, v.value());
}

int main() {
    Matrix r{{0.7, 0.1}, {0.1, 0.3}};
    r(0, 1) = cplx{0.1, 0.2};
    r(1, 0) = cplx{0.1, -0.2};
    const PsdMatrix rho(r);
    const PsdMatrix sigma(Matrix{{0.5, 0.0}, {0.0, 0.5}});
    const PsdMatrix pure(Matrix{{1.0, 0.0}, {0.0, 0.0}});

    const Matrix g = weighted_geometric_mean(rho, sigma, 0.5);
    std::printf("rho # sigma diagonal: %.12f %.12f\n", g(0, 0).real(), g(1, 1).real());

    entropy("rho vs maximally mixed", rho, sigma);
    entropy("rho vs pure", rho, pure);
    entropy("pure vs rho", pure, rho);
    return 0;
}
