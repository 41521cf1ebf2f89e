// Lebesgue decomposition of B with respect to A, and the parallel sums
// (2^k A):B creeping up to the continuous part.

#include <cstdio>

#include <pwcalc/pwcalc.hpp>

using namespace pwcalc;

static void show(const char* name, const Matrix& m) {
    std::printf("%s =\n", name);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) std::printf("  %9.5f", m(i, j).real());
        std::printf("\n");
    }
}

int main() {
    const PsdMatrix a(Matrix{{2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}});
    const PsdMatrix b(Matrix{{1.0, 0.5, 0.5}, {0.5, 1.0, 0.5}, {0.5, 0.5, 1.0}});

    const auto d = lebesgue_decompose(a, b);
    show("Bc", d.absolutely_continuous);
    show("Bs", d.singular);
    show("P", d.projection);
    std::printf("(A, Bs) singular: %s\n", is_mutually_singular(a, d.singular).singular ? "yes" : "no");

    const auto lim = parallel_sum_limit(a, b);
    for (std::size_t k = 0; k < lim.gaps.size(); k += 8)
        std::printf("k = %2zu  gap %.3e\n", k, lim.gaps[k]);
    std::printf("converged after %zu doublings\n", lim.iterates.size());
    return 0;
}
