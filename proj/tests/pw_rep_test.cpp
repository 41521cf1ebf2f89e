#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <pwcalc/pw_rep.hpp>

#include "test_support.hpp"

namespace pwcalc {
namespace {

using namespace testing;

const Matrix kAndoA{{1.0, 0.0}, {0.0, 0.0}};
const Matrix kAndoB{{1.0, 1.0}, {1.0, 1.0}};

/// A random pair; every third one is rank deficient in both slots.
std::pair<PsdMatrix, PsdMatrix> random_pair(Rng& rng, int trial, std::size_t max_n = 10) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % max_n;
    switch (trial % 3) {
    case 0: return {random_pd(n, rng), random_psd_rank(n, 1 + trial % n, rng)};
    case 1: return {random_psd_rank(n, 1 + (trial / 3) % n, rng), random_psd_rank(n, 1 + (trial / 5) % n, rng)};
    default: {
        const auto ka = random_subset(n, (trial / 3) % n, rng);
        const auto kb = random_subset(n, (trial / 7) % n, rng);
        return {exact_kernel_psd(n, ka, rng), exact_kernel_psd(n, kb, rng)};
    }
    }
}

TEST(BuildRep, EqualIdentities) {
    const PsdMatrix id(Matrix::identity(2));
    const auto rep = build_rep(id, id);
    EXPECT_EQ(rep.rank, 2u);
    EXPECT_LT(abs_err(rep.left_density, Matrix::identity(2) * 0.5), 1e-15);
    EXPECT_LT(abs_err(rep.right_density, Matrix::identity(2) * 0.5), 1e-15);
}

TEST(BuildRep, OrthogonalSupports) {
    const auto rep = build_rep(PsdMatrix(Matrix::diagonal({1.0, 0.0})), PsdMatrix(Matrix::diagonal({0.0, 1.0})));
    EXPECT_EQ(rep.rank, 2u);
    // basis-independent forms of T = I, R = diag(1,0), S = diag(0,1)
    const Matrix& q = rep.support_basis;
    EXPECT_LT(abs_err(rep.transfer.adjoint() * rep.transfer, Matrix::identity(2)), 1e-15);
    EXPECT_LT(abs_err(q * rep.left_density * q.adjoint(), Matrix::diagonal({1.0, 0.0})), 1e-15);
    EXPECT_LT(abs_err(q * rep.right_density * q.adjoint(), Matrix::diagonal({0.0, 1.0})), 1e-15);
}

TEST(BuildRep, AndoPairContractions) {
    const auto rep = build_rep(PsdMatrix(kAndoA), PsdMatrix(kAndoB));
    EXPECT_LT(abs_err(rep.left_density + rep.right_density, Matrix::identity(rep.rank)), 1e-9);
    EXPECT_LE(spectral_norm(rep.left_contraction), 1.0 + 1e-9);
    EXPECT_LE(spectral_norm(rep.right_contraction), 1.0 + 1e-9);
}

TEST(BuildRep, ZeroPairHasEmptySupport) {
    const PsdMatrix z(Matrix(3, 3));
    const auto rep = build_rep(z, z);
    EXPECT_EQ(rep.rank, 0u);
    EXPECT_EQ(max_abs(gamma(rep, Matrix(0, 0))), 0.0);
}

TEST(BuildRep, DimensionMismatch) {
    try {
        (void)build_rep(PsdMatrix(Matrix::identity(2)), PsdMatrix(Matrix::identity(3)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::input);
    }
}

TEST(BuildRep, InvariantsOnRandomPairs) {
    Rng rng(1001);
    for (int trial = 0; trial < 200; ++trial) {
        const auto [a, b] = random_pair(rng, trial);
        const auto rep = build_rep(a, b);
        const std::size_t r = rep.rank;
        EXPECT_LT(oracle_norm(rep.left_density + rep.right_density - Matrix::identity(r)), 1e-9);
        // independent route: S = Y*Y
        EXPECT_LT(oracle_norm(rep.left_density + rep.right_contraction.adjoint() * rep.right_contraction -
                              Matrix::identity(r)),
                  1e-8)
            << "trial " << trial;
        EXPECT_LT(rel_err(rep.left_contraction * rep.transfer, oracle_support_sqrt(a), 1e-12), 1e-8) << "trial " << trial;
        EXPECT_LT(rel_err(rep.right_contraction * rep.transfer, oracle_support_sqrt(b), 1e-12), 1e-8) << "trial " << trial;
        for (double x : rep.left_spectrum.eigenvalues) {
            EXPECT_GE(x, -1e-9);
            EXPECT_LE(x, 1.0 + 1e-9);
        }
        if (r > 0) {
            EXPECT_GT(rep.support_eigenvalues.front(), 0.0);
        }
    }
}

TEST(Gamma, UnitAndDensities) {
    Rng rng(1002);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [a, b] = random_pair(rng, trial);
        const auto rep = build_rep(a, b);
        const double scale = std::max(1e-300, oracle_norm(a.matrix() + b.matrix()));
        EXPECT_LT(abs_err(gamma(rep, Matrix::identity(rep.rank)), a.matrix() + b.matrix()) / scale, 1e-9);
        EXPECT_LT(abs_err(gamma(rep, rep.left_density), a) / scale, 1e-9);
        EXPECT_LT(abs_err(gamma(rep, rep.right_density), b) / scale, 1e-9);
    }
}

TEST(Gamma, InverseKnownValues) {
    Rng rng(1003);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [a, b] = random_pair(rng, trial);
        const auto rep = build_rep(a, b);
        const std::size_t r = rep.rank;
        EXPECT_LT(abs_err(gamma_inv(rep, a), rep.left_density), 1e-8) << trial;
        EXPECT_LT(abs_err(gamma_inv(rep, a + b), Matrix::identity(r)), 1e-8) << trial;
        EXPECT_LT(abs_err(gamma_inv(rep, scaled(b, 0.5)), rep.right_density * 0.5), 1e-8) << trial;
    }
}

TEST(Gamma, RoundTripAndMonotone) {
    Rng rng(1004);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const auto [a, b] = random_pair(rng, trial);
        const auto rep = build_rep(a, b);
        const std::size_t n = a.dim();
        const Matrix sum = a.matrix() + b.matrix();
        const Matrix root = oracle_sqrt(sum);
        // 0 <= K <= K' <= I  =>  C = root K root <= C' = root K' root <= A+B
        const Matrix w = random_unitary(n, rng);
        std::vector<double> d(n), dp(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = u(rng);
            dp[i] = d[i] + (1.0 - d[i]) * u(rng);
        }
        const auto c = PsdMatrix::trusted(root * w * Matrix::diagonal(d) * w.adjoint() * root);
        const auto cp = PsdMatrix::trusted(root * w * Matrix::diagonal(dp) * w.adjoint() * root);
        const auto g = gamma_inv(rep, c);
        const auto gp = gamma_inv(rep, cp);
        EXPECT_LT(rel_err(gamma(rep, g), c, 1e-300), 1e-8) << trial;
        EXPECT_GE(oracle_min_eig(gp.matrix() - g.matrix()), -1e-8) << trial;
    }
}

TEST(Gamma, RejectsUndominatedOperand) {
    const PsdMatrix a(Matrix::diagonal({1.0, 0.0}));
    const auto rep = build_rep(a, a);
    try {
        (void)gamma_inv(rep, PsdMatrix(Matrix::diagonal({0.0, 1.0})));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domination);
    }
    EXPECT_THROW((void)gamma(rep, Matrix::identity(2)), Error);
}

TEST(PwEval, LinearProfiles) {
    Rng rng(1005);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [a, b] = random_pair(rng, trial);
        const auto rep = build_rep(a, b);
        const double scale = std::max(1.0, oracle_norm(a.matrix() + b.matrix()));
        EXPECT_LT(abs_err(pw_eval(rep, functions::arith()), a.matrix() + b.matrix()) / scale, 1e-9);
        EXPECT_LT(abs_err(pw_eval(rep, functions::left()), a) / scale, 1e-8);
        EXPECT_LT(abs_err(pw_eval(rep, functions::right()), b) / scale, 1e-8);
    }
}

TEST(PwEval, GeometricMeanMatchesCongruenceFormula) {
    Rng rng(1006);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const auto a = random_pd(n, rng);
        const auto b = random_psd_rank(n, 1 + trial % n, rng);
        const auto got = pw_eval(a, b, functions::geom(0.5));
        EXPECT_LT(rel_err(got, oracle_geometric_mean(a, b, 0.5), 1e-12), 1e-8) << trial;
    }
}

TEST(PwEval, OperatorHomogeneity) {
    Rng rng(1007);
    const std::vector<PwFunction> fs = {functions::parallel(), functions::geom(0.3), functions::abs_part(),
                                        functions::arith()};
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const auto [a, b] = random_pair(rng, trial, 6);
        const Matrix w = random_matrix(n, n, rng) + Matrix::identity(n) * 2.0;  // invertible a.s.
        const auto wa = PsdMatrix::trusted(w.adjoint() * a.matrix() * w);
        const auto wb = PsdMatrix::trusted(w.adjoint() * b.matrix() * w);
        for (const auto& f : fs) {
            const Matrix lhs = pw_eval(wa, wb, f);
            const Matrix rhs = w.adjoint() * pw_eval(a, b, f).matrix() * w;
            EXPECT_LT(abs_err(lhs, rhs) / std::max(1.0, oracle_norm(rhs)), 1e-7) << f.id() << " trial " << trial;
        }
    }
}

TEST(PwEval, ScalingHomogeneity) {
    Rng rng(1008);
    for (int trial = 0; trial < 30; ++trial) {
        const auto [a, b] = random_pair(rng, trial);
        for (double t : {0.5, 2.0, 10.0}) {
            for (const auto& f : {functions::parallel(), functions::geom(0.7), functions::abs_part()}) {
                const Matrix lhs = pw_eval(scaled(a, t), scaled(b, t), f);
                const Matrix rhs = pw_eval(a, b, f).matrix() * t;
                EXPECT_LT(abs_err(lhs, rhs) / std::max(1e-300, oracle_norm(rhs)), 1e-9) << f.id();
            }
        }
    }
}

// f(YY*) = f(0)(I - VV*) + V f(S) V* for polynomials f, and the analogue for X, U, R.
TEST(PwEval, PolynomialFunctionsOfContractions) {
    Rng rng(1009);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const auto [a, b] = random_pair(rng, trial, 8);
        const auto rep = build_rep(a, b);
        std::vector<double> coef(1 + trial % 7);
        for (auto& c : coef) c = u(rng);
        auto poly = [&](const Matrix& m) {
            Matrix acc = Matrix::identity(m.rows()) * coef.back();
            for (std::size_t k = coef.size() - 1; k-- > 0;) acc = acc * m + Matrix::identity(m.rows()) * coef[k];
            return acc;
        };
        const std::size_t n = rep.dim;
        const Matrix& y = rep.right_contraction;
        const Matrix& v = rep.right_isometry;
        const Matrix lhs_y = poly(y * y.adjoint());
        const Matrix rhs_y = (Matrix::identity(n) - v * v.adjoint()) * coef[0] + v * poly(rep.right_density) * v.adjoint();
        EXPECT_LT(abs_err(lhs_y, rhs_y), 1e-8) << trial;

        const Matrix& x = rep.left_contraction;
        const Matrix& uu = rep.left_isometry;
        const Matrix lhs_x = poly(x * x.adjoint());
        const Matrix rhs_x = (Matrix::identity(n) - uu * uu.adjoint()) * coef[0] + uu * poly(rep.left_density) * uu.adjoint();
        EXPECT_LT(abs_err(lhs_x, rhs_x), 1e-8) << trial;

        // B^{1/2} V f(S) V* B^{1/2} = B^{1/2} f(YY*) B^{1/2}
        const Matrix& rb = rep.sqrt_b.matrix();
        EXPECT_LT(abs_err(rb * v * poly(rep.right_density) * v.adjoint() * rb, rb * lhs_y * rb) /
                      std::max(1.0, oracle_norm(b)),
                  1e-8);
    }
}

// phi(x,y) = y g(y) on x + y = 1 gives phi(A,B) = B^{1/2} V g(S) V* B^{1/2}.
TEST(PwEval, RightWeightedProfiles) {
    Rng rng(1010);
    auto g = [](double y) { return 1.0 + y * y - 0.5 * y; };
    const PwFunction phi("y*g(y)", [&](double x) { return (1.0 - x) * g(1.0 - x); }, g(1.0), 0.0);
    for (int trial = 0; trial < 60; ++trial) {
        const auto [a, b] = random_pair(rng, trial, 8);
        const auto rep = build_rep(a, b);
        const Matrix& v = rep.right_isometry;
        const Matrix gs = eig_hermitian(HermitianMatrix::trusted(rep.right_density)).apply(g);
        const Matrix want = rep.sqrt_b.matrix() * v * gs * v.adjoint() * rep.sqrt_b.matrix();
        EXPECT_LT(abs_err(pw_eval(rep, phi), want) / std::max(1.0, oracle_norm(b)), 1e-8) << trial;
    }
}

TEST(PwEval, ExtendedValueIsAnError) {
    try {
        (void)pw_eval(PsdMatrix(Matrix{{1.0}}), PsdMatrix(Matrix{{0.0}}), functions::entropy());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::extended_value);
    }
}

TEST(PwEval, ReportsSpectralMargin) {
    const PsdMatrix id(Matrix::identity(2));
    const auto ev = pw_eval_detailed(build_rep(id, id), functions::parallel());
    EXPECT_NEAR(ev.profile.spectral_margin, 0.5 - 1e-8, 1e-12);
    const auto ando = pw_eval_detailed(build_rep(PsdMatrix(kAndoA), PsdMatrix(kAndoB)), functions::parallel());
    EXPECT_EQ(ando.profile.spectral_margin, kInf);
    EXPECT_EQ(ando.profile.num_zero, 1u);
    EXPECT_EQ(ando.profile.num_one, 1u);
}

TEST(PwPairing, EntropyCases) {
    const PsdMatrix id(Matrix::identity(3));
    const auto v = pw_pairing(id, id, functions::entropy(), id);
    ASSERT_TRUE(v.is_finite());
    EXPECT_NEAR(v.value(), 0.0, 1e-14);
    const auto inf = pw_pairing(PsdMatrix(Matrix{{1.0}}), PsdMatrix(Matrix{{0.0}}), functions::entropy(),
                                PsdMatrix(Matrix{{1.0}}));
    EXPECT_TRUE(inf.is_infinite());
}

TEST(PwPairing, NegligibleWeightDoesNotTriggerInfinity) {
    // rho lives on ker(A+B)'s complement part where x < 1; the +inf direction carries no weight.
    const PsdMatrix a(Matrix::diagonal({1.0, 1.0}));
    const PsdMatrix b(Matrix::diagonal({0.0, 1.0}));
    const PsdMatrix rho(Matrix::diagonal({0.0, 1.0}));
    const auto res = pw_pairing_detailed(build_rep(a, b), functions::entropy(), rho);
    ASSERT_TRUE(res.value.is_finite());
    EXPECT_NEAR(res.value.value(), 0.0, 1e-14);
    EXPECT_EQ(res.infinite_weight, 0.0);
}

TEST(PwPairing, ParallelMatchesTraceOfEvaluation) {
    Rng rng(1011);
    for (int trial = 0; trial < 60; ++trial) {
        const auto [a, b] = random_pair(rng, trial);
        const auto rho = random_psd_rank(a.dim(), 1 + trial % a.dim(), rng);
        const auto rep = build_rep(a, b);
        const auto p = pw_pairing(rep, functions::parallel(), rho);
        const double want = trace(rho.matrix() * pw_eval(rep, functions::parallel()).matrix()).real();
        ASSERT_TRUE(p.is_finite());
        EXPECT_NEAR(p.value(), want, 1e-9 * std::max(1.0, std::abs(want)));
    }
}

TEST(PwPairing, DimensionMismatch) {
    const PsdMatrix id(Matrix::identity(2));
    EXPECT_THROW((void)pw_pairing(id, id, functions::arith(), PsdMatrix(Matrix::identity(3))), Error);
}

TEST(EvalSequence, ParallelSumProfilesOnIdentity) {
    const std::size_t d = 3;
    const PsdMatrix id(Matrix::identity(d));
    std::vector<PwFunction> fs;
    for (int k = 0; k <= 40; ++k) fs.push_back(functions::phi_n(std::ldexp(1.0, k)));
    const auto rep = build_rep(id, id);
    const auto rpt = eval_sequence(rep, fs, id);
    ASSERT_EQ(rpt.values.size(), fs.size());
    ASSERT_EQ(rpt.gaps.size(), fs.size() - 1);
    for (std::size_t k = 0; k < fs.size(); ++k) {
        // weight Tr(T T*) = 2d at x = 1/2, profile n/(2(n+1))
        const double n = std::ldexp(1.0, static_cast<int>(k));
        EXPECT_NEAR(rpt.values[k].value(), 2.0 * d * n / (2.0 * (n + 1.0)), 1e-12);
    }
    EXPECT_TRUE(rpt.converged);
}

TEST(EvalSequence, ConstantListConverges) {
    Rng rng(1012);
    const auto a = random_pd(4, rng), b = random_pd(4, rng);
    const std::vector<PwFunction> fs(3, functions::geom(0.4));
    const auto rpt = eval_sequence(a, b, fs, PsdMatrix(Matrix::identity(4)));
    EXPECT_EQ(rpt.values[0], rpt.values[1]);
    EXPECT_EQ(rpt.values[1], rpt.values[2]);
    EXPECT_TRUE(rpt.converged);
}

TEST(EvalSequence, TooShortNeverConverged) {
    const PsdMatrix id(Matrix::identity(2));
    const std::vector<PwFunction> fs(2, functions::arith());
    EXPECT_FALSE(eval_sequence(id, id, fs, id).converged);
    EXPECT_THROW((void)eval_sequence(id, id, std::span<const PwFunction>{}, id), Error);
}

TEST(EvalSequence, TruncatedDerivativeProfilesIncrease) {
    Rng rng(1013);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 6;
        const auto a = random_pd(n, rng);
        const auto b = random_psd_rank(n, 1 + trial % n, rng);
        std::vector<PwFunction> fs;
        for (int k = 1; k <= 64; k *= 2) fs.push_back(functions::h_n(k));
        const auto rpt = eval_sequence(a, b, fs, random_pd(n, rng));
        for (std::size_t k = 0; k + 1 < rpt.values.size(); ++k)
            EXPECT_LE(rpt.values[k].value(), rpt.values[k + 1].value() + 1e-12);
    }
}

TEST(EvalSequence, InfiniteTermsGiveInfiniteGaps) {
    const PsdMatrix a(Matrix{{1.0}}), b(Matrix{{0.0}});
    const std::vector<PwFunction> fs = {functions::parallel(), functions::entropy(), functions::entropy()};
    const auto rpt = eval_sequence(a, b, fs, PsdMatrix(Matrix{{1.0}}));
    EXPECT_EQ(rpt.gaps[0], kInf);
    EXPECT_EQ(rpt.gaps[1], 0.0);
}

} // namespace
} // namespace pwcalc
