#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "slc/errors.hpp"
#include "slc/hypgeom.hpp"
#include "slc/symcurv.hpp"

using namespace slc;

namespace {

constexpr double kPi = std::numbers::pi;

SymMatrix random_sym(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g;
    std::vector<double> e(n * n);
    for (double& x : e) x = scale * g(rng);
    return SymMatrix::from_entries(n, e);
}

// Q diag(lam) Q^T with Q from a QR of a Gaussian matrix.
SymMatrix random_pd(std::mt19937_64& rng, int n, double lo, double hi) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
    std::vector<double> lam(n), qv(n * n);
    for (double& l : lam) l = std::exp(u(rng));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) qv[i * n + j] = q(i, j);
    return SymMatrix::conjugated(lam, qv);
}

Eigen::MatrixXd to_eigen(const SymMatrix& a) {
    Eigen::MatrixXd m(a.dim(), a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m(i, j) = a(i, j);
    return m;
}

}  // namespace

TEST(SymMatrix, ConstructionSymmetrizes) {
    const std::vector<double> e{1, 2, 4, 3};
    const auto a = SymMatrix::from_entries(2, e);
    EXPECT_EQ(a(0, 1), a(1, 0));
    EXPECT_DOUBLE_EQ(a(0, 1), 3.0);
}

TEST(SymMatrix, RejectsBadDimensions) {
    EXPECT_THROW(SymMatrix(1), ConfigError);
    EXPECT_THROW(SymMatrix(9), ConfigError);
    EXPECT_THROW(SymMatrix::from_rows({{1, 2}, {3}}), ConfigError);
}

TEST(Jacobi, MatchesEigenSolverAndReconstructs) {
    std::mt19937_64 rng(7);
    for (int n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const SymMatrix a = random_sym(rng, n, 3.0);
            const auto dec = jacobi_eigen(a);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(a));
            for (int i = 0; i < n; ++i) EXPECT_NEAR(dec.values[i], ref.eigenvalues()[i], 1e-11);
            const SymMatrix back = SymMatrix::conjugated(dec.values.values(), dec.vectors);
            EXPECT_LE((back - a).max_abs(), 1e-12 * std::max(1.0, a.max_abs()));
        }
    }
}

TEST(Jacobi, SpectrumSortedAndFlagConsistent) {
    const Spectrum s({3.0, -1.0, 2.0});
    EXPECT_EQ(s[0], -1.0);
    EXPECT_EQ(s[2], 3.0);
    EXPECT_FALSE(s.positive_definite());
    EXPECT_TRUE(Spectrum({0.1, 0.2}).positive_definite());
}

TEST(AngleParams, ValidatesRange) {
    EXPECT_THROW(AngleParams(0.0, 2), DomainError);
    EXPECT_THROW(AngleParams(kPi, 2), DomainError);
    EXPECT_THROW(AngleParams(1.0, 1), ConfigError);
    EXPECT_TRUE(AngleParams(3 * kPi / 4, 2).hyperbolic_regime());
    EXPECT_FALSE(AngleParams(kPi / 4, 2).hyperbolic_regime());
    EXPECT_NEAR(AngleParams(kPi / 2, 2).threshold(), 1.0, 1e-15);
}

TEST(ArcTan, DeterminantRouteAgrees) {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 50; ++trial) {
            // Large entries push the sum past pi, exercising the branch tracking.
            const SymMatrix a = random_sym(rng, n, trial % 2 ? 0.5 : 20.0);
            EXPECT_NEAR(arctan_by_determinant(a), arctan_matrix(a), 1e-10);
        }
    }
    EXPECT_THROW(arctan_by_determinant(SymMatrix::identity(5)), ConfigError);
}

TEST(ArcTan, DiagonalValue) {
    EXPECT_NEAR(arctan_matrix(SymMatrix::diagonal({1.0, 1.0})), kPi / 2, 1e-15);
}

TEST(RTheta, UmbilicClosedForm) {
    for (int n = 2; n <= 8; ++n)
        for (double lam : {0.01, 0.3, 1.0, 7.0})
            for (double f : {0.05, 0.5, 0.95}) {
                const AngleParams p(f * n * kPi / 2, n);
                const double got = r_theta(SymMatrix::identity(n).scaled(lam), p);
                EXPECT_NEAR(got, p.threshold() / lam, 1e-10 * std::max(1.0, got));
            }
}

TEST(RTheta, DiagTwoHalfAtRightAngle) {
    EXPECT_NEAR(r_theta(SymMatrix::diagonal({2.0, 0.5}), AngleParams(kPi / 2, 2)), 1.0, 1e-10);
}

TEST(RTheta, InvertsSLAndScales) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 7;
        const SymMatrix a = random_pd(rng, n, 0.05, 20.0);
        const AngleParams p(u(rng) * n * kPi / 2, n);
        const double r = r_theta(a, p);
        EXPECT_NEAR(sl_r(a, r), p.theta(), 1e-11);
        EXPECT_NEAR(r_theta(a.scaled(2.5), p), r / 2.5, 1e-10 * r);
    }
}

TEST(RTheta, DecreasesWhenShapeIncreases) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        const SymMatrix a = random_pd(rng, n, 0.1, 5.0);
        const SymMatrix b = a + random_pd(rng, n, 0.01, 1.0);
        const AngleParams p(0.7 * n * kPi / 2, n);
        EXPECT_GE(r_theta(a, p), r_theta(b, p));
    }
}

TEST(RTheta, RejectsNonConvex) {
    EXPECT_THROW(r_theta(SymMatrix::diagonal({1.0, 0.0}), AngleParams(1.0, 2)), NotConvexError);
    EXPECT_THROW(r_theta(SymMatrix::diagonal({1.0, -0.5}), AngleParams(1.0, 2)), NotConvexError);
}

TEST(RTheta, SLDerivativeMatchesDifference) {
    const Spectrum s({0.3, 1.1, 4.0});
    const double r = 0.8, e = 1e-6;
    EXPECT_NEAR(sl_r_derivative(s, r), (sl_r(s, r + e) - sl_r(s, r - e)) / (2 * e), 1e-8);
}

// For n = 3 and theta = pi the defining equation reduces to r^2 sigma_3 = sigma_1,
// and for n = 2, theta = pi/2 to r^2 sigma_2 = 1.
TEST(RTheta, ClassicalCurvatureIdentities) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const double r3 = r_theta(Spectrum({a, b, c}), AngleParams(kPi, 3));
        EXPECT_NEAR(r3 * r3, (a + b + c) / (a * b * c), 1e-9 * r3 * r3);
        const double r2 = r_theta(Spectrum({a, b}), AngleParams(kPi / 2, 2));
        EXPECT_NEAR(r2 * r2 * a * b, 1.0, 1e-10);
    }
}

TEST(ZerothCoeff, MatchesMatrixFormula) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 7;
        const SymMatrix a = random_pd(rng, n, 0.1, 3.0);
        const double r = 0.3 + trial * 0.1;
        const Eigen::MatrixXd m = to_eigen(a);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        const double want = ((id - m * m) * (id + r * r * m * m).inverse()).trace();
        EXPECT_NEAR(zeroth_coeff(a, r), want, 1e-11 * std::max(1.0, std::abs(want)));
    }
}

// Under the unit normal flow d/dt SL_r = r * zeroth coefficient.
TEST(ZerothCoeff, IsNormalFlowDerivativeOfSL) {
    const Spectrum s({0.2, 0.9, 2.5});
    const double r = 1.7, e = 1e-5;
    const double d = (sl_r(normal_flow_shape(s, e), r) - sl_r(normal_flow_shape(s, 0.0), r)) / e;
    EXPECT_NEAR(d / r, zeroth_coeff(s, r), 1e-4);
}

TEST(ZerothCoeff, PositiveAboveThresholdOnConstraintSurface) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = INFINITY;
    for (int trial = 0; trial < 20000; ++trial) {
        const int n = 2 + trial % 4;
        const AngleParams p(((n - 1) + 0.999 * u(rng)) * kPi / 2, n);
        std::vector<double> lam(n);
        for (double& l : lam) l = std::exp(6.0 * u(rng) - 3.0);
        const double r = p.threshold() * (1.0 + 1e-4 + 3.0 * u(rng));
        const double scale = r_theta(Spectrum(lam), p) / r;
        for (double& l : lam) l *= scale;
        worst = std::min(worst, zeroth_coeff(Spectrum(lam), r));
    }
    EXPECT_GT(worst, 0.0);
}

TEST(ZerothCoeff, MinimumVanishesAtThreshold) {
    for (int n : {2, 3, 4}) {
        for (double f : {0.0, 0.3, 0.8}) {
            const AngleParams p(((n - 1) + f) * kPi / 2, n);
            const auto m = min_zeroth_coeff(p, p.threshold());
            EXPECT_NEAR(m.value, 0.0, 1e-8) << "n=" << n << " f=" << f;
        }
    }
}

TEST(ZerothCoeff, MinimumPositiveAboveThreshold) {
    for (int n : {2, 3}) {
        const AngleParams p(((n - 1) + 0.5) * kPi / 2, n);
        const auto m = min_zeroth_coeff(p, 1.5 * p.threshold());
        EXPECT_GT(m.value, 1e-6);
        EXPECT_NEAR(m.value, std::min(m.critical_value, m.descent_value), 1e-15);
    }
}

// At theta = (n-1)pi/2 and r = tan(theta/n) the zero is attained away from
// multiples of the identity, e.g. diag(2, 0.5) for n = 2.
TEST(ZerothCoeff, BoundaryCaseNonUmbilicZero) {
    EXPECT_NEAR(zeroth_coeff(SymMatrix::diagonal({2.0, 0.5}), 1.0), 0.0, 1e-15);
}

TEST(ZerothCoeff, RejectsOutsideRegime) {
    EXPECT_THROW(min_zeroth_coeff(AngleParams(1.0, 2), 5.0), DomainError);
    const AngleParams p(3 * kPi / 4, 2);
    EXPECT_THROW(min_zeroth_coeff(p, 0.5 * p.threshold()), DomainError);
}

TEST(SinInequality, NonNegativeWithSingleZero) {
    int zeros = 0;
    for (int n = 1; n <= 8; ++n)
        for (int m = n + 1; m <= 8; ++m)
            for (int k = 1; k <= 200; ++k) {
                const double t = kPi / 2 * k / 200;
                const double v = sin_inequality_margin(n, m, t);
                EXPECT_GE(v, -1e-15);
                if (std::abs(v) < 1e-12) {
                    ++zeros;
                    EXPECT_EQ(n, 1);
                    EXPECT_EQ(m, 2);
                    EXPECT_EQ(k, 200);
                }
            }
    EXPECT_EQ(zeros, 1);
}

TEST(SinInequality, RejectsBadArguments) {
    EXPECT_THROW(sin_inequality_margin(3, 2, 1.0), DomainError);
    EXPECT_THROW(sin_inequality_margin(1, 2, 2.0), DomainError);
}

TEST(EigenMonotonicity, HoldsForOrderedPairs) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 7;
        const SymMatrix a = random_sym(rng, n);
        const SymMatrix a2 = a - random_pd(rng, n, 1e-3, 2.0);
        EXPECT_TRUE(eigen_monotonicity_check(a, a2));
    }
    EXPECT_THROW(eigen_monotonicity_check(SymMatrix::diagonal({1.0, 1.0}), SymMatrix::diagonal({2.0, 0.0})),
                 PreconditionError);
}
