#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "slc/barriers.hpp"
#include "slc/errors.hpp"
#include "slc/graphsolve.hpp"

using namespace slc;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTheta = 3 * kPi / 4;

GridSpec fuchsian(int n = 2) { return {GraphMode::FuchsianConstant, n, 0, 1.0, OuterBoundary::Dirichlet}; }
GridSpec rotsym(int cells, double extent = 1.0, OuterBoundary outer = OuterBoundary::Dirichlet, int n = 2) {
    return {GraphMode::RotSymProfile, n, cells, extent, outer};
}
GridSpec disk(int cells, double a = 0.5) { return {GraphMode::Disk2D, 2, cells, a, OuterBoundary::Dirichlet}; }

GraphField perturbed_disk(int cells, double d, double amp) {
    GraphField g = GraphField::constant(disk(cells), d);
    for (int k = 0; k < g.size(); ++k)
        if (g.is_boundary(k)) g.set_height(k, d * (1 + amp * std::cos(2 * g.angle(k))));
    return harmonic_extension(g);
}

// A smooth bump vanishing on the boundary square of half-width a.
std::vector<double> bump(const GraphField& g) {
    std::vector<double> v(g.size(), 0.0);
    const double a = g.grid().extent;
    for (int k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) continue;
        const auto c = g.coords(k);
        v[k] = std::cos(kPi * c[0] / (2 * a)) * std::cos(kPi * c[1] / (2 * a)) * (1 + 0.5 * c[0]);
    }
    return v;
}

SolverConfig config(double r, double tol = 1e-10) {
    SolverConfig c;
    c.theta = kTheta;
    c.target_r = r;
    c.newton_tol = tol;
    return c;
}

double max_abs_diff(const GraphField& a, const GraphField& b) {
    double m = 0.0;
    for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.height(k) - b.height(k)));
    return m;
}

}  // namespace

TEST(GridSpec, Validation) {
    EXPECT_THROW(rotsym(2).validate(), ConfigError);
    GridSpec g = disk(8);
    g.n = 3;
    EXPECT_THROW(g.validate(), ConfigError);
    EXPECT_THROW(GraphField(disk(8), std::vector<double>(3, 1.0)), ConfigError);
    EXPECT_THROW(GraphField::constant(rotsym(8), -0.1), DomainError);
    EXPECT_EQ(disk(8).node_count(), 81);
    EXPECT_DOUBLE_EQ(disk(8).spacing(), 0.125);
    EXPECT_EQ(graph_mode_from_string(to_string(GraphMode::Disk2D)), GraphMode::Disk2D);
    EXPECT_THROW(graph_mode_from_string("polar"), ConfigError);
}

TEST(CurvatureField, ConstantGraphsAreEquidistants) {
    const AngleParams p(kTheta, 2);
    const double want = level_curvature(p, 0.7);
    for (const GridSpec& g : {fuchsian(), rotsym(8), disk(8)}) {
        const auto f = curvature_field(GraphField::constant(g, 0.7), p);
        for (int k = 0; k < static_cast<int>(f.size()); ++k) {
            if (std::isnan(f[k])) continue;
            EXPECT_NEAR(f[k], want, 1e-12);
        }
    }
    const AngleParams p3(((3 - 1) + 0.5) * kPi / 2, 3);
    const auto f3 = curvature_field(GraphField::constant(rotsym(8, 1.0, OuterBoundary::Reflecting, 3), 0.4), p3);
    for (double v : f3) EXPECT_NEAR(v, level_curvature(p3, 0.4), 1e-12);
}

TEST(CurvatureField, BaseIsNotConvex) {
    EXPECT_THROW(curvature_field(GraphField::constant(fuchsian(), 0.0), AngleParams(kTheta, 2)), NotConvexError);
}

// Upper cap of the geodesic sphere of radius rho about the base origin;
// for n = 2 and theta = pi/2 its curvature is tanh(rho).
TEST(CurvatureField, SphericalCap) {
    const double rho = 1.2;
    const AngleParams p(kPi / 2, 2);
    double prev = INFINITY;
    for (int cells : {16, 32, 64}) {
        GraphField g = GraphField::constant(disk(cells), 1.0);
        for (int k = 0; k < g.size(); ++k) {
            const auto c = g.coords(k);
            g.set_height(k, std::acosh(std::cosh(rho) / (std::cosh(c[0]) * std::cosh(c[1]))));
        }
        const auto f = curvature_field(g, p);
        double err = 0.0;
        for (double v : f)
            if (!std::isnan(v)) err = std::max(err, std::abs(v - std::tanh(rho)));
        EXPECT_LT(err, 0.02);
        EXPECT_LT(err, prev / 3.0);
        prev = err;
    }
}

TEST(LinearizedOperator, ActionOnZeroAndConstants) {
    const AngleParams p(kTheta, 2);
    const double d = 0.9, r = 2.0, lam = std::tanh(d);
    const GraphField g = GraphField::constant(rotsym(16, 1.0, OuterBoundary::Reflecting), d);
    const auto op = linearized_operator(g, p, r);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(g.size());
    EXPECT_EQ((op * zero).norm(), 0.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.size());
    const Eigen::VectorXd v = op * ones;
    for (int k = 0; k < g.size(); ++k) EXPECT_NEAR(v[k], 2 * (1 - lam * lam) / (1 + r * r * lam * lam), 1e-12);
}

// On the equidistant at height d the induced metric is cosh(d)^2 times the
// base metric, so the operator is -(1 + r^2 l^2)^-1 Delta_base / cosh(d)^2 + Z.
TEST(LinearizedOperator, UmbilicRadialOracle) {
    const AngleParams p(kTheta, 3);
    const double d = 0.6, r = 4.0, lam = std::tanh(d);
    auto f = [](double x) { return std::cos(1.3 * x) + 0.2 * x * x; };
    auto f1 = [](double x) { return -1.3 * std::sin(1.3 * x) + 0.4 * x; };
    auto f2 = [](double x) { return -1.69 * std::cos(1.3 * x) + 0.4; };
    double prev = INFINITY;
    for (int cells : {16, 32, 64}) {
        const GraphField g = GraphField::constant(rotsym(cells, 1.0, OuterBoundary::Dirichlet, 3), d);
        const auto op = linearized_operator(g, p, r);
        Eigen::VectorXd fv(g.size());
        for (int k = 0; k < g.size(); ++k) fv[k] = f(g.coords(k)[0]);
        const Eigen::VectorXd v = op * fv;
        double err = 0.0;
        for (int k = 1; k < g.size() - 1; ++k) {
            const double x = g.coords(k)[0];
            const double lap = f2(x) + 2.0 / std::tanh(x) * f1(x);
            const double want = -lap / (std::cosh(d) * std::cosh(d) * (1 + r * r * lam * lam)) +
                                3 * (1 - lam * lam) / (1 + r * r * lam * lam) * f(x);
            err = std::max(err, std::abs(v[k] - want));
        }
        EXPECT_LT(err, prev / 3.5);
        prev = err;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(HeightJacobian, MatchesCentralDifferences) {
    const GraphField g = perturbed_disk(32, 1.0, 0.05);
    const double r = 3.0, eps = 1e-5;
    const auto dir = bump(g);
    GraphField plus = g, minus = g;
    for (int k = 0; k < g.size(); ++k) {
        plus.set_height(k, g.height(k) + eps * dir[k]);
        minus.set_height(k, g.height(k) - eps * dir[k]);
    }
    const auto sp = sl_field(plus, r), sm = sl_field(minus, r);
    const auto jac = height_jacobian(g, r);
    const Eigen::VectorXd jv = jac * Eigen::Map<const Eigen::VectorXd>(dir.data(), dir.size());
    double num = 0.0, den = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) continue;
        const double fd = (sp[k] - sm[k]) / (2 * eps);
        num = std::max(num, std::abs(fd - jv[k]));
        den = std::max(den, std::abs(fd));
    }
    EXPECT_LT(num / den, 1e-3);
}

TEST(LinearizedOperator, ZerothOrderNonNegativeOnSolutions) {
    const AngleParams p(kTheta, 2);
    const auto sol = newton_solve(perturbed_disk(32, 1.0, 0.05), config(3.0));
    const auto op = linearized_operator(sol.field, p, 3.0);
    const Eigen::VectorXd z = op * Eigen::VectorXd::Ones(sol.field.size());
    for (int k = 0; k < sol.field.size(); ++k)
        if (!sol.field.is_boundary(k)) EXPECT_GE(z[k], -1e-10);
}

TEST(Newton, FuchsianClosedForm) {
    for (int n = 2; n <= 5; ++n) {
        for (double f : {0.2, 0.7}) {
            const double theta = ((n - 1) + f) * kPi / 2;
            const AngleParams p(theta, n);
            for (double s : {1.2, 3.0, 50.0}) {
                SolverConfig c = config(s * p.threshold());
                c.theta = theta;
                const auto res = newton_solve(GraphField::constant(fuchsian(n), 0.5), c);
                EXPECT_NEAR(res.field.height(0), dist_upper(p, c.target_r), 1e-9);
                EXPECT_TRUE(res.report.barrier.clean());
            }
        }
    }
}

TEST(Newton, DiskConstantBoundaryIsExact) {
    const AngleParams p(kTheta, 2);
    const double d = 0.8;
    const auto res = newton_solve(GraphField::constant(disk(16), d), config(level_curvature(p, d)));
    for (double v : res.field.heights()) EXPECT_NEAR(v, d, 1e-12);
}

TEST(Newton, QuadraticTail) {
    const auto res = newton_solve(perturbed_disk(16, 1.0, 0.05), config(3.0, 1e-11));
    const auto& h = res.report.residuals;
    ASSERT_GE(h.size(), 4u);
    const std::size_t m = h.size();
    // Last contraction before the floor: res_{k+1} <= C res_k^2.
    const double c = h[m - 2] / (h[m - 3] * h[m - 3]);
    EXPECT_LT(c, 1e3);
}

TEST(Newton, UniqueFromDistinctStarts) {
    const GraphField a = perturbed_disk(16, 1.0, 0.05);
    GraphField b = a;
    const auto v = bump(a);
    for (int k = 0; k < b.size(); ++k) b.set_height(k, a.height(k) + 0.08 * v[k]);
    const auto ra = newton_solve(a, config(3.0));
    const auto rb = newton_solve(b, config(3.0));
    EXPECT_LT(max_abs_diff(ra.field, rb.field), 1e-8);
}

TEST(Newton, RefusesInadmissibleParameters) {
    const AngleParams p(kTheta, 2);
    EXPECT_THROW(newton_solve(GraphField::constant(fuchsian(), 1.0), config(0.9 * p.threshold())), DomainError);
    SolverConfig c = config(3.0);
    c.theta = kPi / 2;
    EXPECT_THROW(newton_solve(GraphField::constant(fuchsian(), 1.0), c), DomainError);
    c.exploratory = true;
    const auto res = newton_solve(GraphField::constant(fuchsian(), 1.0), c);
    EXPECT_NEAR(res.field.height(0), std::atanh(1.0 / 3.0), 1e-9);
}

TEST(Newton, RejectsNonConvexStart) {
    GraphField g = GraphField::constant(disk(8), 1.0);
    g.set_height(40, 1.5);
    EXPECT_THROW(newton_solve(g, config(3.0)), NotConvexError);
}

TEST(Newton, ConfigValidation) {
    SolverConfig c = config(3.0);
    c.damping = 0.0;
    EXPECT_THROW(c.validate(2), ConfigError);
    c = config(3.0);
    c.max_iter = 0;
    EXPECT_THROW(c.validate(2), ConfigError);
}

TEST(BarrierCheck, Flags) {
    const AngleParams p(kTheta, 2);
    const double exact = dist_upper(p, 3.0);
    EXPECT_TRUE(barrier_check(GraphField::constant(fuchsian(), exact), p, 3.0).clean());
    const auto hi = barrier_check(GraphField::constant(fuchsian(), exact + 0.1), p, 3.0);
    EXPECT_EQ(hi.upper_flags.size(), 1u);
    const auto lo = barrier_check(GraphField::constant(fuchsian(), 0.01), p, 3.0);
    EXPECT_TRUE(lo.lower_checked);
    EXPECT_EQ(lo.lower_flags.size(), 1u);
}

TEST(BarrierCheck, PerturbedDiskSolutionIsClean) {
    const auto res = newton_solve(perturbed_disk(64, 1.0, 0.05), config(3.0));
    EXPECT_TRUE(res.report.barrier.clean());
}

TEST(Perron, ReflectingConvergesToFuchsianLevel) {
    const AngleParams p(kTheta, 2);
    const double level = dist_upper(p, 3.0);
    const auto res = perron_solve(GraphField::constant(rotsym(16, 1.0, OuterBoundary::Reflecting), level + 0.3),
                                  config(3.0, 1e-9));
    ASSERT_TRUE(res.report.converged);
    EXPECT_TRUE(res.report.monotone);
    for (double v : res.field.heights()) EXPECT_NEAR(v, level, 1e-8);
}

TEST(Perron, AgreesWithNewtonAndDecreases) {
    const AngleParams p(kTheta, 2);
    const double D = dist_upper(p, 3.0) + 0.2;
    const GraphField start = GraphField::constant(rotsym(32), D);
    const auto pr = perron_solve(start, config(3.0, 1e-10));
    const auto nr = newton_solve(start, config(3.0, 1e-11));
    ASSERT_TRUE(pr.report.converged);
    EXPECT_TRUE(pr.report.monotone);
    EXPECT_LT(max_abs_diff(pr.field, nr.field), 1e-7);
    for (int k = 0; k < start.size(); ++k) EXPECT_LE(pr.field.height(k), start.height(k));
}

TEST(Perron, SolutionIsFixedPoint) {
    const auto nr = newton_solve(GraphField::constant(rotsym(16), 1.3), config(3.0, 1e-12));
    const auto pr = perron_solve(nr.field, config(3.0, 1e-9));
    EXPECT_TRUE(pr.report.converged);
    EXPECT_EQ(pr.report.iterations, 0);
    EXPECT_LT(max_abs_diff(pr.field, nr.field), 1e-12);
}

TEST(Perron, RejectsSubsolutionStart) {
    const AngleParams p(kTheta, 2);
    EXPECT_THROW(perron_solve(GraphField::constant(rotsym(16), dist_upper(p, 3.0) - 0.2), config(3.0)),
                 PreconditionError);
    EXPECT_THROW(perron_solve(GraphField::constant(disk(8), 1.0), config(3.0)), ConfigError);
}

// The pointwise minimum of two supersolutions is again a supersolution.
TEST(Perron, MinimumOfSupersolutions) {
    const AngleParams p(kTheta, 2);
    const double r = 3.0;
    GraphField a = GraphField::constant(rotsym(32), 1.45), b = a;
    for (int k = 0; k < a.size(); ++k) {
        const double x = a.coords(k)[0];
        b.set_height(k, 1.5 - 0.1 * x * x);
    }
    for (const GraphField* g : {&a, &b}) {
        const auto f = curvature_field(*g, p);
        for (double v : f)
            if (!std::isnan(v)) ASSERT_LE(v, r);
    }
    GraphField m = a;
    for (int k = 0; k < m.size(); ++k) m.set_height(k, std::min(a.height(k), b.height(k)));
    // The kink sits between nodes; away from it the minimum coincides with one of the two.
    const auto f = curvature_field(m, p);
    int checked = 0;
    for (int k = 0; k < m.size(); ++k) {
        if (std::isnan(f[k])) continue;
        const bool near_kink = k > 0 && k + 1 < m.size() &&
                               ((a.height(k - 1) < b.height(k - 1)) != (a.height(k + 1) < b.height(k + 1)));
        if (near_kink) continue;
        EXPECT_LE(f[k], r + 1e-12);
        ++checked;
    }
    EXPECT_GT(checked, 20);
}
