#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "slc/barriers.hpp"
#include "slc/errors.hpp"
#include "slc/hypgeom.hpp"

using namespace slc;

namespace {

MinkVec random_tangent(std::mt19937_64& rng, const HPoint& p) {
    std::normal_distribution<double> g;
    MinkVec v(p.ambient_size());
    for (int i = 0; i < v.size(); ++i) v[i] = g(rng);
    return v;
}

HPoint random_point(std::mt19937_64& rng, int ambient) {
    std::uniform_real_distribution<double> t(0.0, 2.0);
    const HPoint o = HPoint::origin(ambient);
    return exp_point(UnitTangent(o, random_tangent(rng, o)), t(rng));
}

// Classical RK4 for lambda' = 1 - lambda^2.
double riccati_rk4(double l, double d, int steps) {
    const double h = d / steps;
    auto f = [](double x) { return 1.0 - x * x; };
    for (int i = 0; i < steps; ++i) {
        const double k1 = f(l), k2 = f(l + h * k1 / 2), k3 = f(l + h * k2 / 2), k4 = f(l + h * k3);
        l += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
    }
    return l;
}

double shape_error(const Patch& p, const std::vector<double>& at, double h, const std::vector<double>& want) {
    const auto ff = fundamental_forms(p, at, h);
    const auto s = eigenvalues(ff.shape);
    double e = 0.0;
    for (int i = 0; i < s.size(); ++i) e = std::max(e, std::abs(s[i] - want[i]));
    return e;
}

}  // namespace

TEST(HPoint, RejectsOffHyperboloid) {
    EXPECT_THROW(HPoint(MinkVec{1.0, 1.0, 0.0}), DomainError);
    EXPECT_THROW(HPoint(MinkVec{-1.0, 0.0, 0.0}), DomainError);
    const HPoint p(MinkVec{std::cosh(1.0) * (1 + 1e-9), std::sinh(1.0), 0.0});
    EXPECT_NEAR(minkowski_dot(p.v(), p.v()), -1.0, 1e-14);
}

TEST(Geodesic, StandardGeodesicAndDistance) {
    const HPoint o = HPoint::origin(4);
    const UnitTangent u(o, MinkVec::basis(4, 1));
    for (double t : {0.0, 0.3, 1.0, 4.0}) {
        const HPoint x = exp_point(u, t);
        EXPECT_NEAR(x.v()[0], std::cosh(t), 1e-12 * std::cosh(t));
        EXPECT_NEAR(x.v()[1], std::sinh(t), 1e-12 * std::cosh(t));
        EXPECT_NEAR(hyperbolic_distance(o, x), t, 1e-10);
    }
}

TEST(Geodesic, FlowProperty) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> t(0.0, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        const HPoint p = random_point(rng, 5);
        const UnitTangent u(p, random_tangent(rng, p));
        const double s = t(rng), r = t(rng);
        const HPoint a = exp_point(u, s + r);
        const HPoint b = exp_point(geodesic_tangent(u, s), r);
        for (int i = 0; i < 5; ++i) EXPECT_NEAR(a.v()[i], b.v()[i], 1e-9 * std::abs(a.v()[0]));
        EXPECT_NEAR(minkowski_dot(a.v(), a.v()), -1.0, 1e-10);
    }
}

TEST(Fermi, HeightIsDistanceToBase) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        MinkVec b = random_point(rng, 4).v();
        // Push into the base slice x_3 = 0.
        b[3] = 0.0;
        b[0] = std::sqrt(1.0 + b[1] * b[1] + b[2] * b[2]);
        const HPoint x(b);
        const double u = 0.1 * trial;
        const HPoint y = fermi_embed(x, u);
        EXPECT_NEAR(std::asinh(y.v()[3]), u, 1e-12 * std::max(1.0, u));
        // acosh near 1 loses half the digits.
        EXPECT_NEAR(hyperbolic_distance(x, y), u, 1e-7);
    }
    EXPECT_THROW(fermi_embed(HPoint(MinkVec{std::cosh(1.0), 0.0, std::sinh(1.0)}), 0.5), DomainError);
}

TEST(Tube, DistanceToAxis) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> w{g(rng), g(rng), g(rng)};
        const double d = 0.05 + 0.03 * trial;
        EXPECT_NEAR(distance_to_axis(tube_embed(g(rng), w, d)), d, 1e-10);
    }
}

TEST(NormalFlow, ClosedFormCases) {
    EXPECT_NEAR(normal_flow_shape(Spectrum({0.0, 0.0}), 0.7)[0], std::tanh(0.7), 1e-15);
    EXPECT_NEAR(normal_flow_shape(Spectrum({1.0, 1.0}), 5.0)[1], 1.0, 1e-15);
    const double a = 0.4;
    EXPECT_NEAR(normal_flow_shape(Spectrum({1 / std::tanh(a), 1.0}), 0.9)[1], 1 / std::tanh(a + 0.9), 1e-13);
}

TEST(NormalFlow, MatchesRungeKutta) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> l(-0.95, 4.0), d(0.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        const double l0 = l(rng), dist = d(rng);
        EXPECT_NEAR(normal_flow_shape(Spectrum({l0, l0}), dist)[0], riccati_rk4(l0, dist, 4000), 1e-9);
    }
}

TEST(NormalFlow, Composes) {
    const Spectrum s({-0.5, 0.3, 2.0});
    const auto a = normal_flow_shape(normal_flow_shape(s, 0.4), 0.9);
    const auto b = normal_flow_shape(s, 1.3);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(NormalFlow, SingularityBeyondFocalDistance) {
    // lambda = -coth(a) blows up at distance a.
    const double a = 0.5;
    try {
        normal_flow_shape(Spectrum({-1 / std::tanh(a), 0.0}), 0.6);
        FAIL() << "expected FlowSingularityError";
    } catch (const FlowSingularityError& e) {
        EXPECT_NEAR(e.critical_distance(), a, 1e-12);
    }
    EXPECT_THROW(normal_flow_shape(Spectrum({0.0, 0.0}), -1.0), DomainError);
}

TEST(FundamentalForms, ModelSurfaces) {
    for (int n : {2, 3}) {
        const std::vector<double> at(n, 0.1);
        EXPECT_LT(shape_error(equidistant_patch(n, 0.8), at, 1e-3, std::vector<double>(n, std::tanh(0.8))), 1e-5);
        EXPECT_LT(shape_error(sphere_patch(n, 1.2), at, 1e-3, std::vector<double>(n, 1 / std::tanh(1.2))), 1e-5);
        EXPECT_LT(shape_error(horosphere_patch(n), at, 1e-3, std::vector<double>(n, 1.0)), 1e-5);
        const auto tube = shape_of(ModelSurface::tube(n, 0.6));
        EXPECT_LT(shape_error(tube_patch(n, 0.6), at, 1e-3, {tube.values().begin(), tube.values().end()}), 1e-5);
    }
}

TEST(FundamentalForms, SecondOrderConvergence) {
    const std::vector<double> at{0.2, -0.1};
    struct Case {
        Patch p;
        std::vector<double> want;
    };
    const std::vector<Case> cases{
        {equidistant_patch(2, 0.8), {std::tanh(0.8), std::tanh(0.8)}},
        {sphere_patch(2, 1.2), {1 / std::tanh(1.2), 1 / std::tanh(1.2)}},
        {horosphere_patch(2), {1.0, 1.0}},
        {tube_patch(2, 0.6), {std::tanh(0.6), 1 / std::tanh(0.6)}},
    };
    for (const auto& c : cases) {
        const double e1 = shape_error(c.p, at, 0.02, c.want);
        const double e2 = shape_error(c.p, at, 0.01, c.want);
        EXPECT_GT(e1 / e2, 3.5);
        EXPECT_LT(e1 / e2, 4.5);
    }
}

TEST(FundamentalForms, SelfAdjointShapeOperator) {
    const auto ff = fundamental_forms(tube_patch(3, 0.7), std::vector<double>{0.3, 0.2, -0.4}, 1e-3);
    const auto s = ff.shape_operator();
    // I * S must be symmetric.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double a = 0.0, b = 0.0;
            for (int k = 0; k < 3; ++k) {
                a += ff.first(i, k) * s[k * 3 + j];
                b += ff.first(j, k) * s[k * 3 + i];
            }
            EXPECT_NEAR(a, b, 1e-8);
        }
}

TEST(FundamentalForms, DegenerateChartRejected) {
    Patch p;
    p.dim = 2;
    p.map = [](std::span<const double> y) {
        return MinkVec{std::cosh(y[0]), std::sinh(y[0]), 0.0, 0.0};
    };
    p.outward = [](std::span<const double>) { return MinkVec::basis(4, 3); };
    EXPECT_THROW(fundamental_forms(p, std::vector<double>{0.1, 0.1}, 1e-3), NotImmersedError);
}
