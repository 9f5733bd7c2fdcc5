#pragma once

// Kulkarni-Pinkall type metric of a domain in S^n: every round ball B in the
// domain carries the metric pulled back from the totally geodesic hyperplane
// of H^{n+1} bounded by dB, by orthogonal projection from the ideal boundary.
// The domain metric at q is the infimum over balls containing q.
//
// Points of S^n are unit vectors of R^{n+1}. Metric tensors are expressed in
// the stereographic chart y -> (2y, 1 - |y|^2)/(1 + |y|^2), which sends y = 0
// to the pole e_n and the unit ball onto the upper hemisphere.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace slc {

std::vector<double> chart_to_sphere(std::span<const double> y);
std::vector<double> sphere_to_chart(std::span<const double> p);
double sphere_angle(std::span<const double> a, std::span<const double> b);

class RoundBall {
public:
    // center is normalised; radius is the angular radius in (0, pi).
    RoundBall(std::vector<double> center, double radius);
    // The image of the Euclidean chart ball |y - c| < rho.
    static RoundBall chart_disk(std::span<const double> c, double rho);

    const std::vector<double>& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    int n() const noexcept { return static_cast<int>(center_.size()) - 1; }
    bool contains(std::span<const double> p) const;

private:
    std::vector<double> center_;
    double radius_;
};

struct BallMetric {
    int n = 0;
    std::vector<double> tensor;   // n*n, flat chart coordinates
    double conformal_factor = 0;  // tensor / Euclidean
    double round_factor = 0;      // tensor / round metric 4/(1+|y|^2)^2
};

inline constexpr double kFootStep = 1e-5;

// Pullback of the hyperbolic metric of the hyperplane spanned by dB via the
// foot-point map, by central differences. q is a chart point inside B.
BallMetric ball_metric(const RoundBall& b, std::span<const double> q);

class SphericalDomain {
public:
    enum class Kind { Ball, Intersection, Union, Punctured };

    static SphericalDomain ball(RoundBall b);
    static SphericalDomain intersection(std::vector<SphericalDomain> parts);
    static SphericalDomain union_of(std::vector<SphericalDomain> parts);
    // S^n minus finitely many points.
    static SphericalDomain punctured(int n, std::vector<std::vector<double>> points);

    Kind kind() const noexcept { return kind_; }
    int n() const noexcept { return n_; }
    bool contains(std::span<const double> p) const;
    // Angular radius of a round ball about p contained in the domain; exact
    // for balls, intersections and punctured spheres, a lower bound for
    // unions. Negative outside the domain.
    double inradius(std::span<const double> p) const;
    // Round balls known to contain the whole domain.
    std::vector<RoundBall> enclosing_balls() const;
    // All balls appearing in the description.
    std::vector<RoundBall> leaf_balls() const;

    const std::vector<SphericalDomain>& parts() const noexcept { return parts_; }
    const std::vector<std::vector<double>>& points() const noexcept { return points_; }

private:
    SphericalDomain(Kind kind, int n) : kind_(kind), n_(n) {}
    void require_hyperbolic_type() const;

    Kind kind_;
    int n_;
    std::shared_ptr<const RoundBall> ball_;
    std::vector<SphericalDomain> parts_;
    std::vector<std::vector<double>> points_;
};

struct KpSampler {
    int random_balls = 256;
    int directions = 32;    // tangent directions at q for boundary-tangent balls
    int radial_steps = 24;  // centres per direction
    std::uint64_t seed = 0x5eed;
};

struct KpEstimate {
    BallMetric metric;        // minimiser over the sampled family
    RoundBall ball;           // the minimising ball
    double lower_bracket = 0; // conformal factor of the best enclosing ball, 0 if none
    int candidates = 0;
};

KpEstimate kp_metric(const SphericalDomain& d, std::span<const double> q, const KpSampler& s = {});

}  // namespace slc
