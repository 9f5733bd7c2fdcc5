#include "slc/kpmetric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "slc/errors.hpp"

namespace slc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxSphereDim = 8;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> normalized(std::vector<double> v) {
    const double len = std::sqrt(dot(v, v));
    if (!(len > 0.0)) throw DomainError("zero vector cannot be normalised");
    for (double& x : v) x /= len;
    return v;
}

void require_sphere_dim(int n) {
    if (n < 1 || n > kMaxSphereDim) throw ConfigError("sphere dimension out of range [1, 8]");
}

// Deterministic sample of S^n used for emptiness and type checks.
std::vector<std::vector<double>> sphere_sample(int n, int count) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        std::vector<double> v(n + 1);
        for (double& x : v) x = normal(rng);
        pts.push_back(normalized(std::move(v)));
    }
    return pts;
}

}  // namespace

std::vector<double> chart_to_sphere(std::span<const double> y) {
    const double r2 = dot(y, y);
    std::vector<double> p(y.size() + 1);
    for (std::size_t i = 0; i < y.size(); ++i) p[i] = 2.0 * y[i] / (1.0 + r2);
    p.back() = (1.0 - r2) / (1.0 + r2);
    return p;
}

std::vector<double> sphere_to_chart(std::span<const double> p) {
    const double denom = 1.0 + p.back();
    if (!(denom > 1e-15)) throw DomainError("the south pole has no chart image");
    std::vector<double> y(p.size() - 1);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = p[i] / denom;
    return y;
}

double sphere_angle(std::span<const double> a, std::span<const double> b) {
    // atan2 of |a x b| and a.b keeps precision for nearby points.
    const double c = dot(a, b);
    double s2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = b[i] - c * a[i];
        s2 += d * d;
    }
    return std::atan2(std::sqrt(s2), c);
}

// ----------------------------------------------------------------- RoundBall

RoundBall::RoundBall(std::vector<double> center, double radius) : center_(normalized(std::move(center))), radius_(radius) {
    require_sphere_dim(n());
    if (!(radius > 0.0 && radius < kPi)) throw DomainError("ball radius must lie in (0, pi)");
}

RoundBall RoundBall::chart_disk(std::span<const double> c, double rho) {
    if (!(rho > 0.0)) throw DomainError("chart disk radius must be positive");
    const int n = static_cast<int>(c.size());
    require_sphere_dim(n);
    const double len = std::sqrt(dot(c, c));
    std::vector<double> dir(n, 0.0);
    if (len > 0.0) {
        for (int i = 0; i < n; ++i) dir[i] = c[i] / len;
    } else {
        dir[0] = 1.0;
    }
    // The cap is symmetric about the plane spanned by dir and the pole e_n;
    // work with angles on the great circle in that plane.
    auto circle_angle = [&](double t) {
        std::vector<double> y(c.begin(), c.end());
        for (int i = 0; i < n; ++i) y[i] += t * dir[i];
        const auto p = chart_to_sphere(y);
        double x = 0.0;
        for (int i = 0; i < n; ++i) x += p[i] * dir[i];
        return std::atan2(p[n], x);
    };
    const double a_plus = circle_angle(rho), a_minus = circle_angle(-rho), a_mid = circle_angle(0.0);
    auto wrap = [](double a) { return a - 2 * kPi * std::floor(a / (2 * kPi)); };
    const double arc = wrap(a_plus - a_minus);
    double centre_angle, alpha;
    if (wrap(a_mid - a_minus) < arc) {
        centre_angle = a_minus + arc / 2;
        alpha = arc / 2;
    } else {
        centre_angle = a_plus + (2 * kPi - arc) / 2;
        alpha = kPi - arc / 2;
    }
    std::vector<double> centre(n + 1, 0.0);
    for (int i = 0; i < n; ++i) centre[i] = std::cos(centre_angle) * dir[i];
    centre[n] = std::sin(centre_angle);
    return RoundBall(centre, alpha);
}

bool RoundBall::contains(std::span<const double> p) const { return sphere_angle(center_, p) < radius_; }

// ------------------------------------------------------------ ball metric

BallMetric ball_metric(const RoundBall& b, std::span<const double> q) {
    const int n = b.n();
    if (static_cast<int>(q.size()) != n) throw ConfigError("chart point has the wrong dimension");
    const double ca = std::cos(b.radius()), sa = std::sin(b.radius());
    const auto& c = b.center();

    // Unit spacelike m = (cos a, c)/sin a; the hyperplane is m^perp. For a
    // null vector l = (1, xi) with s = <l, m> > 0 the foot point is l/s - m.
    auto foot = [&](std::span<const double> y) {
        const auto xi = chart_to_sphere(y);
        const double s = (dot(xi, c) - ca) / sa;
        if (!(s > 0.0)) throw DomainError("point is not inside the ball");
        std::vector<double> f(n + 2);
        f[0] = 1.0 / s - ca / sa;
        for (int i = 0; i <= n; ++i) f[i + 1] = xi[i] / s - c[i] / sa;
        return f;
    };
    if (!b.contains(chart_to_sphere(q))) throw DomainError("ball_metric: q is not inside the ball");

    std::vector<std::vector<double>> df(n);
    std::vector<double> y(q.begin(), q.end());
    for (int i = 0; i < n; ++i) {
        y[i] = q[i] + kFootStep;
        const auto fp = foot(y);
        y[i] = q[i] - kFootStep;
        const auto fm = foot(y);
        y[i] = q[i];
        df[i].resize(n + 2);
        for (int k = 0; k < n + 2; ++k) df[i][k] = (fp[k] - fm[k]) / (2.0 * kFootStep);
    }
    BallMetric m;
    m.n = n;
    m.tensor.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = -df[i][0] * df[j][0];
            for (int k = 1; k < n + 2; ++k) s += df[i][k] * df[j][k];
            m.tensor[i * n + j] = s;
        }
    }
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += m.tensor[i * n + i];
    m.conformal_factor = tr / n;
    const double q2 = dot(q, q);
    m.round_factor = m.conformal_factor * (1.0 + q2) * (1.0 + q2) / 4.0;
    return m;
}

// ----------------------------------------------------------- SphericalDomain

SphericalDomain SphericalDomain::ball(RoundBall b) {
    SphericalDomain d(Kind::Ball, b.n());
    d.ball_ = std::make_shared<const RoundBall>(std::move(b));
    return d;
}

SphericalDomain SphericalDomain::intersection(std::vector<SphericalDomain> parts) {
    if (parts.empty()) throw ConfigError("intersection needs at least one part");
    SphericalDomain d(Kind::Intersection, parts.front().n());
    for (const auto& p : parts)
        if (p.n() != d.n()) throw ConfigError("intersection parts differ in dimension");
    d.parts_ = std::move(parts);
    d.require_hyperbolic_type();
    return d;
}

SphericalDomain SphericalDomain::union_of(std::vector<SphericalDomain> parts) {
    if (parts.empty()) throw ConfigError("union needs at least one part");
    SphericalDomain d(Kind::Union, parts.front().n());
    for (const auto& p : parts)
        if (p.n() != d.n()) throw ConfigError("union parts differ in dimension");
    d.parts_ = std::move(parts);
    d.require_hyperbolic_type();
    return d;
}

SphericalDomain SphericalDomain::punctured(int n, std::vector<std::vector<double>> points) {
    require_sphere_dim(n);
    SphericalDomain d(Kind::Punctured, n);
    for (auto& p : points) {
        if (static_cast<int>(p.size()) != n + 1) throw ConfigError("puncture has the wrong dimension");
        d.points_.push_back(normalized(std::move(p)));
    }
    d.require_hyperbolic_type();
    return d;
}

void SphericalDomain::require_hyperbolic_type() const {
    switch (kind_) {
        case Kind::Ball:
            return;
        case Kind::Punctured: {
            int distinct = 0;
            for (std::size_t i = 0; i < points_.size(); ++i) {
                bool dup = false;
                for (std::size_t j = 0; j < i; ++j) dup = dup || sphere_angle(points_[i], points_[j]) < 1e-12;
                if (!dup) ++distinct;
            }
            if (distinct < 2) throw DomainError("not hyperbolic type: complement has fewer than 2 points");
            return;
        }
        case Kind::Intersection:
        case Kind::Union: {
            const auto sample = sphere_sample(n_, 4096);
            int inside = 0, outside = 0;
            for (const auto& p : sample) (contains(p) ? inside : outside)++;
            for (const auto& b : leaf_balls()) (contains(b.center()) ? inside : outside)++;
            if (inside == 0) throw DomainError("domain appears to be empty");
            if (outside < 2) throw DomainError("not hyperbolic type: complement has fewer than 2 sampled points");
            return;
        }
    }
}

bool SphericalDomain::contains(std::span<const double> p) const {
    switch (kind_) {
        case Kind::Ball:
            return ball_->contains(p);
        case Kind::Intersection:
            return std::all_of(parts_.begin(), parts_.end(), [&](const auto& d) { return d.contains(p); });
        case Kind::Union:
            return std::any_of(parts_.begin(), parts_.end(), [&](const auto& d) { return d.contains(p); });
        case Kind::Punctured:
            return inradius(p) > 0.0;
    }
    return false;
}

double SphericalDomain::inradius(std::span<const double> p) const {
    switch (kind_) {
        case Kind::Ball:
            return ball_->radius() - sphere_angle(ball_->center(), p);
        case Kind::Intersection: {
            double r = kPi;
            for (const auto& d : parts_) r = std::min(r, d.inradius(p));
            return r;
        }
        case Kind::Union: {
            double r = -kPi;
            for (const auto& d : parts_) r = std::max(r, d.inradius(p));
            return r;
        }
        case Kind::Punctured: {
            double r = kPi;
            for (const auto& x : points_) r = std::min(r, sphere_angle(x, p));
            return r;
        }
    }
    return 0.0;
}

std::vector<RoundBall> SphericalDomain::enclosing_balls() const {
    std::vector<RoundBall> out;
    if (kind_ == Kind::Ball) out.push_back(*ball_);
    if (kind_ == Kind::Intersection) {
        for (const auto& d : parts_) {
            auto e = d.enclosing_balls();
            out.insert(out.end(), e.begin(), e.end());
        }
    }
    return out;
}

std::vector<RoundBall> SphericalDomain::leaf_balls() const {
    std::vector<RoundBall> out;
    if (kind_ == Kind::Ball) out.push_back(*ball_);
    for (const auto& d : parts_) {
        auto e = d.leaf_balls();
        out.insert(out.end(), e.begin(), e.end());
    }
    return out;
}

// ------------------------------------------------------------------ sampler

KpEstimate kp_metric(const SphericalDomain& d, std::span<const double> q, const KpSampler& s) {
    const int n = d.n();
    if (static_cast<int>(q.size()) != n) throw ConfigError("chart point has the wrong dimension");
    if (s.random_balls < 0 || s.directions < 0 || s.radial_steps < 1) throw ConfigError("invalid sampler settings");
    const auto qs = chart_to_sphere(q);
    if (!d.contains(qs)) throw DomainError("kp_metric: q is not in the domain");

    std::optional<KpEstimate> best;
    int count = 0;
    auto consider = [&](const std::vector<double>& c, double radius) {
        radius = std::min(radius, kPi - 1e-9);
        if (!(radius > 0.0) || !(sphere_angle(c, qs) < radius)) return;
        const RoundBall b(c, radius);
        BallMetric m;
        try {
            m = ball_metric(b, q);
        } catch (const DomainError&) {
            return;  // q too close to the ball's edge for the difference stencil
        }
        ++count;
        if (!best || m.conformal_factor < best->metric.conformal_factor) best = KpEstimate{m, b, 0.0, 0};
    };
    auto inscribed = [&](const std::vector<double>& c) { consider(c, d.inradius(c)); };

    for (const auto& b : d.leaf_balls()) inscribed(b.center());
    inscribed(qs);

    // Centres along great circles from q: the largest inscribed ball about
    // each centre touches the boundary.
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> normal;
    auto random_tangent = [&] {
        std::vector<double> v(n + 1);
        for (double& x : v) x = normal(rng);
        const double proj = dot(v, qs);
        for (int i = 0; i <= n; ++i) v[i] -= proj * qs[i];
        return normalized(std::move(v));
    };
    auto along = [&](const std::vector<double>& v, double t) {
        std::vector<double> c(n + 1);
        for (int i = 0; i <= n; ++i) c[i] = std::cos(t) * qs[i] + std::sin(t) * v[i];
        return c;
    };
    std::vector<double> best_dir;
    double best_t = 0.0;
    double best_dir_val = std::numeric_limits<double>::infinity();
    for (int k = 0; k < s.directions; ++k) {
        const auto v = random_tangent();
        for (int j = 1; j <= s.radial_steps; ++j) {
            const double t = kPi * j / (s.radial_steps + 1);
            const int before = count;
            const double prev = best ? best->metric.conformal_factor : std::numeric_limits<double>::infinity();
            inscribed(along(v, t));
            if (count > before && best->metric.conformal_factor < prev && best->metric.conformal_factor < best_dir_val) {
                best_dir_val = best->metric.conformal_factor;
                best_dir = v;
                best_t = t;
            }
        }
    }
    if (!best_dir.empty()) {
        // Golden-section refinement along the best great circle.
        const double step = kPi / (s.radial_steps + 1);
        double lo = std::max(0.0, best_t - step), hi = std::min(kPi, best_t + step);
        auto value = [&](double t) {
            const auto c = along(best_dir, t);
            const double rad = std::min(d.inradius(c), kPi - 1e-9);
            if (!(rad > 0.0) || !(sphere_angle(c, qs) < rad)) return std::numeric_limits<double>::infinity();
            try {
                return ball_metric(RoundBall(c, rad), q).conformal_factor;
            } catch (const DomainError&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        double fa = value(a), fb = value(b);
        for (int i = 0; i < 60; ++i) {
            if (fa < fb) {
                hi = b; b = a; fb = fa; a = hi - g * (hi - lo); fa = value(a);
            } else {
                lo = a; a = b; fa = fb; b = lo + g * (hi - lo); fb = value(b);
            }
        }
        inscribed(along(best_dir, 0.5 * (lo + hi)));
    }

    for (int k = 0; k < s.random_balls; ++k) {
        std::vector<double> c(n + 1);
        for (double& x : c) x = normal(rng);
        inscribed(normalized(std::move(c)));
    }

    if (!best) throw DomainError("kp_metric: no inscribed ball contains q");
    KpEstimate out = *best;
    out.candidates = count;
    for (const auto& b : d.enclosing_balls()) {
        if (!b.contains(qs)) continue;
        out.lower_bracket = std::max(out.lower_bracket, ball_metric(b, q).conformal_factor);
    }
    return out;
}

}  // namespace slc
