#include "slc/barriers.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "slc/errors.hpp"

namespace slc {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace

ModelSurface::ModelSurface(Kind kind, int n, double param) : kind_(kind), n_(n), param_(param) {
    if (n < kMinDim || n > kMaxDim) throw ConfigError("model surface dimension out of range");
}

ModelSurface ModelSurface::equidistant(int n, double d) {
    require_positive(d, "equidistant distance");
    return {Kind::EquidistantPlane, n, d};
}

ModelSurface ModelSurface::sphere(int n, double rho) {
    require_positive(rho, "sphere radius");
    return {Kind::GeodesicSphere, n, rho};
}

ModelSurface ModelSurface::horosphere(int n) { return {Kind::Horosphere, n, 0.0}; }

ModelSurface ModelSurface::tube(int n, double d) {
    require_positive(d, "tube radius");
    return {Kind::TubeAroundGeodesic, n, d};
}

Spectrum shape_of(const ModelSurface& m) {
    const int n = m.n();
    const double t = m.parameter();
    switch (m.kind()) {
        case ModelSurface::Kind::EquidistantPlane:
            return Spectrum(std::vector<double>(n, std::tanh(t)));
        case ModelSurface::Kind::GeodesicSphere:
            return Spectrum(std::vector<double>(n, 1.0 / std::tanh(t)));
        case ModelSurface::Kind::Horosphere:
            return Spectrum(std::vector<double>(n, 1.0));
        case ModelSurface::Kind::TubeAroundGeodesic: {
            std::vector<double> v(n, 1.0 / std::tanh(t));
            v[0] = std::tanh(t);
            return Spectrum(std::move(v));
        }
    }
    return {};
}

double level_curvature(const AngleParams& p, double d) {
    require_positive(d, "distance");
    return p.threshold() / std::tanh(d);
}

double kappa(const AngleParams& p, double d) {
    require_positive(d, "distance");
    if (!p.hyperbolic_regime()) {
        throw DomainError("kappa requires theta >= (n-1)pi/2");
    }
    return r_theta(shape_of(ModelSurface::tube(p.n(), d)), p);
}

double delta_lower(const AngleParams& p, double big_r) {
    if (!(p.theta() > (p.n() - 1) * kPi / 2)) {
        throw DomainError("delta_lower requires theta > (n-1)pi/2");
    }
    if (!(big_r > p.threshold())) {
        throw DomainError("delta_lower requires R > tan(theta/n) (foliation parameter below threshold)");
    }
    // Past its first crossing of big_r, kappa stays below big_r.
    double lo = 1.0;
    while (kappa(p, lo) <= big_r) {
        lo *= 0.5;
        if (lo < 1e-300) throw DomainError("delta_lower: bracket underflow");
    }
    double hi = 1.0;
    while (kappa(p, hi) > big_r) {
        hi *= 2.0;
        if (hi > 64.0) throw DomainError("delta_lower: R indistinguishable from tan(theta/n)");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kappa(p, mid) > big_r ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double dist_upper(const AngleParams& p, double r) {
    if (!(r > p.threshold())) {
        throw DomainError("foliation parameter below threshold: r = " + std::to_string(r) +
                          " <= tan(theta/n) = " + std::to_string(p.threshold()));
    }
    return std::atanh(p.threshold() / r);
}

double coverage_depth(const AngleParams& p, double r) {
    const double excess = p.theta() - (p.n() - 1) * kPi / 2;
    if (!(excess > 0.0)) throw DomainError("coverage_depth requires theta > (n-1)pi/2");
    if (!(r >= p.threshold())) throw DomainError("coverage_depth requires r >= tan(theta/n)");
    const double arg = std::tan(excess) / r;
    if (!(arg < 1.0)) throw DomainError("coverage_depth: tan(theta-(n-1)pi/2)/r >= 1");
    return std::atanh(arg);
}

BoundReport bound_report(const AngleParams& p, double r) {
    return {p.theta(), r, p.n(), dist_upper(p, r), delta_lower(p, r), coverage_depth(p, r)};
}

}  // namespace slc
