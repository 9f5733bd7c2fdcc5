#pragma once

// Exactly solvable model hypersurfaces and the distance bounds they induce
// for hypersurfaces of constant special Lagrangian curvature.

#include "slc/symcurv.hpp"

namespace slc {

class ModelSurface {
public:
    enum class Kind { EquidistantPlane, GeodesicSphere, Horosphere, TubeAroundGeodesic };

    static ModelSurface equidistant(int n, double d);
    static ModelSurface sphere(int n, double rho);
    static ModelSurface horosphere(int n);
    static ModelSurface tube(int n, double d);

    Kind kind() const noexcept { return kind_; }
    int n() const noexcept { return n_; }
    double parameter() const noexcept { return param_; }

private:
    ModelSurface(Kind kind, int n, double param);
    Kind kind_;
    int n_;
    double param_;
};

// Principal curvatures of the model with respect to its exterior normal:
// equidistant (tanh d,...), sphere (coth rho,...), horosphere (1,...),
// tube (tanh d, coth d,..., coth d).
Spectrum shape_of(const ModelSurface& m);

// R_theta of the equidistant at distance d: tan(theta/n)/tanh(d).
double level_curvature(const AngleParams& p, double d);

// R_theta of the tube shape A_0(d); requires theta >= (n-1)pi/2. Tends to
// +inf as d -> 0 and never exceeds level_curvature. For n = 2 it decreases to
// tan(theta/2); for n >= 3 it drops below tan(theta/n), attains a minimum and
// returns to tan(theta/n) from below.
double kappa(const AngleParams& p, double d);

// The distance d with kappa(p, d) = big_r, on the branch where kappa is
// decreasing and above tan(theta/n). Requires theta > (n-1)pi/2 and
// big_r > tan(theta/n).
double delta_lower(const AngleParams& p, double big_r);

// artanh(tan(theta/n)/r); requires r > tan(theta/n).
double dist_upper(const AngleParams& p, double r);

// artanh(tan(theta - (n-1)pi/2)/r); requires theta > (n-1)pi/2,
// r >= tan(theta/n) and the argument below 1.
double coverage_depth(const AngleParams& p, double r);

struct BoundReport {
    double theta;
    double r;
    int n;
    double dist_upper;
    double delta_lower;
    double coverage_depth;
};

// All three bounds for a leaf with R_theta = r.
BoundReport bound_report(const AngleParams& p, double r);

}  // namespace slc
