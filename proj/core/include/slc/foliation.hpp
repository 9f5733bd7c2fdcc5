#pragma once

// Continuation sweeps over the curvature parameter r, the Fuchsian closed
// form, and coverage-depth tables over theta.

#include <functional>
#include <string>
#include <vector>

#include "slc/graphsolve.hpp"

namespace slc {

// Height of the constant-curvature equidistant leaf: artanh(tan(theta/n)/r).
double fuchsian_exact(const AngleParams& p, double r);

// Dirichlet data as a function of (r, polar angle of the boundary node).
using BoundaryData = std::function<double(double r, double angle)>;

// d (1 + a cos 2 phi), independent of r.
BoundaryData fixed_boundary(double d, double amplitude);
// fuchsian_exact(r) (1 - a sin^2 phi): follows the leaf, never above it.
BoundaryData leaf_boundary(const AngleParams& p, double amplitude);

struct SweepConfig {
    double theta = 0.0;
    GridSpec grid;
    BoundaryData boundary;  // Disk2D and Dirichlet RotSym only
    double newton_tol = 1e-9;
    int max_iter = 50;
};

struct SweepRecord {
    double r = 0.0;
    GraphField field;
    double max_height = 0.0;
    double min_height = 0.0;
    BarrierDiagnostics barrier;
    int iterations = 0;  // Newton iterations from the warm start
    bool degraded = false;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    bool truncated = false;
    std::string failure;  // reason for truncation
};

// Solves one leaf per r in the given order, each warm-started from the
// previous one. A failed solve truncates the sweep.
SweepResult sweep(const SweepConfig& cfg, const std::vector<double>& r_values);

// Default schedule: `count` values descending geometrically from
// 10 tan(theta/n) towards the threshold.
std::vector<double> default_schedule(const AngleParams& p, int count);

// min over non-boundary nodes of lower.u - upper.u, where `lower` is the leaf
// with the smaller r.
double min_interior_gap(const GraphField& lower, const GraphField& upper);

struct CoverageRow {
    double theta;
    double r;
    double depth;
};

CoverageRow coverage_row(int n, double theta, double r);
std::vector<CoverageRow> theta_sweep(int n, const std::function<double(double)>& r_schedule,
                                     const std::vector<double>& thetas);
// Whether depth is strictly increasing along increasing theta.
bool depth_increasing(const std::vector<CoverageRow>& rows);

}  // namespace slc
