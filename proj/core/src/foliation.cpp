#include "slc/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slc/barriers.hpp"
#include "slc/errors.hpp"

namespace slc {

double fuchsian_exact(const AngleParams& p, double r) { return dist_upper(p, r); }

BoundaryData fixed_boundary(double d, double amplitude) {
    if (!(d > 0.0) || !(std::abs(amplitude) < 1.0)) throw DomainError("fixed boundary needs d > 0 and |a| < 1");
    return [d, amplitude](double, double phi) { return d * (1.0 + amplitude * std::cos(2.0 * phi)); };
}

BoundaryData leaf_boundary(const AngleParams& p, double amplitude) {
    if (!(amplitude >= 0.0 && amplitude < 1.0)) throw DomainError("leaf boundary needs a in [0, 1)");
    return [p, amplitude](double r, double phi) {
        const double s = std::sin(phi);
        return fuchsian_exact(p, r) * (1.0 - amplitude * s * s);
    };
}

namespace {

void apply_boundary(GraphField& g, const BoundaryData& b, double r) {
    for (int k = 0; k < g.size(); ++k) {
        if (!g.is_boundary(k)) continue;
        const double phi = g.grid().mode == GraphMode::Disk2D ? g.angle(k) : 0.0;
        g.set_height(k, b(r, phi));
    }
}

GraphField predictor(const GraphField& prev, const AngleParams& p, double r_prev, double r,
                     const BoundaryData& b) {
    GraphField g = prev;
    const double ratio = fuchsian_exact(p, r) / fuchsian_exact(p, r_prev);
    for (int k = 0; k < g.size(); ++k)
        if (!g.is_boundary(k)) g.set_height(k, prev.height(k) * ratio);
    if (b) apply_boundary(g, b, r);
    return g;
}

}  // namespace

SweepResult sweep(const SweepConfig& cfg, const std::vector<double>& r_values) {
    const AngleParams p(cfg.theta, cfg.grid.n);
    cfg.grid.validate();
    for (double r : r_values) {
        if (!(r > p.threshold())) throw DomainError("foliation parameter below threshold in sweep schedule");
    }
    const bool needs_boundary = cfg.grid.mode == GraphMode::Disk2D ||
                                (cfg.grid.mode == GraphMode::RotSymProfile && cfg.grid.outer == OuterBoundary::Dirichlet);
    if (needs_boundary && !cfg.boundary) throw ConfigError("sweep: boundary data required for this grid");

    SolverConfig sc;
    sc.theta = cfg.theta;
    sc.newton_tol = cfg.newton_tol;
    sc.max_iter = cfg.max_iter;

    SweepResult out;
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        const double r = r_values[i];
        sc.target_r = r;
        std::vector<GraphField> starts;
        if (out.records.empty()) {
            GraphField g = GraphField::constant(cfg.grid, fuchsian_exact(p, r));
            if (cfg.boundary) apply_boundary(g, cfg.boundary, r);
            starts.push_back(harmonic_extension(g));
        } else {
            const SweepRecord& prev = out.records.back();
            starts.push_back(predictor(prev.field, p, prev.r, r, cfg.boundary));
            GraphField plain = prev.field;
            if (cfg.boundary) apply_boundary(plain, cfg.boundary, r);
            starts.push_back(harmonic_extension(plain));
        }
        std::string failure;
        bool solved = false;
        for (const GraphField& start : starts) {
            try {
                SolveResult res = newton_solve(start, sc);
                SweepRecord rec{r, std::move(res.field), res.report.max_height, res.report.min_height,
                                res.report.barrier, res.report.iterations, false};
                rec.degraded = !rec.barrier.clean();
                out.records.push_back(std::move(rec));
                solved = true;
                break;
            } catch (const Error& e) {
                failure = "r = " + std::to_string(r) + ": " + e.what();
            }
        }
        if (!solved) {
            out.truncated = true;
            out.failure = failure;
            break;
        }
    }
    return out;
}

std::vector<double> default_schedule(const AngleParams& p, int count) {
    if (count < 1) throw ConfigError("schedule needs at least one value");
    const double t = p.threshold();
    std::vector<double> r(count);
    // Excess over the threshold halves at every step.
    for (int i = 0; i < count; ++i) r[i] = t * (1.0 + 9.0 * std::pow(0.5, i));
    return r;
}

double min_interior_gap(const GraphField& lower, const GraphField& upper) {
    if (lower.size() != upper.size()) throw ConfigError("min_interior_gap: grids differ");
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < lower.size(); ++k) {
        if (lower.is_boundary(k)) continue;
        gap = std::min(gap, lower.height(k) - upper.height(k));
    }
    return gap;
}

CoverageRow coverage_row(int n, double theta, double r) {
    const AngleParams p(theta, n);
    return {theta, r, coverage_depth(p, r)};
}

std::vector<CoverageRow> theta_sweep(int n, const std::function<double(double)>& r_schedule,
                                     const std::vector<double>& thetas) {
    std::vector<CoverageRow> rows;
    rows.reserve(thetas.size());
    for (double th : thetas) rows.push_back(coverage_row(n, th, r_schedule(th)));
    return rows;
}

bool depth_increasing(const std::vector<CoverageRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].theta <= rows[i - 1].theta) continue;
        if (!(rows[i].depth > rows[i - 1].depth)) return false;
    }
    return true;
}

}  // namespace slc
