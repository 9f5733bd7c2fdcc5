#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "format.hpp"
#include "slc/barriers.hpp"
#include "slc/errors.hpp"
#include "slc/foliation.hpp"
#include "slc/graphsolve.hpp"
#include "slc/hypgeom.hpp"
#include "slc/kpmetric.hpp"
#include "slc/symcurv.hpp"

namespace slc::cli {

namespace {

constexpr double kPi = std::numbers::pi;

const Params& require(const Params& p, const std::string& key) {
    if (!p.contains(key)) throw ConfigError("missing required field '" + key + "'");
    return p.at(key);
}

double as_double(const Params& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_angle(v.get<std::string>());
    throw ConfigError("field '" + key + "' must be a number");
}

double get_double(const Params& p, const std::string& key) { return as_double(require(p, key), key); }
double get_double(const Params& p, const std::string& key, double def) {
    return p.contains(key) ? as_double(p.at(key), key) : def;
}

int get_int(const Params& p, const std::string& key, int def) {
    if (!p.contains(key)) return def;
    const double v = as_double(p.at(key), key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("field '" + key + "' must be an integer");
    return static_cast<int>(v);
}

std::string get_string(const Params& p, const std::string& key, const std::string& def) {
    if (!p.contains(key)) return def;
    if (!p.at(key).is_string()) throw ConfigError("field '" + key + "' must be a string");
    return p.at(key).get<std::string>();
}

bool get_bool(const Params& p, const std::string& key, bool def) {
    if (!p.contains(key)) return def;
    const auto& v = p.at(key);
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
    }
    throw ConfigError("field '" + key + "' must be a boolean");
}

std::vector<double> get_list(const Params& p, const std::string& key) {
    const auto& v = require(p, key);
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& x : v) out.push_back(as_double(x, key));
        return out;
    }
    if (v.is_number()) return {v.get<double>()};
    if (v.is_string()) return parse_list(v.get<std::string>());
    throw ConfigError("field '" + key + "' must be a list of numbers");
}

std::vector<std::string> row(std::initializer_list<double> v) {
    std::vector<std::string> out;
    for (double x : v) out.push_back(fmt_num(x));
    return out;
}

SymMatrix parse_matrix(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("matrix must be 'diag:a,b,...' or 'rows:a,b;c,d'");
    const std::string kind = text.substr(0, colon);
    const std::string body = text.substr(colon + 1);
    if (kind == "diag") {
        const auto d = parse_list(body);
        if (d.size() < kMinDim || d.size() > kMaxDim) throw ConfigError("matrix dimension must lie in [2, 8]");
        return SymMatrix::diagonal(std::span<const double>(d));
    }
    if (kind == "rows") {
        std::vector<std::vector<double>> rows;
        std::stringstream ss(body);
        std::string r;
        while (std::getline(ss, r, ';')) rows.push_back(parse_list(r));
        return SymMatrix::from_rows(rows);
    }
    throw ConfigError("unknown matrix kind '" + kind + "'");
}

GridSpec grid_from(const Params& p) {
    GridSpec g;
    g.mode = graph_mode_from_string(get_string(p, "graph", "fuchsian"));
    g.n = get_int(p, "n", 2);
    g.cells = get_int(p, "cells", g.mode == GraphMode::FuchsianConstant ? 0 : 32);
    g.extent = get_double(p, "extent", g.mode == GraphMode::Disk2D ? 0.5 : 1.0);
    const std::string outer = get_string(p, "outer", "dirichlet");
    if (outer == "dirichlet") {
        g.outer = OuterBoundary::Dirichlet;
    } else if (outer == "reflecting") {
        g.outer = OuterBoundary::Reflecting;
    } else {
        throw ConfigError("outer must be 'dirichlet' or 'reflecting'");
    }
    g.validate();
    return g;
}

SolverConfig solver_from(const Params& p, double theta, double r) {
    SolverConfig sc;
    sc.theta = theta;
    sc.target_r = r;
    sc.newton_tol = get_double(p, "tol", sc.newton_tol);
    sc.max_iter = get_int(p, "max_iter", sc.max_iter);
    sc.damping = get_double(p, "damping", sc.damping);
    sc.exploratory = get_bool(p, "exploratory", false);
    return sc;
}

void add_report_notes(CommandOutput& out, const SolveReport& rep) {
    out.notes.push_back("converged: " + std::string(rep.converged ? "true" : "false"));
    out.notes.push_back("iterations: " + std::to_string(rep.iterations));
    out.notes.push_back("final_residual: " + fmt_num(rep.residuals.empty() ? 0.0 : rep.residuals.back()));
    out.notes.push_back("min_principal_curvature: " + fmt_num(rep.min_principal_curvature));
    out.notes.push_back("barrier_flags: " +
                        std::to_string(rep.barrier.upper_flags.size() + rep.barrier.lower_flags.size()));
    nlohmann::json j;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["halvings"] = rep.halvings;
    j["residuals"] = nlohmann::json::array();
    for (double x : rep.residuals) j["residuals"].push_back(std::stod(fmt_num(x)));
    j["min_height"] = std::stod(fmt_num(rep.min_height));
    j["max_height"] = std::stod(fmt_num(rep.max_height));
    j["min_principal_curvature"] = std::stod(fmt_num(rep.min_principal_curvature));
    j["barrier_clean"] = rep.barrier.clean();
    j["monotone"] = rep.monotone;
    out.extra["report"] = j;
}

std::vector<std::vector<double>> parse_points(const Params& v, int dim_hint) {
    std::vector<std::vector<double>> pts;
    if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ';')) pts.push_back(parse_list(item));
    } else if (v.is_array() && !v.empty() && v.front().is_array()) {
        for (const auto& x : v) pts.push_back(x.get<std::vector<double>>());
    } else if (v.is_array()) {
        pts.push_back(v.get<std::vector<double>>());
    } else {
        throw ConfigError("q must be a point list");
    }
    for (const auto& q : pts)
        if (dim_hint > 0 && static_cast<int>(q.size()) != dim_hint) throw ConfigError("q has the wrong dimension");
    return pts;
}

SphericalDomain parse_domain(const Params& d) {
    if (!d.is_object() || d.size() != 1) throw ConfigError("domain must be an object with exactly one key");
    const auto& [kind, body] = *d.items().begin();
    if (kind == "ball" || kind == "chart_disk") {
        for (const auto& [k, v] : body.items())
            if (k != "center" && k != "radius") throw ConfigError("unknown key '" + k + "' in " + kind);
        const auto c = require(body, "center").get<std::vector<double>>();
        const double r = as_double(require(body, "radius"), "radius");
        return SphericalDomain::ball(kind == "ball" ? RoundBall(c, r) : RoundBall::chart_disk(c, r));
    }
    if (kind == "intersection" || kind == "union") {
        if (!body.is_array()) throw ConfigError(kind + " must be an array of domains");
        std::vector<SphericalDomain> parts;
        for (const auto& x : body) parts.push_back(parse_domain(x));
        return kind == "intersection" ? SphericalDomain::intersection(std::move(parts))
                                      : SphericalDomain::union_of(std::move(parts));
    }
    if (kind == "punctured") {
        const auto pts = body.get<std::vector<std::vector<double>>>();
        if (pts.empty()) throw DomainError("not hyperbolic type: complement has fewer than 2 points");
        return SphericalDomain::punctured(static_cast<int>(pts.front().size()) - 1, pts);
    }
    throw ConfigError("unknown domain kind '" + kind + "'");
}

}  // namespace

const std::vector<std::string>& allowed_keys(const std::string& command) {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"curv", {"matrix", "theta", "mode", "r"}},
        {"bounds", {"n", "theta", "r"}},
        {"solve", {"graph", "n", "theta", "r", "cells", "extent", "outer", "boundary", "amplitude", "method", "tol",
                   "max_iter", "damping", "exploratory"}},
        {"foliate", {"graph", "n", "theta", "r", "count", "cells", "extent", "outer", "boundary_kind", "boundary",
                     "amplitude", "tol", "max_iter"}},
        {"kp", {"domain", "q", "random_balls", "directions", "radial_steps"}},
        {"verify", {"samples"}},
    };
    const auto it = keys.find(command);
    if (it == keys.end()) throw ConfigError("unknown command '" + command + "'");
    return it->second;
}

// ---------------------------------------------------------------------- curv

CommandOutput run_curv(const Params& p) {
    const SymMatrix a = parse_matrix(get_string(p, "matrix", ""));
    const std::string mode = get_string(p, "mode", "r");
    CommandOutput out;
    out.table.columns = {"value"};
    double v = 0.0;
    if (mode == "r") {
        v = r_theta(a, AngleParams(get_double(p, "theta"), a.dim()));
    } else if (mode == "sl") {
        v = sl_r(a, get_double(p, "r"));
    } else if (mode == "arctan") {
        v = arctan_matrix(a);
    } else if (mode == "zeroth") {
        v = zeroth_coeff(a, get_double(p, "r"));
    } else if (mode == "eigen") {
        out.table.columns = {"lambda"};
        for (double x : eigenvalues(a).values()) out.table.rows.push_back({fmt_num(x)});
        return out;
    } else {
        throw ConfigError("mode must be one of r, sl, arctan, zeroth, eigen");
    }
    out.table.rows.push_back({fmt_num(v)});
    out.bare_value = true;
    return out;
}

// -------------------------------------------------------------------- bounds

CommandOutput run_bounds(const Params& p) {
    const int n = get_int(p, "n", 2);
    const AngleParams ap(get_double(p, "theta"), n);
    CommandOutput out;
    out.table.columns = {"theta", "r", "n", "dist_upper", "delta_lower", "coverage_depth"};
    const bool degenerate = std::abs(ap.theta() - (n - 1) * kPi / 2) <= 1e-12;
    if (degenerate) {
        out.notes.push_back("regime: degenerate (theta = (n-1)pi/2; kappa(1) = " + fmt_num(kappa(ap, 1.0)) +
                            ", delta_lower undefined)");
    }
    for (double r : get_list(p, "r")) {
        if (degenerate) {
            auto cells = row({ap.theta(), r, 0.0, dist_upper(ap, r), NAN, 0.0});
            cells[2] = std::to_string(n);
            out.table.rows.push_back(std::move(cells));
        } else {
            const BoundReport b = bound_report(ap, r);
            auto cells = row({b.theta, b.r, 0.0, b.dist_upper, b.delta_lower, b.coverage_depth});
            cells[2] = std::to_string(b.n);
            out.table.rows.push_back(std::move(cells));
        }
    }
    return out;
}

// --------------------------------------------------------------------- solve

CommandOutput run_solve(const Params& p) {
    const GridSpec grid = grid_from(p);
    const double theta = get_double(p, "theta");
    const double r = get_double(p, "r");
    const SolverConfig sc = solver_from(p, theta, r);
    sc.validate(grid.n);
    const AngleParams ap(theta, grid.n);
    const std::string method = get_string(p, "method", "newton");

    double d = 0.0;
    if (p.contains("boundary")) {
        d = get_double(p, "boundary");
    } else if (r > ap.threshold()) {
        d = dist_upper(ap, r);
    } else {
        throw ConfigError("missing required field 'boundary'");
    }
    const double amp = get_double(p, "amplitude", 0.0);
    GraphField start = GraphField::constant(grid, d);
    if (grid.mode == GraphMode::Disk2D) {
        const BoundaryData b = fixed_boundary(d, amp);
        for (int k = 0; k < start.size(); ++k)
            if (start.is_boundary(k)) start.set_height(k, b(r, start.angle(k)));
        start = harmonic_extension(start);
    }

    SolveResult res = [&] {
        if (method == "newton") return newton_solve(start, sc);
        if (method == "perron") return perron_solve(start, sc);
        throw ConfigError("method must be 'newton' or 'perron'");
    }();

    CommandOutput out;
    switch (grid.mode) {
        case GraphMode::FuchsianConstant: out.table.columns = {"node", "u", "R"}; break;
        case GraphMode::RotSymProfile: out.table.columns = {"node", "rho", "u", "R"}; break;
        case GraphMode::Disk2D: out.table.columns = {"node", "s", "t", "u", "R"}; break;
    }
    const auto rf = curvature_field(res.field, ap);
    for (int k = 0; k < res.field.size(); ++k) {
        std::vector<std::string> cells{std::to_string(k)};
        for (double c : res.field.coords(k)) cells.push_back(fmt_num(c));
        cells.push_back(fmt_num(res.field.height(k)));
        cells.push_back(fmt_num(rf[k]));
        out.table.rows.push_back(std::move(cells));
    }
    add_report_notes(out, res.report);
    out.extra["mode"] = to_string(grid.mode);
    out.extra["theta"] = std::stod(fmt_num(theta));
    out.extra["r"] = std::stod(fmt_num(r));
    out.extra["grid"] = {{"n", grid.n}, {"cells", grid.cells}, {"extent", grid.extent}};
    if (!res.report.converged) {
        out.notes.push_back("error: Perron iteration did not reach the tolerance");
        out.exit_code = 3;
    }
    return out;
}

// ------------------------------------------------------------------- foliate

CommandOutput run_foliate(const Params& p) {
    const GridSpec grid = grid_from(p);
    const double theta = get_double(p, "theta");
    const AngleParams ap(theta, grid.n);
    std::vector<double> rs = p.contains("r") ? get_list(p, "r") : default_schedule(ap, get_int(p, "count", 6));

    SweepConfig cfg;
    cfg.theta = theta;
    cfg.grid = grid;
    cfg.newton_tol = get_double(p, "tol", cfg.newton_tol);
    cfg.max_iter = get_int(p, "max_iter", cfg.max_iter);
    const double amp = get_double(p, "amplitude", 0.0);
    const std::string kind = get_string(p, "boundary_kind", "leaf");
    if (kind == "leaf") {
        cfg.boundary = leaf_boundary(ap, amp);
    } else if (kind == "fixed") {
        cfg.boundary = fixed_boundary(get_double(p, "boundary"), amp);
    } else {
        throw ConfigError("boundary_kind must be 'leaf' or 'fixed'");
    }

    const SweepResult s = sweep(cfg, rs);
    CommandOutput out;
    out.table.columns = {"r", "theta", "max_height", "min_height", "dist_upper", "coverage_depth", "converged"};
    for (const auto& rec : s.records) {
        double depth = NAN;
        if (ap.theta() > (grid.n - 1) * kPi / 2) depth = coverage_depth(ap, rec.r);
        auto cells = row({rec.r, theta, rec.max_height, rec.min_height, rec.barrier.dist_upper, depth});
        cells.push_back(rec.degraded ? "degraded" : "true");
        out.table.rows.push_back(std::move(cells));
    }
    if (s.truncated) {
        out.notes.push_back("truncated: " + s.failure);
        out.exit_code = 3;
    }
    return out;
}

// ------------------------------------------------------------------------ kp

CommandOutput run_kp(const Params& p, std::uint64_t seed) {
    const Params& raw = require(p, "domain");
    Params parsed;
    try {
        parsed = raw.is_string() ? Params::parse(raw.get<std::string>()) : raw;
    } catch (const nlohmann::json::parse_error&) {
        throw ConfigError("domain is not valid JSON");
    }
    const SphericalDomain dom = parse_domain(parsed);
    KpSampler s;
    s.seed = seed;
    s.random_balls = get_int(p, "random_balls", s.random_balls);
    s.directions = get_int(p, "directions", s.directions);
    s.radial_steps = get_int(p, "radial_steps", s.radial_steps);
    const int n = dom.n();

    CommandOutput out;
    for (int i = 0; i < n; ++i) out.table.columns.push_back("q" + std::to_string(i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.table.columns.push_back("g" + std::to_string(i) + std::to_string(j));
    for (const char* c : {"conformal_factor", "round_factor", "lower_bracket"}) out.table.columns.push_back(c);
    for (int i = 0; i <= n; ++i) out.table.columns.push_back("ball_c" + std::to_string(i));
    out.table.columns.push_back("ball_radius");

    for (const auto& q : parse_points(require(p, "q"), n)) {
        const KpEstimate e = kp_metric(dom, q, s);
        std::vector<std::string> cells;
        for (double x : q) cells.push_back(fmt_num(x));
        for (double x : e.metric.tensor) cells.push_back(fmt_num(x));
        cells.push_back(fmt_num(e.metric.conformal_factor));
        cells.push_back(fmt_num(e.metric.round_factor));
        cells.push_back(fmt_num(e.lower_bracket));
        for (double x : e.ball.center()) cells.push_back(fmt_num(x));
        cells.push_back(fmt_num(e.ball.radius()));
        out.table.rows.push_back(std::move(cells));
    }
    return out;
}

// -------------------------------------------------------------------- verify

CommandOutput run_verify(const Params& p, std::uint64_t seed) {
    const int samples = get_int(p, "samples", 2000);
    if (samples < 1) throw ConfigError("samples must be positive");
    CommandOutput out;
    out.table.columns = {"check", "passed", "value"};
    int failures = 0;
    auto record = [&](const std::string& name, bool ok, double value) {
        out.table.rows.push_back({name, ok ? "true" : "false", fmt_num(value)});
        failures += ok ? 0 : 1;
    };
    auto guarded = [&](const std::string& name, auto fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            out.notes.push_back("exception in " + name + ": " + e.what());
            record(name, false, NAN);
        }
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    guarded("r_theta_umbilic", [&] {
        double worst = 0.0;
        for (int n = 2; n <= 8; ++n)
            for (double lam : {0.1, 0.7, 1.0, 3.0})
                for (double f : {0.1, 0.5, 0.9}) {
                    const AngleParams ap(f * n * kPi / 2, n);
                    const double got = r_theta(Spectrum(std::vector<double>(n, lam)), ap);
                    worst = std::max(worst, std::abs(got - ap.threshold() / lam) / std::max(1.0, got));
                }
        record("r_theta_umbilic", worst <= 1e-10, worst);
    });
    guarded("r_theta_diag", [&] {
        const double v = r_theta(SymMatrix::diagonal({2.0, 0.5}), AngleParams(kPi / 2, 2));
        record("r_theta_diag", std::abs(v - 1.0) <= 1e-10, v);
    });
    guarded("sin_inequality", [&] {
        double worst = INFINITY;
        for (int n = 1; n <= 8; ++n)
            for (int m = n + 1; m <= 8; ++m)
                for (int k = 1; k <= 200; ++k) worst = std::min(worst, sin_inequality_margin(n, m, kPi / 2 * k / 200));
        record("sin_inequality", worst >= -1e-14, worst);
    });
    guarded("zeroth_positive", [&] {
        double worst = INFINITY;
        for (int s = 0; s < samples; ++s) {
            const int n = 2 + static_cast<int>(unit(rng) * 3);
            const double theta = ((n - 1) + unit(rng) * 0.999) * kPi / 2;
            const AngleParams ap(theta, n);
            std::vector<double> lam(n);
            for (double& l : lam) l = std::exp(4.0 * unit(rng) - 2.0);
            // Rescale so that R_theta of the sample is a random r above the threshold.
            const double r = ap.threshold() * (1.0 + 1e-6 + 4.0 * unit(rng));
            const double scale = r_theta(Spectrum(lam), ap) / r;
            for (double& l : lam) l *= scale;
            worst = std::min(worst, zeroth_coeff(Spectrum(lam), r));
        }
        record("zeroth_positive", worst >= -1e-10, worst);
    });
    guarded("zeroth_min_at_threshold", [&] {
        double worst = 0.0;
        for (int n : {2, 3}) {
            const AngleParams ap(((n - 1) + 0.5) * kPi / 2, n);
            worst = std::max(worst, std::abs(min_zeroth_coeff(ap, ap.threshold()).value));
        }
        record("zeroth_min_at_threshold", worst <= 1e-8, worst);
    });
    guarded("riccati_closed_form", [&] {
        double worst = 0.0;
        for (double l0 : {-0.5, 0.0, 0.3, 1.0, 2.5}) {
            double l = l0;
            const int steps = 2000;
            const double h = 1.0 / steps;
            for (int i = 0; i < steps; ++i) {
                auto f = [](double x) { return 1.0 - x * x; };
                const double k1 = f(l), k2 = f(l + h * k1 / 2), k3 = f(l + h * k2 / 2), k4 = f(l + h * k3);
                l += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
            }
            worst = std::max(worst, std::abs(normal_flow_shape(Spectrum({l0, l0}), 1.0)[0] - l));
        }
        record("riccati_closed_form", worst <= 1e-8, worst);
    });
    guarded("fuchsian_leaf", [&] {
        const AngleParams ap(3 * kPi / 4, 2);
        SolverConfig sc;
        sc.theta = ap.theta();
        sc.target_r = 3.0;
        const GridSpec g{GraphMode::FuchsianConstant, 2, 0, 1.0, OuterBoundary::Dirichlet};
        const auto res = newton_solve(GraphField::constant(g, 0.5), sc);
        const double err = std::abs(res.field.height(0) - fuchsian_exact(ap, 3.0));
        record("fuchsian_leaf", err <= 1e-9, err);
    });
    guarded("coverage_below_delta", [&] {
        double worst = INFINITY;
        for (int n = 2; n <= 4; ++n)
            for (double f : {0.2, 0.5, 0.8}) {
                const AngleParams ap(((n - 1) + f) * kPi / 2, n);
                for (double scale : {1.5, 3.0, 10.0}) {
                    const double r = ap.threshold() * scale;
                    worst = std::min(worst, delta_lower(ap, r) - coverage_depth(ap, r));
                }
            }
        record("coverage_below_delta", worst >= -1e-10, worst);
    });
    guarded("kp_round_ball", [&] {
        const auto dom = SphericalDomain::ball(RoundBall({0.0, 0.0, 1.0}, kPi / 2));
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double rad = 0.9 * unit(rng), ang = 2 * kPi * unit(rng);
            const std::vector<double> q{rad * std::cos(ang), rad * std::sin(ang)};
            const double want = 4.0 / std::pow(1.0 - rad * rad, 2);
            KpSampler s;
            s.seed = seed + i;
            worst = std::max(worst, std::abs(kp_metric(dom, q, s).metric.conformal_factor / want - 1.0));
        }
        record("kp_round_ball", worst <= 1e-6, worst);
    });

    out.notes.push_back("failures: " + std::to_string(failures));
    out.exit_code = failures ? 1 : 0;
    return out;
}

}  // namespace slc::cli
