#include "slc/graphsolve.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

#include "slc/errors.hpp"

namespace slc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Term {
    int node;
    double w;
};
using TermList = std::vector<Term>;

// Finite-difference stencils for the first and second chart derivatives of a
// node function at one node.
struct Stencil {
    std::vector<TermList> d1;  // n
    std::vector<TermList> d2;  // n*n
};

struct BaseJet {
    MinkVec x;
    std::vector<MinkVec> d1;
    std::vector<MinkVec> d2;
};

int disk_index(int i, int j, int cells) { return i * (cells + 1) + j; }

Stencil height_stencil(const GridSpec& g, int node) {
    const int n = g.n;
    Stencil st{std::vector<TermList>(n), std::vector<TermList>(n * n)};
    const double h = g.spacing();
    switch (g.mode) {
        case GraphMode::FuchsianConstant:
            break;
        case GraphMode::RotSymProfile: {
            const int N = g.cells;
            if (node == 0) {
                // u(y) = U(|y|) is even, so U''(0) = 2 (U(h) - U(0)) / h^2.
                for (int i = 0; i < n; ++i) st.d2[i * n + i] = {{1, 2.0 / (h * h)}, {0, -2.0 / (h * h)}};
            } else {
                const int kp = (node == N) ? N - 1 : node + 1;  // reflecting ghost
                const int km = node - 1;
                st.d1[0] = {{kp, 0.5 / h}, {km, -0.5 / h}};
                st.d2[0] = {{kp, 1.0 / (h * h)}, {node, -2.0 / (h * h)}, {km, 1.0 / (h * h)}};
            }
            break;
        }
        case GraphMode::Disk2D: {
            const int N = g.cells;
            const int i = node / (N + 1);
            const int j = node % (N + 1);
            const double c1 = 0.5 / h;
            const double c2 = 1.0 / (h * h);
            const double cm = 0.25 / (h * h);
            st.d1[0] = {{disk_index(i + 1, j, N), c1}, {disk_index(i - 1, j, N), -c1}};
            st.d1[1] = {{disk_index(i, j + 1, N), c1}, {disk_index(i, j - 1, N), -c1}};
            st.d2[0] = {{disk_index(i + 1, j, N), c2}, {node, -2 * c2}, {disk_index(i - 1, j, N), c2}};
            st.d2[3] = {{disk_index(i, j + 1, N), c2}, {node, -2 * c2}, {disk_index(i, j - 1, N), c2}};
            st.d2[1] = {{disk_index(i + 1, j + 1, N), cm},
                        {disk_index(i + 1, j - 1, N), -cm},
                        {disk_index(i - 1, j + 1, N), -cm},
                        {disk_index(i - 1, j - 1, N), cm}};
            st.d2[2] = st.d2[1];
            break;
        }
    }
    return st;
}

// First-derivative stencils that only reference interior nodes; used for the
// gradient of the SL field, which is undefined on Dirichlet nodes.
std::vector<TermList> interior_gradient_stencil(const GraphField& f, int node) {
    const GridSpec& g = f.grid();
    const int n = g.n;
    std::vector<TermList> out(n);
    const double h = g.spacing();
    auto line = [&](int k, int lo_limit, int hi_limit, auto index) -> TermList {
        // Central where both neighbours are interior, else second-order one-sided.
        if (k - 1 >= lo_limit && k + 1 <= hi_limit) return {{index(k + 1), 0.5 / h}, {index(k - 1), -0.5 / h}};
        if (k - 1 < lo_limit) return {{index(k), -1.5 / h}, {index(k + 1), 2.0 / h}, {index(k + 2), -0.5 / h}};
        return {{index(k), 1.5 / h}, {index(k - 1), -2.0 / h}, {index(k - 2), 0.5 / h}};
    };
    switch (g.mode) {
        case GraphMode::FuchsianConstant:
            break;
        case GraphMode::RotSymProfile: {
            const int N = g.cells;
            if (node == 0 || node == N) break;  // zero by symmetry
            const int hi = (g.outer == OuterBoundary::Dirichlet) ? N - 1 : N;
            out[0] = line(node, 0, hi, [](int k) { return k; });
            break;
        }
        case GraphMode::Disk2D: {
            const int N = g.cells;
            const int i = node / (N + 1);
            const int j = node % (N + 1);
            out[0] = line(i, 1, N - 1, [&](int k) { return disk_index(k, j, N); });
            out[1] = line(j, 1, N - 1, [&](int k) { return disk_index(i, k, N); });
            break;
        }
    }
    return out;
}

BaseJet base_jet(const GraphField& f, int node) {
    const GridSpec& g = f.grid();
    const int n = g.n;
    const int amb = n + 2;
    auto e = [amb](int k) { return MinkVec::basis(amb, k); };
    BaseJet b{MinkVec(amb), std::vector<MinkVec>(n, MinkVec(amb)), std::vector<MinkVec>(n * n, MinkVec(amb))};
    auto cartesian_origin = [&] {
        // Exponential chart at e0: x(y) = e0 + y + |y|^2/2 e0 + O(|y|^3).
        b.x = e(0);
        for (int i = 0; i < n; ++i) {
            b.d1[i] = e(i + 1);
            b.d2[i * n + i] = e(0);
        }
    };
    switch (g.mode) {
        case GraphMode::FuchsianConstant:
            cartesian_origin();
            break;
        case GraphMode::RotSymProfile: {
            if (node == 0) {
                cartesian_origin();
                break;
            }
            // (rho, phi_1..phi_{n-1}) with x = cosh rho e0 + sinh rho w(phi),
            // w(phi) = (e1 + sum phi_k e_{k+1}) / |.|, evaluated at phi = 0.
            const double rho = node * g.spacing();
            const double ch = std::cosh(rho), sh = std::sinh(rho);
            b.x = ch * e(0) + sh * e(1);
            b.d1[0] = sh * e(0) + ch * e(1);
            b.d2[0] = b.x;
            for (int k = 1; k < n; ++k) {
                b.d1[k] = sh * e(k + 1);
                b.d2[0 * n + k] = ch * e(k + 1);
                b.d2[k * n + 0] = b.d2[0 * n + k];
                b.d2[k * n + k] = (-sh) * e(1);
            }
            break;
        }
        case GraphMode::Disk2D: {
            const auto c = f.coords(node);
            const double s = c[0], t = c[1];
            const MinkVec gs = std::cosh(s) * e(0) + std::sinh(s) * e(1);   // geodesic point
            const MinkVec gv = std::sinh(s) * e(0) + std::cosh(s) * e(1);   // its velocity
            b.x = std::cosh(t) * gs + std::sinh(t) * e(2);
            b.d1[0] = std::cosh(t) * gv;
            b.d1[1] = std::sinh(t) * gs + std::cosh(t) * e(2);
            b.d2[0] = std::cosh(t) * gs;
            b.d2[1] = std::sinh(t) * gv;
            b.d2[2] = b.d2[1];
            b.d2[3] = b.x;
            break;
        }
    }
    return b;
}

std::vector<double> chol_solve(const FundamentalForms& ff, std::vector<double> b) {
    const int n = ff.n;
    const auto& L = ff.chol;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) b[i] -= L[i * n + k] * b[k];
        b[i] /= L[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) b[i] -= L[k * n + i] * b[k];
        b[i] /= L[i * n + i];
    }
    return b;
}

// Second-order part and zeroth-order coefficient of the linearised operator
// at one node, as coefficients on node values of f.
struct OperatorRow {
    std::map<int, double> entries;  // includes the zeroth-order term
};

OperatorRow operator_row(const GraphField& f, int node, const NodeState& st, double r) {
    const int n = st.forms.n;
    const auto& q = st.eig.vectors;
    const auto lam = st.eig.values.values();

    // M = (Id + r^2 A^2)^-1 in the orthonormal frame, then K = L^-T M L^-1 so
    // that Tr(M Hess) = sum K_ij Hess_ij with Hess in chart coordinates.
    std::vector<double> msym(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                msym[i * n + j] += q[i * n + k] * q[j * n + k] / (1.0 + r * r * lam[k] * lam[k]);
    const auto& L = st.forms.chol;
    std::vector<double> linv(n * n, 0.0);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= L[i * n + k] * linv[k * n + c];
            linv[i * n + c] = s / L[i * n + i];
        }
    }
    std::vector<double> kmat(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) s += linv[a * n + i] * msym[a * n + b] * linv[b * n + j];
            kmat[i * n + j] = s;
        }

    double zeroth = 0.0;
    for (double l : lam) zeroth += (1.0 - l * l) / (1.0 + r * r * l * l);

    const Stencil sten = height_stencil(f.grid(), node);
    OperatorRow row;
    const auto& gamma = st.forms.christoffel;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double k = kmat[i * n + j];
            for (const Term& t : sten.d2[i * n + j]) row.entries[t.node] -= k * t.w;
            for (int m = 0; m < n; ++m) {
                const double gm = gamma[m * n * n + i * n + j];
                if (gm == 0.0) continue;
                for (const Term& t : sten.d1[m]) row.entries[t.node] += k * gm * t.w;
            }
        }
    }
    row.entries[node] += zeroth;
    return row;
}

void require_dim(const GraphField& g, const AngleParams& p) {
    if (p.n() != g.grid().n) throw ConfigError("angle parameters and grid disagree on n");
}

// Evaluated geometry over a subset of nodes.
struct Evaluation {
    std::vector<std::optional<NodeState>> states;
    std::vector<double> sl;       // SL_r at evaluated nodes, NaN elsewhere
    std::vector<double> rtheta;   // R_theta at active nodes, NaN elsewhere
    double residual = 0.0;        // max over active |R_theta - r|
};

Evaluation evaluate(const GraphField& g, const std::vector<char>& needed, const std::vector<char>& active,
                    const AngleParams& p, double r) {
    const int N = g.size();
    Evaluation ev{std::vector<std::optional<NodeState>>(N), std::vector<double>(N, kNaN),
                  std::vector<double>(N, kNaN), 0.0};
    for (int k = 0; k < N; ++k) {
        if (!needed[k]) continue;
        ev.states[k] = node_state(g, k, true);
        ev.sl[k] = sl_r(ev.states[k]->eig.values, r);
        if (active[k]) {
            ev.rtheta[k] = r_theta(ev.states[k]->eig.values, p);
            ev.residual = std::max(ev.residual, std::abs(ev.rtheta[k] - r));
        }
    }
    return ev;
}

std::vector<char> needed_nodes(const GraphField& g, const std::vector<char>& active) {
    std::vector<char> needed(active);
    for (int k = 0; k < g.size(); ++k) {
        if (!active[k]) continue;
        for (const auto& terms : interior_gradient_stencil(g, k))
            for (const Term& t : terms) needed[t.node] = 1;
    }
    return needed;
}

// Jacobian of SL_r at active nodes with respect to active heights.
Eigen::SparseMatrix<double> active_jacobian(const GraphField& g, const Evaluation& ev,
                                            const std::vector<int>& active_index, double r) {
    const int N = g.size();
    int m = 0;
    for (int k = 0; k < N; ++k) m = std::max(m, active_index[k] + 1);
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < N; ++k) {
        const int row = active_index[k];
        if (row < 0) continue;
        const NodeState& st = *ev.states[k];
        const OperatorRow op = operator_row(g, k, st, r);
        for (const auto& [q, c] : op.entries) {
            const int col = active_index[q];
            if (col < 0) continue;
            trip.emplace_back(row, col, r * c * ev.states[q]->normal_speed);
        }
        double adv = 0.0;
        const auto grad = interior_gradient_stencil(g, k);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            double d = 0.0;
            for (const Term& t : grad[i]) d += t.w * ev.sl[t.node];
            adv += st.transport[i] * d;
        }
        trip.emplace_back(row, row, adv);
    }
    Eigen::SparseMatrix<double> j(m, m);
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
}

struct CoreOutcome {
    bool converged = false;
    std::vector<double> residuals;
    int iterations = 0;
    int halvings = 0;
};

CoreOutcome newton_core(GraphField& g, const std::vector<char>& active, const AngleParams& p, double r,
                        double tol, int max_iter, double damping) {
    const int N = g.size();
    std::vector<int> index(N, -1);
    int m = 0;
    for (int k = 0; k < N; ++k)
        if (active[k]) index[k] = m++;
    const auto needed = needed_nodes(g, active);

    CoreOutcome out;
    Evaluation ev = evaluate(g, needed, active, p, r);
    for (int it = 0;; ++it) {
        out.residuals.push_back(ev.residual);
        out.iterations = it;
        if (ev.residual <= tol * std::max(1.0, r)) {
            out.converged = true;
            return out;
        }
        if (it >= max_iter) return out;

        const Eigen::SparseMatrix<double> jac = active_jacobian(g, ev, index, r);
        Eigen::VectorXd rhs(m);
        for (int k = 0; k < N; ++k)
            if (index[k] >= 0) rhs[index[k]] = -(ev.sl[k] - p.theta());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(jac);
        if (lu.info() != Eigen::Success) throw ConvergenceError("Newton: singular Jacobian");
        const Eigen::VectorXd delta = lu.solve(rhs);

        double alpha = damping;
        bool accepted = false;
        bool convexity_lost = false;
        for (int halving = 0; halving <= 8; ++halving) {
            GraphField trial = g;
            bool nonneg = true;
            for (int k = 0; k < N; ++k) {
                if (index[k] < 0) continue;
                const double v = g.height(k) + alpha * delta[index[k]];
                if (!(v >= 0.0)) {
                    nonneg = false;
                    break;
                }
                trial.set_height(k, v);
            }
            if (nonneg) {
                try {
                    Evaluation tev = evaluate(trial, needed, active, p, r);
                    if (tev.residual < ev.residual) {
                        g = std::move(trial);
                        ev = std::move(tev);
                        accepted = true;
                        break;
                    }
                } catch (const NotConvexError&) {
                    convexity_lost = true;
                } catch (const NotImmersedError&) {
                    convexity_lost = true;
                }
            }
            alpha *= 0.5;
            ++out.halvings;
        }
        if (!accepted) {
            if (convexity_lost) throw NotConvexError("Newton: convexity lost; step rejected after 8 halvings");
            throw ConvergenceError("Newton: no residual decrease after 8 step halvings (residual " +
                                   std::to_string(ev.residual) + ")");
        }
    }
}

void fill_report(const GraphField& g, const AngleParams& p, double r, SolveReport& rep) {
    rep.min_height = *std::min_element(g.heights().begin(), g.heights().end());
    rep.max_height = *std::max_element(g.heights().begin(), g.heights().end());
    double kmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) continue;
        kmin = std::min(kmin, node_state(g, k, false).eig.values.min());
    }
    rep.min_principal_curvature = kmin;
    try {
        rep.barrier = barrier_check(g, p, r);
    } catch (const DomainError&) {
        // Exploratory runs below the threshold have no equidistant barrier.
    }
}

}  // namespace

// ------------------------------------------------------------------ GridSpec

std::string to_string(GraphMode m) {
    switch (m) {
        case GraphMode::FuchsianConstant: return "fuchsian";
        case GraphMode::RotSymProfile: return "rotsym";
        case GraphMode::Disk2D: return "disk2d";
    }
    return "?";
}

GraphMode graph_mode_from_string(const std::string& s) {
    if (s == "fuchsian") return GraphMode::FuchsianConstant;
    if (s == "rotsym") return GraphMode::RotSymProfile;
    if (s == "disk2d") return GraphMode::Disk2D;
    throw ConfigError("unknown graph mode '" + s + "' (expected fuchsian, rotsym or disk2d)");
}

void GridSpec::validate() const {
    if (n < kMinDim || n > kMaxDim) throw ConfigError("grid dimension n out of range");
    switch (mode) {
        case GraphMode::FuchsianConstant:
            break;
        case GraphMode::RotSymProfile:
            if (cells < 4) throw ConfigError("rotsym grid needs at least 4 cells");
            if (!(extent > 0.0)) throw ConfigError("rotsym extent must be positive");
            break;
        case GraphMode::Disk2D:
            if (n != 2) throw ConfigError("disk2d grids require n = 2");
            if (cells < 4) throw ConfigError("disk2d grid needs at least 4 cells per axis");
            if (!(extent > 0.0)) throw ConfigError("disk2d extent must be positive");
            break;
    }
}

double GridSpec::spacing() const {
    switch (mode) {
        case GraphMode::FuchsianConstant: return 0.0;
        case GraphMode::RotSymProfile: return extent / cells;
        case GraphMode::Disk2D: return 2.0 * extent / cells;
    }
    return 0.0;
}

int GridSpec::node_count() const {
    switch (mode) {
        case GraphMode::FuchsianConstant: return 1;
        case GraphMode::RotSymProfile: return cells + 1;
        case GraphMode::Disk2D: return (cells + 1) * (cells + 1);
    }
    return 0;
}

// ---------------------------------------------------------------- GraphField

GraphField::GraphField(GridSpec grid, std::vector<double> heights) : grid_(grid), u_(std::move(heights)) {
    grid_.validate();
    if (static_cast<int>(u_.size()) != grid_.node_count()) {
        throw ConfigError("expected " + std::to_string(grid_.node_count()) + " heights, got " +
                          std::to_string(u_.size()));
    }
    for (double v : u_)
        if (!(v >= 0.0)) throw DomainError("graph heights must be non-negative");
}

GraphField GraphField::constant(const GridSpec& grid, double height) {
    return GraphField(grid, std::vector<double>(grid.node_count(), height));
}

void GraphField::set_height(int node, double value) {
    if (!(value >= 0.0)) throw DomainError("graph heights must be non-negative");
    u_.at(node) = value;
}

bool GraphField::is_boundary(int node) const {
    switch (grid_.mode) {
        case GraphMode::FuchsianConstant:
            return false;
        case GraphMode::RotSymProfile:
            return node == grid_.cells && grid_.outer == OuterBoundary::Dirichlet;
        case GraphMode::Disk2D: {
            const int N = grid_.cells;
            const int i = node / (N + 1);
            const int j = node % (N + 1);
            return i == 0 || j == 0 || i == N || j == N;
        }
    }
    return false;
}

std::vector<double> GraphField::coords(int node) const {
    switch (grid_.mode) {
        case GraphMode::FuchsianConstant:
            return {};
        case GraphMode::RotSymProfile:
            return {node * grid_.spacing()};
        case GraphMode::Disk2D: {
            const int N = grid_.cells;
            const double h = grid_.spacing();
            return {-grid_.extent + (node / (N + 1)) * h, -grid_.extent + (node % (N + 1)) * h};
        }
    }
    return {};
}

double GraphField::angle(int node) const {
    const auto c = coords(node);
    if (c.size() != 2) throw ConfigError("angle() is defined for disk2d nodes only");
    return std::atan2(c[1], c[0]);
}

GraphField harmonic_extension(const GraphField& g) {
    const GridSpec& grid = g.grid();
    GraphField out = g;
    if (grid.mode == GraphMode::FuchsianConstant) return out;
    if (grid.mode == GraphMode::RotSymProfile) {
        if (grid.outer == OuterBoundary::Dirichlet) {
            for (int k = 0; k < grid.cells; ++k) out.set_height(k, g.height(grid.cells));
        }
        return out;
    }
    const int N = g.size();
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    for (int k = 0; k < N; ++k) {
        if (g.is_boundary(k)) {
            trip.emplace_back(k, k, 1.0);
            rhs[k] = g.height(k);
            continue;
        }
        const Stencil st = height_stencil(grid, k);
        for (const Term& t : st.d2[0]) trip.emplace_back(k, t.node, t.w);
        for (const Term& t : st.d2[3]) trip.emplace_back(k, t.node, t.w);
    }
    Eigen::SparseMatrix<double> lap(N, N);
    lap.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(lap);
    const Eigen::VectorXd u = lu.solve(rhs);
    for (int k = 0; k < N; ++k) out.set_height(k, std::max(0.0, u[k]));
    return out;
}

// -------------------------------------------------------------- node geometry

NodeState node_state(const GraphField& g, int node, bool require_convex) {
    if (g.is_boundary(node)) throw ConfigError("node_state: node " + std::to_string(node) + " is a boundary node");
    const int n = g.grid().n;
    const Stencil st = height_stencil(g.grid(), node);
    const BaseJet b = base_jet(g, node);
    const auto& u = g.heights();

    const double u0 = u[node];
    std::vector<double> du(n, 0.0), ddu(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (const Term& t : st.d1[i]) du[i] += t.w * u[t.node];
    for (int i = 0; i < n * n; ++i)
        for (const Term& t : st.d2[i]) ddu[i] += t.w * u[t.node];

    const int amb = n + 2;
    const MinkVec e = MinkVec::basis(amb, amb - 1);
    const double C = std::cosh(u0), S = std::sinh(u0);
    const MinkVec lift = S * b.x + C * e;  // d/du X
    const MinkVec point = C * b.x + S * e;

    EmbeddingJet jet;
    jet.x = point;
    jet.outward = lift;
    jet.d1.resize(n);
    jet.d2.resize(n * n);
    for (int i = 0; i < n; ++i) jet.d1[i] = C * b.d1[i] + du[i] * lift;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            jet.d2[i * n + j] = C * b.d2[i * n + j] + (S * du[j]) * b.d1[i] + (S * du[i]) * b.d1[j] +
                                ddu[i * n + j] * lift + (du[i] * du[j]) * point;
        }
    }

    NodeState out;
    out.forms = fundamental_forms(jet);
    out.eig = jacobi_eigen(out.forms.shape);
    if (require_convex && !(out.eig.values.min() > 0.0)) {
        throw NotConvexError("not strictly convex at node " + std::to_string(node) +
                                 " (smallest principal curvature " + std::to_string(out.eig.values.min()) + ")",
                             node);
    }
    out.normal_speed = minkowski_dot(lift, out.forms.normal);
    std::vector<double> proj(n);
    for (int j = 0; j < n; ++j) proj[j] = minkowski_dot(jet.d1[j], lift);
    out.transport = chol_solve(out.forms, proj);
    return out;
}

std::vector<double> curvature_field(const GraphField& g, const AngleParams& p) {
    require_dim(g, p);
    std::vector<double> out(g.size(), kNaN);
    for (int k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) continue;
        out[k] = r_theta(node_state(g, k).eig.values, p);
    }
    return out;
}

std::vector<double> sl_field(const GraphField& g, double r) {
    std::vector<double> out(g.size(), kNaN);
    for (int k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) continue;
        out[k] = sl_r(node_state(g, k, false).eig.values, r);
    }
    return out;
}

Eigen::SparseMatrix<double> linearized_operator(const GraphField& g, const AngleParams& p, double r) {
    require_dim(g, p);
    if (!(r > 0.0)) throw DomainError("linearized_operator requires r > 0");
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) {
            trip.emplace_back(k, k, 1.0);
            continue;
        }
        const NodeState st = node_state(g, k);
        for (const auto& [q, c] : operator_row(g, k, st, r).entries) trip.emplace_back(k, q, c);
    }
    Eigen::SparseMatrix<double> op(g.size(), g.size());
    op.setFromTriplets(trip.begin(), trip.end());
    return op;
}

Eigen::SparseMatrix<double> height_jacobian(const GraphField& g, double r) {
    if (!(r > 0.0)) throw DomainError("height_jacobian requires r > 0");
    const int N = g.size();
    std::vector<char> interior(N);
    std::vector<int> index(N, -1);
    for (int k = 0; k < N; ++k) {
        interior[k] = !g.is_boundary(k);
        if (interior[k]) index[k] = k;
    }
    // theta only matters for R_theta, which the Jacobian does not use.
    Evaluation ev{std::vector<std::optional<NodeState>>(N), std::vector<double>(N, kNaN), {}, 0.0};
    for (int k = 0; k < N; ++k) {
        if (!interior[k]) continue;
        ev.states[k] = node_state(g, k);
        ev.sl[k] = sl_r(ev.states[k]->eig.values, r);
    }
    Eigen::SparseMatrix<double> inner = active_jacobian(g, ev, index, r);
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < inner.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(inner, k); it; ++it)
            trip.emplace_back(int(it.row()), int(it.col()), it.value());
    for (int k = 0; k < N; ++k)
        if (!interior[k]) trip.emplace_back(k, k, 1.0);
    Eigen::SparseMatrix<double> j(N, N);
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
}

// ------------------------------------------------------------------- solvers

void SolverConfig::validate(int n) const {
    const AngleParams p(theta, n);
    if (!(target_r > 0.0)) throw DomainError("target r must be positive");
    if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
    if (exploratory) return;
    if (!(theta > (n - 1) * kPi / 2)) {
        throw DomainError("solver requires theta > (n-1)pi/2; the boundary case has no quantitative convexity bound");
    }
    if (!(target_r > p.threshold())) {
        throw DomainError("target r = " + std::to_string(target_r) + " is below threshold tan(theta/n) = " +
                          std::to_string(p.threshold()));
    }
}

BarrierDiagnostics barrier_check(const GraphField& g, const AngleParams& p, double r) {
    require_dim(g, p);
    BarrierDiagnostics d;
    const double h = g.grid().spacing();
    d.slack = 2.0 * h * h + 1e-9;
    d.dist_upper = dist_upper(p, r);
    d.coverage_depth = kNaN;
    const auto& u = g.heights();
    d.max_height = *std::max_element(u.begin(), u.end());
    d.min_height = *std::min_element(u.begin(), u.end());
    d.lower_checked = g.grid().mode == GraphMode::FuchsianConstant && p.theta() > (p.n() - 1) * kPi / 2;
    if (d.lower_checked) d.coverage_depth = coverage_depth(p, r);
    for (int k = 0; k < g.size(); ++k) {
        if (u[k] > d.dist_upper + d.slack) d.upper_flags.push_back(k);
        if (d.lower_checked && u[k] < d.coverage_depth - d.slack) d.lower_flags.push_back(k);
    }
    return d;
}

SolveResult newton_solve(const GraphField& start, const SolverConfig& cfg) {
    const int n = start.grid().n;
    cfg.validate(n);
    const AngleParams p(cfg.theta, n);
    GraphField g = start;
    std::vector<char> active(g.size());
    for (int k = 0; k < g.size(); ++k) active[k] = !g.is_boundary(k);

    const CoreOutcome core = newton_core(g, active, p, cfg.target_r, cfg.newton_tol, cfg.max_iter, cfg.damping);
    if (!core.converged) {
        throw ConvergenceError("Newton did not converge in " + std::to_string(cfg.max_iter) +
                               " iterations (residual " + std::to_string(core.residuals.back()) + ")");
    }
    SolveResult res{std::move(g), {}};
    res.report.converged = true;
    res.report.residuals = core.residuals;
    res.report.iterations = core.iterations;
    res.report.halvings = core.halvings;
    fill_report(res.field, p, cfg.target_r, res.report);
    return res;
}

SolveResult perron_solve(const GraphField& supersolution, const SolverConfig& cfg, const PerronOptions& opts) {
    const GridSpec& grid = supersolution.grid();
    if (grid.mode != GraphMode::RotSymProfile) throw ConfigError("perron_solve supports the rotsym mode only");
    if (opts.window_cells < 2 || opts.window_stride < 1 || opts.window_stride > opts.window_cells) {
        throw ConfigError("invalid Perron window configuration");
    }
    const int n = grid.n;
    cfg.validate(n);
    const AngleParams p(cfg.theta, n);
    const double r = cfg.target_r;
    const double goal = 10.0 * cfg.newton_tol * std::max(1.0, r);

    GraphField g = supersolution;
    const auto field = curvature_field(g, p);
    for (int k = 0; k < g.size(); ++k) {
        if (!g.is_boundary(k) && field[k] > r + goal) {
            throw PreconditionError("Perron start is not a supersolution: R_theta = " + std::to_string(field[k]) +
                                    " > r at node " + std::to_string(k));
        }
    }

    const int N = grid.cells;
    std::vector<std::pair<int, int>> windows;
    for (int lo = 0;; lo += opts.window_stride) {
        const int hi = std::min(lo + opts.window_cells, N);
        windows.emplace_back(lo, hi);
        if (hi == N) break;
    }

    std::vector<char> all(g.size());
    for (int k = 0; k < g.size(); ++k) all[k] = !g.is_boundary(k);

    SolveResult res{g, {}};
    SolveReport& rep = res.report;
    auto global_residual = [&](const GraphField& f) {
        double m = 0.0;
        const auto rf = curvature_field(f, p);
        for (int k = 0; k < f.size(); ++k)
            if (!f.is_boundary(k)) m = std::max(m, std::abs(rf[k] - r));
        return m;
    };
    rep.residuals.push_back(global_residual(g));

    for (int sweep = 0; sweep < opts.max_sweeps && rep.residuals.back() > goal; ++sweep) {
        const bool forward = (sweep % 2 == 0);
        for (std::size_t w = 0; w < windows.size(); ++w) {
            const auto [lo, hi] = windows[forward ? w : windows.size() - 1 - w];
            std::vector<char> active(g.size(), 0);
            for (int k = lo; k <= hi; ++k) {
                const bool fixed_end = (k == lo && lo != 0) || (k == hi && g.is_boundary(k)) ||
                                       (k == hi && hi != N);
                active[k] = !fixed_end;
            }
            GraphField local = g;
            try {
                // Operation A: local Dirichlet replacement.
                newton_core(local, active, p, r, 0.1 * cfg.newton_tol, cfg.max_iter, cfg.damping);
            } catch (const Error&) {
                rep.converged = false;
                rep.iterations = sweep;
                res.field = g;
                fill_report(g, p, r, rep);
                return res;
            }
            // Operation B: pointwise minimum with the current iterate.
            for (int k = lo; k <= hi; ++k) {
                const double next = std::min(g.height(k), local.height(k));
                if (next > g.height(k)) rep.monotone = false;
                g.set_height(k, next);
            }
        }
        rep.residuals.push_back(global_residual(g));
        rep.iterations = sweep + 1;
    }
    rep.converged = rep.residuals.back() <= goal;
    res.field = g;
    fill_report(g, p, r, rep);
    return res;
}

}  // namespace slc
