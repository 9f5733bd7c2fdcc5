#pragma once

// Graphs over a totally geodesic base in Fermi height coordinates, pointwise
// special Lagrangian curvature, its linearisation, and Newton / Perron
// solvers for constant R_theta.
//
// Three discretisations share one code path:
//   FuchsianConstant  a single height over a closed base (constant graphs);
//   RotSymProfile     radial profile u(rho) over a geodesic ball of H^n,
//                     nodes rho_k = k h, k = 0..cells;
//   Disk2D            n = 2, heights over the square [-a, a]^2 of the Fermi
//                     chart (s, t) -> cosh t (cosh s e0 + sinh s e1) + sinh t e2
//                     of H^2, Dirichlet data on the square's edges.
//
// Embedding derivatives come from the analytic base chart and central
// differences of the heights (chain rule), so constant heights are
// represented exactly.

#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "slc/barriers.hpp"
#include "slc/hypgeom.hpp"
#include "slc/symcurv.hpp"

namespace slc {

enum class GraphMode { FuchsianConstant, RotSymProfile, Disk2D };
enum class OuterBoundary { Dirichlet, Reflecting };

std::string to_string(GraphMode m);
GraphMode graph_mode_from_string(const std::string& s);

struct GridSpec {
    GraphMode mode = GraphMode::FuchsianConstant;
    int n = 2;          // hypersurface dimension; Disk2D requires 2
    int cells = 0;      // radial cells (RotSym) or cells per axis (Disk2D)
    double extent = 1;  // outer radius (RotSym) or half-width a (Disk2D)
    OuterBoundary outer = OuterBoundary::Dirichlet;  // RotSym only

    void validate() const;
    double spacing() const;  // 0 for FuchsianConstant
    int node_count() const;
};

class GraphField {
public:
    GraphField(GridSpec grid, std::vector<double> heights);
    static GraphField constant(const GridSpec& grid, double height);

    const GridSpec& grid() const noexcept { return grid_; }
    const std::vector<double>& heights() const noexcept { return u_; }
    double height(int node) const { return u_[node]; }
    void set_height(int node, double value);
    int size() const noexcept { return static_cast<int>(u_.size()); }

    bool is_boundary(int node) const;
    // Chart coordinates of a node: {} / {rho} / {s, t}.
    std::vector<double> coords(int node) const;
    // Polar angle atan2(t, s) of a Disk2D node.
    double angle(int node) const;

private:
    GridSpec grid_;
    std::vector<double> u_;
};

// Same boundary values, interior replaced by the discrete harmonic extension
// of the boundary data (chart Laplacian). A smooth starting guess for
// Dirichlet problems.
GraphField harmonic_extension(const GraphField& g);

// Geometry of the embedded graph at one interior node.
struct NodeState {
    FundamentalForms forms;
    EigenDecomposition eig;          // of forms.shape
    double normal_speed = 0.0;       // <d/du X, N>
    std::vector<double> transport;   // d/du X = normal_speed N + transport^i X_i
};

// Throws NotConvexError if the node's shape operator is not positive definite
// and `require_convex` is set.
NodeState node_state(const GraphField& g, int node, bool require_convex = true);

// Pointwise R_theta; boundary nodes hold NaN.
std::vector<double> curvature_field(const GraphField& g, const AngleParams& p);
// Pointwise SL_r; boundary nodes hold NaN.
std::vector<double> sl_field(const GraphField& g, double r);

// The linearisation (1/r) D SL_r . f = -Tr((Id + r^2 A^2)^-1 Hess f) +
// Tr((Id - A^2)(Id + r^2 A^2)^-1) f acting on normal displacements f, with
// the Hessian of the induced metric. Dirichlet rows are the identity.
Eigen::SparseMatrix<double> linearized_operator(const GraphField& g, const AngleParams& p, double r);

// Derivative of the node values of SL_r with respect to the heights:
// r L(w g) + (transport . grad SL_r) g. Dirichlet rows are the identity.
Eigen::SparseMatrix<double> height_jacobian(const GraphField& g, double r);

struct SolverConfig {
    double theta = 0.0;
    double target_r = 0.0;
    double newton_tol = 1e-9;   // on max |R_theta - target_r| / max(1, target_r)
    int max_iter = 50;
    double damping = 1.0;       // initial step fraction in (0, 1]
    bool exploratory = false;   // permit target_r <= tan(theta/n) and theta <= (n-1)pi/2

    void validate(int n) const;
};

struct BarrierDiagnostics {
    double dist_upper = 0.0;
    double coverage_depth = 0.0;  // NaN when not applicable
    double slack = 0.0;
    double max_height = 0.0;
    double min_height = 0.0;
    bool lower_checked = false;
    std::vector<int> upper_flags;  // nodes with u > dist_upper + slack
    std::vector<int> lower_flags;  // nodes with u < coverage_depth - slack
    bool clean() const noexcept { return upper_flags.empty() && lower_flags.empty(); }
};

// Flags nodes above the equidistant barrier (all modes) or, for the
// FuchsianConstant mode, below the coverage depth. Slack is 2h^2 + 1e-9.
BarrierDiagnostics barrier_check(const GraphField& g, const AngleParams& p, double r);

struct SolveReport {
    bool converged = false;
    std::vector<double> residuals;  // max |R_theta - r| per iteration / sweep
    int iterations = 0;
    int halvings = 0;
    double min_height = 0.0;
    double max_height = 0.0;
    double min_principal_curvature = 0.0;
    BarrierDiagnostics barrier;
    bool monotone = true;  // Perron: every iterate below its predecessor
};

struct SolveResult {
    GraphField field;
    SolveReport report;
};

// Damped Newton iteration on SL_r(u) = theta with r = target_r. Throws
// ConvergenceError after max_iter iterations or 8 failed step halvings and
// NotConvexError if the start is not strictly convex.
SolveResult newton_solve(const GraphField& start, const SolverConfig& cfg);

struct PerronOptions {
    int window_cells = 8;      // cells per local Dirichlet subproblem
    int window_stride = 4;     // 50% overlap
    int max_sweeps = 20000;
};

// Monotone iteration from a supersolution (R_theta <= target_r): local
// Dirichlet replacement on overlapping windows followed by the pointwise
// minimum with the current iterate. RotSymProfile only. Stops when
// max |R_theta - r| <= 10 newton_tol max(1, r); otherwise report.converged is false.
SolveResult perron_solve(const GraphField& supersolution, const SolverConfig& cfg,
                         const PerronOptions& opts = {});

}  // namespace slc
