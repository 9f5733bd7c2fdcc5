#pragma once

// Symmetric-matrix algebra and the special Lagrangian curvature functions
// ArcTan(A), SL_r(A) and R_theta(A).

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace slc {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 8;

// Module-wide tolerances. Not user-tunable.
inline constexpr double kCompareTol = 1e-10;
inline constexpr double kSolveTol = 1e-12;

class SymMatrix {
public:
    explicit SymMatrix(int n);  // zero matrix

    // Row-major n*n entries; the result is (M + M^T)/2.
    static SymMatrix from_entries(int n, std::span<const double> row_major);
    static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static SymMatrix identity(int n);
    static SymMatrix diagonal(std::span<const double> d);
    static SymMatrix diagonal(std::initializer_list<double> d);
    // Q diag(d) Q^T for a row-major orthogonal Q.
    static SymMatrix conjugated(std::span<const double> d, std::span<const double> q);

    int dim() const noexcept { return n_; }
    double operator()(int i, int j) const noexcept { return a_[i * kMaxDim + j]; }
    void set(int i, int j, double v) noexcept {
        a_[i * kMaxDim + j] = v;
        a_[j * kMaxDim + i] = v;
    }

    SymMatrix scaled(double s) const;
    SymMatrix operator+(const SymMatrix& o) const;
    SymMatrix operator-(const SymMatrix& o) const;
    double max_abs() const noexcept;

private:
    int n_;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

// Principal curvatures, sorted ascending.
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(std::vector<double> values);  // sorts

    std::span<const double> values() const noexcept { return values_; }
    int size() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int i) const noexcept { return values_[i]; }
    double min() const noexcept { return values_.front(); }
    double max() const noexcept { return values_.back(); }
    bool positive_definite() const noexcept { return !values_.empty() && values_.front() > 0.0; }

private:
    std::vector<double> values_;
};

struct EigenDecomposition {
    Spectrum values;
    // Row-major n*n; column k is the unit eigenvector of values[k].
    std::vector<double> vectors;
};

class AngleParams {
public:
    // theta in (0, n*pi/2), n in [kMinDim, kMaxDim].
    AngleParams(double theta, int n);

    double theta() const noexcept { return theta_; }
    int n() const noexcept { return n_; }
    // theta >= (n-1)*pi/2
    bool hyperbolic_regime() const noexcept;
    // tan(theta/n): R_theta of the identity, the umbilic threshold.
    double threshold() const noexcept;

private:
    double theta_;
    int n_;
};

// Cyclic Jacobi rotations; reconstruction error <= 1e-12 * max(1, |A|).
EigenDecomposition jacobi_eigen(const SymMatrix& a);
Spectrum eigenvalues(const SymMatrix& a);

double arctan_sum(const Spectrum& s);
double arctan_matrix(const SymMatrix& a);

// Im log Det(I + iA) with the branch fixed by continuity along t -> tA from
// t = 0. Computed from complex determinants only; cross-check for n <= 4.
double arctan_by_determinant(const SymMatrix& a);

double sl_r(const Spectrum& s, double r);
double sl_r(const SymMatrix& a, double r);
// d/dr SL_r = sum lambda / (1 + r^2 lambda^2)
double sl_r_derivative(const Spectrum& s, double r);

double r_theta(const Spectrum& s, const AngleParams& p);
double r_theta(const SymMatrix& a, const AngleParams& p);

// Tr((Id - A^2)(Id + r^2 A^2)^-1), the zeroth order coefficient of the
// linearised SL_r operator.
double zeroth_coeff(const Spectrum& s, double r);
double zeroth_coeff(const SymMatrix& a, double r);

struct ZerothSearch {
    int descent_restarts = 64;
    int descent_steps = 400;
    std::uint64_t seed = 0x5eed;
};

struct ZerothMinimum {
    double value;             // min over both searches
    double critical_value;    // best critical-point configuration
    double descent_value;     // best projected-descent result
    std::vector<double> x;    // minimiser, x_i = tan(phi_i)/r (inf allowed)
};

// Minimum of sum (1 - x_i^2)/(1 + r^2 x_i^2) subject to
// sum arctan(r x_i) = theta, x_i >= 0.
ZerothMinimum min_zeroth_coeff(const AngleParams& p, double r, const ZerothSearch& search = {});

// n sin^2(t/n) - m sin^2(t/m), 0 < n < m, t in (0, pi/2].
double sin_inequality_margin(int n, int m, double t);

// Given a2 <= a in the quadratic-form order, whether every sorted eigenvalue
// of a2 is at most the corresponding eigenvalue of a. Throws
// PreconditionError if a - a2 is not positive semidefinite.
bool eigen_monotonicity_check(const SymMatrix& a, const SymMatrix& a2);

}  // namespace slc
