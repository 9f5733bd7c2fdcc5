#include "slc/symcurv.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "slc/errors.hpp"

namespace slc {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dim(int n) {
    if (n < kMinDim || n > kMaxDim) {
        throw ConfigError("dimension " + std::to_string(n) + " outside supported range [" +
                          std::to_string(kMinDim) + "," + std::to_string(kMaxDim) + "]");
    }
}

}  // namespace

// ---------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(int n) : n_(n) { check_dim(n); }

SymMatrix SymMatrix::from_entries(int n, std::span<const double> row_major) {
    if (row_major.size() != static_cast<std::size_t>(n * n)) {
        throw ConfigError("expected " + std::to_string(n * n) + " matrix entries, got " +
                          std::to_string(row_major.size()));
    }
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            m.set(i, j, 0.5 * (row_major[i * n + j] + row_major[j * n + i]));
        }
    }
    return m;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    std::vector<double> flat;
    flat.reserve(rows.size() * rows.size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n) throw ConfigError("matrix rows must be square");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return from_entries(n, flat);
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m.set(int(i), int(i), d[i]);
    return m;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
}

SymMatrix SymMatrix::conjugated(std::span<const double> d, std::span<const double> q) {
    const int n = static_cast<int>(d.size());
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += q[i * n + k] * d[k] * q[j * n + k];
            m.set(i, j, s);
        }
    }
    return m;
}

SymMatrix SymMatrix::scaled(double s) const {
    SymMatrix m(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) m.set(i, j, s * (*this)(i, j));
    return m;
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
    if (o.n_ != n_) throw ConfigError("dimension mismatch in matrix sum");
    SymMatrix m(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) m.set(i, j, (*this)(i, j) + o(i, j));
    return m;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return *this + o.scaled(-1.0); }

double SymMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
}

// -------------------------------------------------------------- AngleParams

AngleParams::AngleParams(double theta, int n) : theta_(theta), n_(n) {
    check_dim(n);
    if (!(theta > 0.0 && theta < n * kPi / 2)) {
        throw DomainError("theta = " + std::to_string(theta) + " outside (0, n*pi/2) for n = " +
                          std::to_string(n));
    }
}

bool AngleParams::hyperbolic_regime() const noexcept { return theta_ >= (n_ - 1) * kPi / 2; }

double AngleParams::threshold() const noexcept { return std::tan(theta_ / n_); }

// ------------------------------------------------------------------- Jacobi

EigenDecomposition jacobi_eigen(const SymMatrix& a) {
    const int n = a.dim();
    std::vector<double> m(n * n), v(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        v[i * n + i] = 1.0;
        for (int j = 0; j < n; ++j) m[i * n + j] = a(i, j);
    }

    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += m[i * n + j] * m[i * n + j];
        return s;
    };
    double scale = 0.0;
    for (double x : m) scale += x * x;

    for (int sweep = 0; sweep < 100; ++sweep) {
        const double off = off_norm();
        if (off == 0.0 || off <= 1e-36 * scale) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m[p * n + q];
                if (apq == 0.0) continue;
                const double app = m[p * n + p];
                const double aqq = m[q * n + q];
                // Rotation angle zeroing m[p][q]; stable form of tan(phi).
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m[k * n + p];
                    const double mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m[p * n + k];
                    const double mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return m[x * n + x] < m[y * n + y]; });
    std::vector<double> vals(n), vecs(n * n);
    for (int k = 0; k < n; ++k) {
        vals[k] = m[order[k] * n + order[k]];
        for (int i = 0; i < n; ++i) vecs[i * n + k] = v[i * n + order[k]];
    }
    return {Spectrum(std::move(vals)), std::move(vecs)};
}

Spectrum eigenvalues(const SymMatrix& a) { return jacobi_eigen(a).values; }

// ----------------------------------------------------------- ArcTan and SL_r

double arctan_sum(const Spectrum& s) {
    double acc = 0.0;
    for (double l : s.values()) acc += std::atan(l);
    return acc;
}

double arctan_matrix(const SymMatrix& a) { return arctan_sum(eigenvalues(a)); }

namespace {

std::complex<double> det_identity_plus_i(const SymMatrix& a, double t) {
    const int n = a.dim();
    std::vector<std::complex<double>> m(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[i * n + j] = std::complex<double>(i == j ? 1.0 : 0.0, t * a(i, j));
    std::complex<double> det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(m[c * n + k], m[piv * n + k]);
            det = -det;
        }
        const auto d = m[c * n + c];
        det *= d;
        for (int r = c + 1; r < n; ++r) {
            const auto f = m[r * n + c] / d;
            for (int k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
        }
    }
    return det;
}

double tracked_arg(const SymMatrix& a, double t0, std::complex<double> d0, double t1,
                   std::complex<double> d1, int depth) {
    const double step = std::arg(d1 / d0);
    if (std::abs(step) < 0.25 || depth > 40) return step;
    const double tm = 0.5 * (t0 + t1);
    const auto dm = det_identity_plus_i(a, tm);
    return tracked_arg(a, t0, d0, tm, dm, depth + 1) + tracked_arg(a, tm, dm, t1, d1, depth + 1);
}

}  // namespace

double arctan_by_determinant(const SymMatrix& a) {
    if (a.dim() > 4) throw ConfigError("determinant cross-check supports n <= 4");
    constexpr int kSteps = 64;
    double total = 0.0;
    auto prev = det_identity_plus_i(a, 0.0);
    for (int k = 1; k <= kSteps; ++k) {
        const double t0 = double(k - 1) / kSteps;
        const double t1 = double(k) / kSteps;
        const auto cur = det_identity_plus_i(a, t1);
        total += tracked_arg(a, t0, prev, t1, cur, 0);
        prev = cur;
    }
    return total;
}

double sl_r(const Spectrum& s, double r) {
    if (!(r > 0.0)) throw DomainError("SL_r requires r > 0, got " + std::to_string(r));
    double acc = 0.0;
    for (double l : s.values()) acc += std::atan(r * l);
    return acc;
}

double sl_r(const SymMatrix& a, double r) { return sl_r(eigenvalues(a), r); }

double sl_r_derivative(const Spectrum& s, double r) {
    double acc = 0.0;
    for (double l : s.values()) acc += l / (1.0 + r * r * l * l);
    return acc;
}

double r_theta(const Spectrum& s, const AngleParams& p) {
    if (s.size() != p.n()) {
        throw ConfigError("spectrum of size " + std::to_string(s.size()) +
                          " does not match n = " + std::to_string(p.n()));
    }
    if (!s.positive_definite()) {
        throw NotConvexError("not strictly convex: smallest principal curvature " +
                             std::to_string(s.min()));
    }
    const double theta = p.theta();
    const int n = p.n();

    double hi = n * std::tan(theta / n) / s.max();
    while (sl_r(s, hi) < theta) hi *= 2.0;
    double lo = std::min(hi, 1.0) * 1e-3;
    while (sl_r(s, lo) >= theta) lo *= 0.5;

    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (sl_r(s, mid) < theta ? lo : hi) = mid;
    }
    double r = 0.5 * (lo + hi);
    for (int i = 0; i < 5; ++i) {
        const double f = sl_r(s, r) - theta;
        const double df = sl_r_derivative(s, r);
        if (f == 0.0 || df <= 0.0) break;
        const double next = r - f / df;
        if (!(next > 0.0) || std::abs(next - r) > (hi - lo) + 1e-300 + 1e-12 * r) break;
        r = next;
    }
    return r;
}

double r_theta(const SymMatrix& a, const AngleParams& p) { return r_theta(eigenvalues(a), p); }

double zeroth_coeff(const Spectrum& s, double r) {
    if (!(r > 0.0)) throw DomainError("zeroth_coeff requires r > 0");
    double acc = 0.0;
    for (double l : s.values()) acc += (1.0 - l * l) / (1.0 + r * r * l * l);
    return acc;
}

double zeroth_coeff(const SymMatrix& a, double r) { return zeroth_coeff(eigenvalues(a), r); }

// ------------------------------------------------------- min_zeroth_coeff

namespace {

// With phi_i = arctan(r x_i), each summand equals (1 + r^-2) cos^2(phi_i) - r^-2,
// so the problem reduces to minimising sum cos^2(phi_i) over the capped simplex
// { sum phi_i = theta, 0 <= phi_i <= pi/2 }.
double cos2_sum(std::span<const double> phi) {
    double s = 0.0;
    for (double f : phi) s += std::cos(f) * std::cos(f);
    return s;
}

// Euclidean projection onto the capped simplex.
void project_capped(std::vector<double>& y, double total) {
    const double cap = kPi / 2;
    double lo = -cap - *std::max_element(y.begin(), y.end());
    double hi = cap + *std::max_element(y.begin(), y.end());
    lo = std::min(lo, *std::min_element(y.begin(), y.end()) - cap);
    auto mass = [&](double tau) {
        double s = 0.0;
        for (double v : y) s += std::clamp(v - tau, 0.0, cap);
        return s;
    };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mass(mid) > total ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    for (double& v : y) v = std::clamp(v - tau, 0.0, cap);
}

}  // namespace

ZerothMinimum min_zeroth_coeff(const AngleParams& p, double r, const ZerothSearch& search) {
    const int n = p.n();
    const double theta = p.theta();
    if (!p.hyperbolic_regime()) {
        throw DomainError("min_zeroth_coeff requires theta >= (n-1)pi/2");
    }
    if (!(r >= p.threshold() * (1.0 - 1e-12))) {
        throw DomainError("min_zeroth_coeff requires r >= tan(theta/n)");
    }
    const double inv_r2 = 1.0 / (r * r);
    auto value_of = [&](double c2) { return (1.0 + inv_r2) * c2 - n * inv_r2; };

    // Critical configurations: every phi_i in {0, eta, pi/2 - eta, pi/2}.
    double best_c2 = std::numeric_limits<double>::infinity();
    std::vector<double> best_phi;
    for (int a = 0; a <= n; ++a) {            // at pi/2
        for (int z = 0; a + z <= n; ++z) {    // at 0
            for (int k = 0; a + z + k <= n; ++k) {  // at eta
                const int m = n - a - z - k;        // at pi/2 - eta
                const double rhs = theta - (a + m) * kPi / 2;
                std::vector<double> etas;
                if (k != m) {
                    etas.push_back(rhs / (k - m));
                } else if (std::abs(rhs) <= 1e-14) {
                    // Degenerate: eta free. Sample it densely.
                    for (int g = 0; g <= 512; ++g) etas.push_back(g * (kPi / 2) / 512);
                }
                for (double eta : etas) {
                    if (eta < -1e-14 || eta > kPi / 2 + 1e-14) continue;
                    eta = std::clamp(eta, 0.0, kPi / 2);
                    std::vector<double> phi;
                    phi.insert(phi.end(), a, kPi / 2);
                    phi.insert(phi.end(), z, 0.0);
                    phi.insert(phi.end(), k, eta);
                    phi.insert(phi.end(), m, kPi / 2 - eta);
                    const double sum = std::accumulate(phi.begin(), phi.end(), 0.0);
                    if (std::abs(sum - theta) > 1e-12) continue;
                    const double c2 = cos2_sum(phi);
                    if (c2 < best_c2) {
                        best_c2 = c2;
                        best_phi = phi;
                    }
                }
            }
        }
    }

    // Independent check: projected gradient descent with random restarts.
    std::mt19937_64 rng(search.seed);
    std::uniform_real_distribution<double> unif(0.0, kPi / 2);
    double best_desc = std::numeric_limits<double>::infinity();
    std::vector<double> best_desc_phi;
    for (int restart = 0; restart < search.descent_restarts; ++restart) {
        std::vector<double> phi(n);
        for (double& f : phi) f = unif(rng);
        project_capped(phi, theta);
        double step = 0.2;
        double cur = cos2_sum(phi);
        for (int it = 0; it < search.descent_steps; ++it) {
            std::vector<double> trial = phi;
            for (int i = 0; i < n; ++i) trial[i] += step * std::sin(2.0 * phi[i]);
            project_capped(trial, theta);
            const double val = cos2_sum(trial);
            if (val < cur) {
                phi = std::move(trial);
                cur = val;
                step *= 1.2;
            } else {
                step *= 0.5;
                if (step < 1e-15) break;
            }
        }
        if (cur < best_desc) {
            best_desc = cur;
            best_desc_phi = phi;
        }
    }

    ZerothMinimum out;
    out.critical_value = value_of(best_c2);
    out.descent_value = value_of(best_desc);
    const bool crit_wins = best_c2 <= best_desc;
    out.value = crit_wins ? out.critical_value : out.descent_value;
    for (double f : crit_wins ? best_phi : best_desc_phi) {
        out.x.push_back(f >= kPi / 2 ? std::numeric_limits<double>::infinity() : std::tan(f) / r);
    }
    return out;
}

double sin_inequality_margin(int n, int m, double t) {
    if (!(0 < n && n < m)) {
        throw DomainError("sin_inequality_margin requires 0 < n < m, got n = " +
                          std::to_string(n) + ", m = " + std::to_string(m));
    }
    if (!(t > 0.0 && t <= kPi / 2)) throw DomainError("sin_inequality_margin requires t in (0, pi/2]");
    const double a = std::sin(t / n);
    const double b = std::sin(t / m);
    return n * a * a - m * b * b;
}

bool eigen_monotonicity_check(const SymMatrix& a, const SymMatrix& a2) {
    if (a.dim() != a2.dim()) throw ConfigError("dimension mismatch");
    const Spectrum gap = eigenvalues(a - a2);
    if (gap.min() < -1e-12) {
        throw PreconditionError("order hypothesis A2 <= A violated: A - A2 has eigenvalue " +
                                std::to_string(gap.min()) + " (A2 exceeds A in some direction)");
    }
    const Spectrum la = eigenvalues(a);
    const Spectrum lb = eigenvalues(a2);
    for (int k = 0; k < la.size(); ++k) {
        if (lb[k] > la[k] + kCompareTol) return false;
    }
    return true;
}

}  // namespace slc
