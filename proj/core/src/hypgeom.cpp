#include "slc/hypgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slc/errors.hpp"

namespace slc {

// ------------------------------------------------------------------ MinkVec

MinkVec::MinkVec(int size) : size_(size) {
    if (size < 1 || size > kMaxAmbient) throw ConfigError("ambient dimension out of range");
}

MinkVec::MinkVec(std::initializer_list<double> c) : MinkVec(static_cast<int>(c.size())) {
    std::copy(c.begin(), c.end(), c_.begin());
}

MinkVec MinkVec::basis(int size, int k) {
    MinkVec v(size);
    v[k] = 1.0;
    return v;
}

MinkVec& MinkVec::operator+=(const MinkVec& o) noexcept {
    for (int i = 0; i < size_; ++i) c_[i] += o.c_[i];
    return *this;
}

MinkVec& MinkVec::operator-=(const MinkVec& o) noexcept {
    for (int i = 0; i < size_; ++i) c_[i] -= o.c_[i];
    return *this;
}

MinkVec& MinkVec::operator*=(double s) noexcept {
    for (int i = 0; i < size_; ++i) c_[i] *= s;
    return *this;
}

double minkowski_dot(const MinkVec& a, const MinkVec& b) {
    double s = -a[0] * b[0];
    for (int i = 1; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// ------------------------------------------------------------------- HPoint

HPoint::HPoint(const MinkVec& v) : v_(v) {
    const double q = minkowski_dot(v, v);
    if (!(q < 0.0) || !(v[0] > 0.0) || std::abs(q + 1.0) > 1e-6) {
        throw DomainError("vector is not on the upper hyperboloid (<v,v> = " + std::to_string(q) + ")");
    }
    v_ *= 1.0 / std::sqrt(-q);
}

HPoint HPoint::origin(int ambient_size) { return HPoint(MinkVec::basis(ambient_size, 0)); }

double hyperbolic_distance(const HPoint& a, const HPoint& b) {
    return std::acosh(std::max(1.0, -minkowski_dot(a.v(), b.v())));
}

UnitTangent::UnitTangent(const HPoint& base, const MinkVec& dir) : base_(base), dir_(dir) {
    if (dir.size() != base.ambient_size()) throw ConfigError("tangent dimension mismatch");
    // Project onto T_base H: v + <v, x> x.
    dir_ += minkowski_dot(dir_, base_.v()) * base_.v();
    const double q = minkowski_dot(dir_, dir_);
    if (!(q > 1e-24)) throw DomainError("zero tangent direction");
    dir_ *= 1.0 / std::sqrt(q);
}

HPoint exp_point(const UnitTangent& u, double t) {
    return HPoint(std::cosh(t) * u.base().v() + std::sinh(t) * u.dir());
}

UnitTangent geodesic_tangent(const UnitTangent& u, double t) {
    return UnitTangent(exp_point(u, t), std::sinh(t) * u.base().v() + std::cosh(t) * u.dir());
}

HPoint fermi_embed(const HPoint& x, double height) {
    const int last = x.ambient_size() - 1;
    if (std::abs(x.v()[last]) > 1e-12) throw DomainError("fermi_embed: point is not on the base H^n");
    return HPoint(std::cosh(height) * x.v() + std::sinh(height) * MinkVec::basis(x.ambient_size(), last));
}

HPoint tube_embed(double s, std::span<const double> w, double d) {
    if (!(d > 0.0)) throw DomainError("tube radius must be positive");
    const int ambient = static_cast<int>(w.size()) + 2;
    double norm = 0.0;
    for (double c : w) norm += c * c;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw DomainError("tube direction must be nonzero");
    MinkVec p(ambient);
    p[0] = std::cosh(d) * std::cosh(s);
    p[1] = std::cosh(d) * std::sinh(s);
    for (std::size_t k = 0; k < w.size(); ++k) p[int(k) + 2] = std::sinh(d) * w[k] / norm;
    return HPoint(p);
}

double distance_to_axis(const HPoint& p) {
    double q = 0.0;
    for (int i = 2; i < p.ambient_size(); ++i) q += p.v()[i] * p.v()[i];
    return std::asinh(std::sqrt(q));
}

Spectrum normal_flow_shape(const Spectrum& initial, double d) {
    if (!(d >= 0.0)) throw DomainError("normal flow distance must be non-negative");
    std::vector<double> out;
    out.reserve(initial.size());
    for (double l : initial.values()) {
        if (l == 1.0 || l == -1.0) {
            out.push_back(l);
        } else if (std::abs(l) < 1.0) {
            out.push_back(std::tanh(d + std::atanh(l)));
        } else {
            const double a = std::atanh(1.0 / l);  // arcoth
            if (l < -1.0 && d >= -a) {
                throw FlowSingularityError(
                    "principal curvature " + std::to_string(l) + " blows up at distance " +
                        std::to_string(-a),
                    -a);
            }
            out.push_back(1.0 / std::tanh(d + a));
        }
    }
    return Spectrum(std::move(out));
}

// ------------------------------------------------------ fundamental forms

std::vector<double> FundamentalForms::shape_operator() const {
    // I^-1 II = L^-T (L^-1 II L^-T) L^T
    std::vector<double> linv(n * n, 0.0);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= chol[i * n + k] * linv[k * n + c];
            linv[i * n + c] = s / chol[i * n + i];
        }
    }
    std::vector<double> out(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) s += linv[a * n + i] * shape(a, b) * chol[j * n + b];
            out[i * n + j] = s;
        }
    }
    return out;
}

FundamentalForms fundamental_forms(const EmbeddingJet& jet) {
    const int n = static_cast<int>(jet.d1.size());
    if (n < kMinDim || n > kMaxDim || static_cast<int>(jet.d2.size()) != n * n) {
        throw ConfigError("malformed embedding jet");
    }
    FundamentalForms ff;
    ff.n = n;
    ff.first = SymMatrix(n);
    ff.second = SymMatrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) ff.first.set(i, j, minkowski_dot(jet.d1[i], jet.d1[j]));

    const Spectrum metric_spec = eigenvalues(ff.first);
    if (!(metric_spec.min() > 0.0) || metric_spec.max() > 1e8 * metric_spec.min()) {
        throw NotImmersedError("not immersed: first fundamental form has condition number " +
                               std::to_string(metric_spec.max() / metric_spec.min()));
    }

    ff.chol.assign(n * n, 0.0);
    auto& L = ff.chol;
    for (int j = 0; j < n; ++j) {
        double d = ff.first(j, j);
        for (int k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
        L[j * n + j] = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = ff.first(i, j);
            for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
            L[i * n + j] = s / L[j * n + j];
        }
    }
    auto solve_metric = [&](std::vector<double> b) {
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < i; ++k) b[i] -= L[i * n + k] * b[k];
            b[i] /= L[i * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int k = i + 1; k < n; ++k) b[i] -= L[k * n + i] * b[k];
            b[i] /= L[i * n + i];
        }
        return b;
    };

    // Exterior normal: Gram-Schmidt of the orientation hint against X and the
    // tangent frame projected onto T_X H.
    const MinkVec& x = jet.x;
    std::vector<MinkVec> frame(jet.d1);
    for (auto& t : frame) t += minkowski_dot(t, x) * x;
    MinkVec nv = jet.outward;
    nv += minkowski_dot(nv, x) * x;
    {
        std::vector<double> rhs(n);
        for (int j = 0; j < n; ++j) rhs[j] = minkowski_dot(nv, frame[j]);
        const auto coef = solve_metric(rhs);
        for (int i = 0; i < n; ++i) nv -= coef[i] * frame[i];
    }
    const double nn = minkowski_dot(nv, nv);
    if (!(nn > 1e-20)) throw NotImmersedError("orientation hint is tangent to the hypersurface");
    nv *= 1.0 / std::sqrt(nn);
    ff.normal = nv;

    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) ff.second.set(i, j, -minkowski_dot(jet.d2[i * n + j], nv));

    ff.christoffel.assign(n * n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::vector<double> lowered(n);
            for (int l = 0; l < n; ++l) lowered[l] = minkowski_dot(jet.d2[i * n + j], jet.d1[l]);
            const auto raised = solve_metric(lowered);
            for (int k = 0; k < n; ++k) ff.christoffel[k * n * n + i * n + j] = raised[k];
        }
    }

    // shape = L^-1 II L^-T
    std::vector<double> tmp(n * n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            double s = ff.second(i, c);
            for (int k = 0; k < i; ++k) s -= L[i * n + k] * tmp[k * n + c];
            tmp[i * n + c] = s / L[i * n + i];
        }
    }
    ff.shape = SymMatrix(n);
    std::vector<double> full(n * n);
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < n; ++i) {
            double s = tmp[r * n + i];
            for (int k = 0; k < i; ++k) s -= L[i * n + k] * full[r * n + k];
            full[r * n + i] = s / L[i * n + i];
        }
    }
    ff.shape = SymMatrix::from_entries(n, full);
    return ff;
}

FundamentalForms fundamental_forms(const Patch& patch, std::span<const double> at, double h) {
    const int n = patch.dim;
    if (static_cast<int>(at.size()) != n) throw ConfigError("parameter point has wrong dimension");
    if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
    std::vector<double> y(at.begin(), at.end());
    auto eval = [&](int i, double si, int j, double sj) {
        std::vector<double> q = y;
        if (i >= 0) q[i] += si;
        if (j >= 0) q[j] += sj;
        return patch.map(q);
    };

    EmbeddingJet jet;
    jet.x = patch.map(y);
    jet.outward = patch.outward(y);
    jet.d1.resize(n);
    jet.d2.resize(n * n);
    for (int i = 0; i < n; ++i) {
        const MinkVec p = eval(i, h, -1, 0);
        const MinkVec m = eval(i, -h, -1, 0);
        jet.d1[i] = (1.0 / (2 * h)) * (p - m);
        jet.d2[i * n + i] = (1.0 / (h * h)) * (p - 2.0 * jet.x + m);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const MinkVec v = eval(i, h, j, h) - eval(i, h, j, -h) - eval(i, -h, j, h) + eval(i, -h, j, -h);
            jet.d2[i * n + j] = (1.0 / (4 * h * h)) * v;
            jet.d2[j * n + i] = jet.d2[i * n + j];
        }
    }
    return fundamental_forms(jet);
}

// ------------------------------------------------------------ model patches

namespace {

// Unit vector (1, y)/|(1, y)| placed in ambient coordinates first..first+|y|.
MinkVec sphere_point(int ambient, int first, std::span<const double> y) {
    MinkVec w(ambient);
    double norm = 1.0;
    for (double c : y) norm += c * c;
    norm = std::sqrt(norm);
    w[first] = 1.0 / norm;
    for (std::size_t k = 0; k < y.size(); ++k) w[first + 1 + int(k)] = y[k] / norm;
    return w;
}

}  // namespace

Patch equidistant_patch(int n, double d) {
    const int ambient = n + 2;
    auto base = [ambient, n](std::span<const double> y) {
        MinkVec x(ambient);
        double q = 1.0;
        for (int i = 0; i < n; ++i) {
            x[i + 1] = y[i];
            q += y[i] * y[i];
        }
        x[0] = std::sqrt(q);
        return x;
    };
    const MinkVec e = MinkVec::basis(ambient, ambient - 1);
    Patch p;
    p.dim = n;
    p.map = [=](std::span<const double> y) { return std::cosh(d) * base(y) + std::sinh(d) * e; };
    p.outward = [=](std::span<const double> y) { return std::sinh(d) * base(y) + std::cosh(d) * e; };
    return p;
}

Patch sphere_patch(int n, double rho) {
    const int ambient = n + 2;
    const MinkVec o = MinkVec::basis(ambient, 0);
    Patch p;
    p.dim = n;
    p.map = [=](std::span<const double> y) {
        return std::cosh(rho) * o + std::sinh(rho) * sphere_point(ambient, 1, y);
    };
    p.outward = [=](std::span<const double> y) { return sphere_point(ambient, 1, y); };
    return p;
}

Patch horosphere_patch(int n) {
    const int ambient = n + 2;
    Patch p;
    p.dim = n;
    p.map = [=](std::span<const double> z) {
        MinkVec x(ambient);
        double q = 0.0;
        for (int i = 0; i < n; ++i) {
            const double yi = std::sinh(z[i]);
            x[i + 1] = yi;
            q += yi * yi;
        }
        x[0] = 1.0 + 0.5 * q;
        x[ambient - 1] = -0.5 * q;
        return x;
    };
    // The exterior normal is X - l for the ideal centre l = e_0 - e_{n+1};
    // <-l, X - l> = 1, so -l orients it everywhere.
    p.outward = [=](std::span<const double>) {
        return MinkVec::basis(ambient, ambient - 1) - MinkVec::basis(ambient, 0);
    };
    return p;
}

Patch tube_patch(int n, double d) {
    const int ambient = n + 2;
    Patch p;
    p.dim = n;
    p.map = [=](std::span<const double> y) {
        MinkVec g(ambient);
        g[0] = std::cosh(y[0]);
        g[1] = std::sinh(y[0]);
        return std::cosh(d) * g + std::sinh(d) * sphere_point(ambient, 2, y.subspan(1));
    };
    p.outward = [=](std::span<const double> y) { return sphere_point(ambient, 2, y.subspan(1)); };
    return p;
}

}  // namespace slc
