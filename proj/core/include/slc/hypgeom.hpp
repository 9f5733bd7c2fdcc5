#pragma once

// Hyperboloid model of H^{n+1} inside Minkowski space R^{n+1,1}.
//
// Coordinates are (x_0, x_1, ..., x_{n+1}) with <x,y> = -x_0 y_0 + sum x_i y_i.
// The totally geodesic base H^n is the slice x_{n+1} = 0; Fermi heights are
// measured along e_{n+1}.

#include <array>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "slc/symcurv.hpp"

namespace slc {

inline constexpr int kMaxAmbient = kMaxDim + 2;

class MinkVec {
public:
    MinkVec() = default;
    explicit MinkVec(int size);
    MinkVec(std::initializer_list<double> c);
    static MinkVec basis(int size, int k);

    int size() const noexcept { return size_; }
    double operator[](int i) const noexcept { return c_[i]; }
    double& operator[](int i) noexcept { return c_[i]; }

    MinkVec& operator+=(const MinkVec& o) noexcept;
    MinkVec& operator-=(const MinkVec& o) noexcept;
    MinkVec& operator*=(double s) noexcept;
    friend MinkVec operator+(MinkVec a, const MinkVec& b) noexcept { return a += b; }
    friend MinkVec operator-(MinkVec a, const MinkVec& b) noexcept { return a -= b; }
    friend MinkVec operator*(double s, MinkVec a) noexcept { return a *= s; }
    friend MinkVec operator*(MinkVec a, double s) noexcept { return a *= s; }

private:
    int size_ = 0;
    std::array<double, kMaxAmbient> c_{};
};

double minkowski_dot(const MinkVec& a, const MinkVec& b);

// A point of H^{n+1}: <v,v> = -1, v_0 > 0.
class HPoint {
public:
    // Accepts v with |<v,v> + 1| small and v_0 > 0, and renormalises.
    explicit HPoint(const MinkVec& v);
    static HPoint origin(int ambient_size);

    const MinkVec& v() const noexcept { return v_; }
    int ambient_size() const noexcept { return v_.size(); }

private:
    MinkVec v_;
};

double hyperbolic_distance(const HPoint& a, const HPoint& b);

// Unit tangent vector at a point. The direction is projected onto the tangent
// space and normalised on construction.
class UnitTangent {
public:
    UnitTangent(const HPoint& base, const MinkVec& dir);

    const HPoint& base() const noexcept { return base_; }
    const MinkVec& dir() const noexcept { return dir_; }

private:
    HPoint base_;
    MinkVec dir_;
};

HPoint exp_point(const UnitTangent& u, double t);
// Velocity of the geodesic t -> exp_point(u, t) at time t.
UnitTangent geodesic_tangent(const UnitTangent& u, double t);

// Point at signed distance `height` from the base H^n along its unit normal
// e_{n+1} at x. x must lie on the base (last coordinate 0).
HPoint fermi_embed(const HPoint& x, double height);

// Tube of radius d around the geodesic s -> cosh(s) e_0 + sinh(s) e_1.
// w is a unit vector of R^n spanned by e_2..e_{n+1} (size n).
HPoint tube_embed(double s, std::span<const double> w, double d);
double distance_to_axis(const HPoint& p);

// Evolution of principal curvatures under the unit normal flow: each
// eigenvalue solves lambda' = 1 - lambda^2.
Spectrum normal_flow_shape(const Spectrum& initial, double d);

// Second-order jet of an embedding at one parameter point: X, dX/dy_i and
// d^2X/dy_i dy_j. `outward` is any vector with positive component along the
// exterior normal; it fixes the orientation.
struct EmbeddingJet {
    MinkVec x;
    std::vector<MinkVec> d1;   // n
    std::vector<MinkVec> d2;   // n*n, row-major
    MinkVec outward;
};

struct FundamentalForms {
    int n = 0;
    SymMatrix first{kMinDim};    // I_ij = <X_i, X_j>
    SymMatrix second{kMinDim};   // II_ij = -<X_ij, N>
    // L^-1 II L^-T with I = L L^T: symmetric, similar to the shape operator I^-1 II.
    SymMatrix shape{kMinDim};
    std::vector<double> chol;        // L, row-major n*n lower triangular
    std::vector<double> christoffel; // Gamma^k_ij at [k*n*n + i*n + j]
    MinkVec normal;                  // exterior unit normal

    // I^-1 II, row-major.
    std::vector<double> shape_operator() const;
};

FundamentalForms fundamental_forms(const EmbeddingJet& jet);

// A parametrised immersion into H^{n+1}.
struct Patch {
    int dim = 0;  // n, the number of parameters
    std::function<MinkVec(std::span<const double>)> map;
    std::function<MinkVec(std::span<const double>)> outward;
};

// Central differences of the embedding with step h at parameter point `at`.
FundamentalForms fundamental_forms(const Patch& patch, std::span<const double> at, double h);

// Model patches in H^{n+1}; each is parametrised near the origin of R^n.
Patch equidistant_patch(int n, double d);  // height d over the base, Fermi chart
Patch sphere_patch(int n, double rho);     // geodesic sphere about e_0
Patch horosphere_patch(int n);             // horosphere through e_0, y = sinh(z) chart
Patch tube_patch(int n, double d);         // tube about the e_0/e_1 geodesic

}  // namespace slc
