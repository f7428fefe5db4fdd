#pragma once

#include <array>
#include <cmath>

namespace coherence {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Reduce a real number into [0,1).
double wrap01(double t);

/// Signed representative of t modulo 1 in [-1/2, 1/2).
double wrap_centered(double t);

/// Distance on R/Z: min over integers n of |a - b + n|, in [0, 1/2].
double circle_dist(double a, double b);

/// A point of T^2 x S^1. Coordinates are kept in [0,1).
struct Point3 {
    double x1 = 0.0;
    double x2 = 0.0;
    double theta = 0.0;

    Vec2 x() const { return {x1, x2}; }
    friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

Point3 wrap_point(double x1, double x2, double theta);

/// Tangent vector at a point of T^2 x S^1: toral part plus circle part.
struct Tangent3 {
    Vec2 v;
    double t = 0.0;
};

/// Hyperbolic element of SL(2,Z) with positive eigenvalues lam < 1 < 1/lam.
class ToralAutomorphism {
public:
    /// Throws NotHyperbolic unless ad - bc = 1 and a + d > 2.
    ToralAutomorphism(long a, long b, long c, long d);

    static ToralAutomorphism cat_map() { return {2, 1, 1, 1}; }

    std::array<long, 4> entries() const { return {a_, b_, c_, d_}; }
    double lambda() const { return lam_; }
    double inv_lambda() const { return inv_lam_; }
    Vec2 e_s() const { return e_s_; }
    Vec2 e_u() const { return e_u_; }

    Vec2 apply(Vec2 v) const {
        return {static_cast<double>(a_) * v.x + static_cast<double>(b_) * v.y,
                static_cast<double>(c_) * v.x + static_cast<double>(d_) * v.y};
    }

    /// Coordinates (s, u) of v in the (e_s, e_u) frame.
    Vec2 to_frame(Vec2 v) const;
    Vec2 from_frame(double s, double u) const { return s * e_s_ + u * e_u_; }

private:
    long a_, b_, c_, d_;
    double lam_;
    double inv_lam_;
    Vec2 e_s_;
    Vec2 e_u_;
};

struct EigenData {
    double lambda;
    Vec2 e_s;
    Vec2 e_u;
};

/// Stable eigenvalue and unit eigenvectors of [[a,b],[c,d]]. e_s and e_u are
/// oriented with positive first component (positive second when the first is 0).
EigenData eigen_data(long a, long b, long c, long d);

/// A circle point stored as an offset from the nearest fixed point of the
/// north-south maps (anchor 0 or 1/2). Orbits that converge to a fixed point
/// keep full relative precision in their distance to it.
struct CirclePoint {
    double anchor = 0.0; // 0.0 or 0.5
    double offset = 0.0; // in [-1/4, 1/4]

    static CirclePoint from(double theta);
    /// Re-anchor an arbitrary real offset from the given anchor.
    static CirclePoint normalized(double anchor, double offset);

    double value() const { return wrap01(anchor + offset); }
    double dist_to_zero() const { return anchor == 0.0 ? std::abs(offset) : 0.5 - std::abs(offset); }
    double dist_to_half() const { return anchor == 0.5 ? std::abs(offset) : 0.5 - std::abs(offset); }
    bool is_fixed() const { return offset == 0.0; }
};

/// sin(2 pi theta), cos(2 pi theta) through the anchored reduction, exact at
/// multiples of 1/4 and relatively accurate near them.
double sin_2pi(CirclePoint p);
double cos_2pi(CirclePoint p);
inline double sin_2pi(double theta) { return sin_2pi(CirclePoint::from(theta)); }
inline double cos_2pi(double theta) { return cos_2pi(CirclePoint::from(theta)); }

inline constexpr double two_pi = 6.283185307179586476925286766559;

} // namespace coherence
