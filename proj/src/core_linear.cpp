#include "coherence/core_linear.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coherence/errors.hpp"

namespace coherence {

double wrap01(double t) {
    double r = t - std::floor(t);
    // t slightly below an integer can round up to exactly 1.0
    return r >= 1.0 ? 0.0 : r;
}

double wrap_centered(double t) {
    double r = wrap01(t);
    return r >= 0.5 ? r - 1.0 : r;
}

double circle_dist(double a, double b) {
    double r = wrap01(a - b);
    return std::min(r, 1.0 - r);
}

Point3 wrap_point(double x1, double x2, double theta) {
    return {wrap01(x1), wrap01(x2), wrap01(theta)};
}

namespace {

Vec2 unit_oriented(Vec2 v) {
    double n = norm(v);
    Vec2 u{v.x / n, v.y / n};
    if (u.x < 0.0 || (u.x == 0.0 && u.y < 0.0)) {
        u = -1.0 * u;
    }
    return u;
}

} // namespace

EigenData eigen_data(long a, long b, long c, long d) {
    const long det = a * d - b * c;
    const long trace = a + d;
    if (det != 1) {
        throw Error(ErrorKind::NotHyperbolic, "determinant is " + std::to_string(det) + ", expected 1");
    }
    if (trace <= 2) {
        // trace < -2 is hyperbolic but has negative eigenvalues; 0 < lambda < 1 is required
        throw Error(ErrorKind::NotHyperbolic,
                    "trace " + std::to_string(trace) + " does not give eigenvalues 0 < lambda < 1 < 1/lambda");
    }
    const double tr = static_cast<double>(trace);
    const double s = std::sqrt(tr * tr - 4.0);
    const double lam = 2.0 / (tr + s);
    const double big = (tr + s) / 2.0;

    // b != 0 for every hyperbolic element (b = 0 forces a = d = +-1)
    const double bd = static_cast<double>(b);
    const double ad = static_cast<double>(a);
    EigenData out;
    out.lambda = lam;
    out.e_s = unit_oriented({bd, lam - ad});
    out.e_u = unit_oriented({bd, big - ad});
    return out;
}

ToralAutomorphism::ToralAutomorphism(long a, long b, long c, long d) : a_(a), b_(b), c_(c), d_(d) {
    EigenData e = eigen_data(a, b, c, d);
    lam_ = e.lambda;
    inv_lam_ = 1.0 / e.lambda;
    e_s_ = e.e_s;
    e_u_ = e.e_u;
}

Vec2 ToralAutomorphism::to_frame(Vec2 v) const {
    const double det = e_s_.x * e_u_.y - e_s_.y * e_u_.x;
    return {(v.x * e_u_.y - v.y * e_u_.x) / det, (e_s_.x * v.y - e_s_.y * v.x) / det};
}

CirclePoint CirclePoint::from(double theta) {
    const double r = wrap01(theta);
    if (r <= 0.25) {
        return {0.0, r};
    }
    if (r < 0.75) {
        return {0.5, r - 0.5}; // exact (Sterbenz)
    }
    return {0.0, r - 1.0}; // exact (Sterbenz)
}

CirclePoint CirclePoint::normalized(double anchor, double offset) {
    if (offset >= -0.25 && offset <= 0.25) {
        return {anchor, offset};
    }
    // Offsets within (-3/4, 3/4) re-anchor exactly; anything else goes through the absolute value.
    if (offset > 0.25 && offset < 0.75) {
        double a = anchor == 0.0 ? 0.5 : 0.0;
        return normalized(a, offset - 0.5);
    }
    if (offset < -0.25 && offset > -0.75) {
        double a = anchor == 0.0 ? 0.5 : 0.0;
        return normalized(a, offset + 0.5);
    }
    return from(anchor + offset);
}

namespace {

// sin(2 pi d), cos(2 pi d) for |d| <= 1/4, folding onto |d| <= 1/8.
double sin_small(double d) {
    const double ad = std::abs(d);
    if (ad <= 0.125) {
        return std::sin(two_pi * d);
    }
    const double r = std::cos(two_pi * (0.25 - ad));
    return d < 0.0 ? -r : r;
}

double cos_small(double d) {
    const double ad = std::abs(d);
    if (ad <= 0.125) {
        return std::cos(two_pi * d);
    }
    return std::sin(two_pi * (0.25 - ad));
}

} // namespace

double sin_2pi(CirclePoint p) {
    const double s = sin_small(p.offset);
    return p.anchor == 0.0 ? s : -s;
}

double cos_2pi(CirclePoint p) {
    const double c = cos_small(p.offset);
    return p.anchor == 0.0 ? c : -c;
}

} // namespace coherence
