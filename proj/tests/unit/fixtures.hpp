#pragma once

#include <cmath>
#include <functional>

#include "coherence/bundles.hpp"
#include "coherence/config.hpp"

namespace fixtures {

using namespace coherence;

inline double cat_lambda() { return (3.0 - std::sqrt(5.0)) / 2.0; }

inline SkewProduct nondc() { return build_system(default_config("nondc")); }
inline SkewProduct nonlui() { return build_system(default_config("nonlui")); }

/// Lift of a degree-one circle map, evaluated as t + (psi(t) - t) wrapped.
inline double lift(const MorseSmaleMap& psi, double t) {
    return t + wrap_centered(psi(wrap01(t)) - wrap01(t));
}

/// Preimage by plain bisection on the lift, independent of the library's
/// Newton-polished inverse.
inline double bisect_inverse(const MorseSmaleMap& psi, double y) {
    double lo = y - 0.5;
    double hi = y + 0.5;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (lift(psi, mid) < y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return wrap01(0.5 * (lo + hi));
}

/// gamma by naive summation on plain doubles with the bisection inverse.
inline double gamma_oracle(const TwistedEquation& eq, double theta, int terms) {
    double sum = 0.0;
    double w = 1.0;
    double t = theta;
    for (int k = 1; k <= terms; ++k) {
        t = bisect_inverse(eq.psi, t);
        sum += w * eq.v.value(t);
        w *= eq.lam;
    }
    return sum;
}

inline double central_difference(const std::function<double(double)>& f, double t, double h) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

} // namespace fixtures
