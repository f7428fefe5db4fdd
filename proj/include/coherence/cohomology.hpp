#pragma once

#include <functional>
#include <span>
#include <vector>

#include "coherence/circle_maps.hpp"
#include "coherence/profile.hpp"

namespace coherence {

/// u(psi(theta)) - lam u(theta) = v(theta), the equation whose solutions
/// generate the invariant center and stable line fields.
struct TwistedEquation {
    MorseSmaleMap psi;
    Profile v;
    double lam;
};

struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;
    int terms_used = 0;
    bool converged = true;
};

inline constexpr int series_k_max = 5000;
inline constexpr double default_exclusion = 1e-4;

/// Number of backward terms gamma needs so that sup|v| lam^K / ((1-lam) lam) <= tol.
int gamma_term_count(const TwistedEquation& eq, double tol);

/// gamma(t) = (1/lam) sum_{k>=1} lam^k v(psi^{-k} t). Bounded, continuous,
/// C^1 off t = 1/2. Truncated a priori from sup|v|.
SeriesResult gamma(const TwistedEquation& eq, CirclePoint theta, double tol);
inline SeriesResult gamma(const TwistedEquation& eq, double theta, double tol) {
    return gamma(eq, CirclePoint::from(theta), tol);
}

/// gamma on many points at once: orbits in parallel, the weighted reduction on
/// the SIMD kernel. Bitwise equal to calling gamma() per point.
std::vector<double> gamma_batch(const TwistedEquation& eq, std::span<const double> thetas, double tol);

/// beta(t) = -(1/lam) sum_{k>=0} lam^{-k} v(psi^k t), defined off t = 0 when
/// v(1/2) = 0. Truncated once five consecutive term ratios are below 1 and
/// the geometric tail built from them is <= tol.
/// Throws TooCloseToSingularity (d(t,0) <= eta) or NoDecay.
SeriesResult beta(const TwistedEquation& eq, CirclePoint theta, double tol, double eta = default_exclusion);
inline SeriesResult beta(const TwistedEquation& eq, double theta, double tol, double eta = default_exclusion) {
    return beta(eq, CirclePoint::from(theta), tol, eta);
}

/// alpha = gamma - beta, solving u o psi = lam u.
SeriesResult alpha(const TwistedEquation& eq, CirclePoint theta, double tol, double eta = default_exclusion);
inline SeriesResult alpha(const TwistedEquation& eq, double theta, double tol, double eta = default_exclusion) {
    return alpha(eq, CirclePoint::from(theta), tol, eta);
}

/// gamma'(t) = (1/lam) sum_{k>=1} lam^k v'(psi^{-k} t) (psi^{-k})'(t).
/// At t = 0 returns the fixed-point value v'(0) / (mu - lam).
SeriesResult gamma_prime(const TwistedEquation& eq, CirclePoint theta, double tol,
                         double eta_half = default_exclusion);
inline SeriesResult gamma_prime(const TwistedEquation& eq, double theta, double tol,
                                double eta_half = default_exclusion) {
    return gamma_prime(eq, CirclePoint::from(theta), tol, eta_half);
}

/// beta'(t) = -(1/lam) sum_{k>=0} lam^{-k} v'(psi^k t) (psi^k)'(t).
/// At t = 1/2 returns the fixed-point value v'(1/2) / (sigma - lam).
SeriesResult beta_prime(const TwistedEquation& eq, CirclePoint theta, double tol,
                        double eta_zero = default_exclusion);
inline SeriesResult beta_prime(const TwistedEquation& eq, double theta, double tol,
                               double eta_zero = default_exclusion) {
    return beta_prime(eq, CirclePoint::from(theta), tol, eta_zero);
}

SeriesResult alpha_prime(const TwistedEquation& eq, CirclePoint theta, double tol,
                         double eta_half = default_exclusion, double eta_zero = default_exclusion);
inline SeriesResult alpha_prime(const TwistedEquation& eq, double theta, double tol,
                                double eta_half = default_exclusion, double eta_zero = default_exclusion) {
    return alpha_prime(eq, CirclePoint::from(theta), tol, eta_half, eta_zero);
}

/// |u(psi t) - lam u(t) - v(t)|.
double residual_twisted(const std::function<double(double)>& u, const TwistedEquation& eq, double theta);
/// Same, with psi(t) kept in the anchored representation. Near 0 from the left
/// a plain double cannot hold psi(t) to relative precision.
double residual_twisted(const std::function<double(CirclePoint)>& u, const TwistedEquation& eq, CirclePoint theta);

/// Geometric tail estimate from the last five term ratios.
class RatioTail {
public:
    void push(double abs_term);
    /// Estimate of sum_{j>k} |t_j| once the window holds five ratios all < 1.
    bool estimate(double& out) const;

private:
    double window_[6] = {};
    int count_ = 0;
};

} // namespace coherence
