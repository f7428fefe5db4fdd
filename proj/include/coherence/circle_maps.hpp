#pragma once

#include <vector>

#include "coherence/core_linear.hpp"

namespace coherence {

enum class MapFamily { Sine, PiecewiseSymmetric };

/// Cubic Hermite piece joining the two affine germs on [x0, x1] in (0, 1/2).
struct HermitePiece {
    double x0, x1;
    double y0, y1;
    double m0, m1;

    double value(double x) const;
    double slope(double x) const;
};

/// North pole / south pole degree-one circle map with fixed points 0 (source,
/// multiplier mu > 1) and 1/2 (sink, multiplier sigma < 1).
class MorseSmaleMap {
public:
    /// psi(t) = t + kappa sin(2 pi t). Checks 0 < kappa < 1/(2 pi) only.
    static MorseSmaleMap sine(double kappa);

    /// Slope sigma on [1/2 - delta_half, 1/2 + delta_half], slope mu on
    /// [-delta_zero, delta_zero], monotone cubic Hermite in between, and
    /// psi(1 - t) = 1 - psi(t). Checks structure only (0 < sigma < 1 < mu).
    static MorseSmaleMap symmetric(double sigma, double mu, double delta_half, double delta_zero);

    MapFamily family() const { return family_; }
    double mu() const { return mu_; }
    double sigma() const { return sigma_; }
    double kappa() const { return kappa_; }
    double delta_half() const { return delta_half_; }
    double delta_zero() const { return delta_zero_; }
    const HermitePiece& hermite() const { return hermite_; }
    /// Sup of psi' over the circle (sampled for the symmetric family).
    double max_derivative() const { return max_deriv_; }

    double operator()(double theta) const { return step(CirclePoint::from(theta)).value(); }
    double deriv(double theta) const { return deriv(CirclePoint::from(theta)); }
    /// Preimage of theta; throws NoConvergence if |psi(result) - theta| >= tol.
    double invert(double theta, double tol = 1e-14) const {
        return step_back(CirclePoint::from(theta), tol).value();
    }

    CirclePoint step(CirclePoint p) const;
    double deriv(CirclePoint p) const;
    CirclePoint step_back(CirclePoint p, double tol = 1e-14) const;

    /// psi(anchor + delta) - anchor for the lift, any real delta.
    double lift_offset(double anchor, double delta) const;
    double lift_deriv(double anchor, double delta) const;

private:
    MorseSmaleMap() = default;
    double eval_unit(double r) const; // symmetric family, r in [0,1)
    double deriv_unit(double r) const;

    MapFamily family_ = MapFamily::Sine;
    double mu_ = 1.0;
    double sigma_ = 1.0;
    double kappa_ = 0.0;
    double delta_half_ = 0.0;
    double delta_zero_ = 0.0;
    HermitePiece hermite_{};
    double max_deriv_ = 1.0;
};

/// Throws ConditionViolated naming the first failed link of sigma < lam < 1 < mu < 1/lam.
void check_ph_inequalities(double sigma, double mu, double lam);

MorseSmaleMap make_sine_map(double kappa, double lam);
MorseSmaleMap make_symmetric_map(double sigma, double mu, double lam, double delta_half, double delta_zero);

enum class Direction { Forward, Backward };

struct OrbitSegment {
    double base = 0.0;
    Direction direction = Direction::Forward;
    int length = 0;
    std::vector<double> points;          // length + 1 entries, points[0] = base
    std::vector<double> cocycle;         // (psi^{+-i})'(base)
    std::vector<CirclePoint> anchored;   // same orbit, anchored representation
};

OrbitSegment orbit(const MorseSmaleMap& psi, double theta, int k, Direction direction);
OrbitSegment orbit(const MorseSmaleMap& psi, CirclePoint start, int k, Direction direction);

struct ComparisonConstants {
    double c0_deriv;
    double c0_dist;
    double c0; // min of the two
};

/// Empirical c0 for the linearization bounds near the fixed points: the
/// largest c with c <= ratio <= 1/c over the sampled windows
/// |theta - 1/2| <= eps0 (forward) and |theta| <= eps0 (backward), k <= k_max.
/// Throws SampleDegenerate on non-finite ratios or c0 < 1e-6.
ComparisonConstants comparison_constants(const MorseSmaleMap& psi, double eps0, int sample_size,
                                         int k_max = 60);

} // namespace coherence
