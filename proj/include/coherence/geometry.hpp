#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coherence/bundles.hpp"

namespace coherence {

/// h(x, t) = x - gamma(t) e_s mod 1, with h o f = A o h.
Vec2 semiconjugacy(const SkewProduct& f, const Point3& p, double tol = 1e-12);

/// Torus distance between h(f(p)) and A h(p).
double semiconjugacy_residual(const SkewProduct& f, const Point3& p, double tol = 1e-12);

enum class CurveKind { CenterFiber, CenterOde, StrongStable };
std::string_view to_string(CurveKind k);

/// A curve inside the cs-cylinder {x0 + s e_s} x S^1, stored in the lift:
/// x1, x2 and theta are unwrapped reals, s_displacement is the e_s offset from
/// the base point.
struct CurveSample {
    CurveKind kind = CurveKind::CenterFiber;
    Point3 base;
    double theta_lo = 0.0;
    double theta_hi = 0.0;
    double step = 0.0;
    std::vector<Point3> points;
    std::vector<double> s_displacement;
    bool entered_singular_band = false;
};

/// Fiber of h through p0: (x0 + (gamma(t) - gamma(t0)) e_s, t) at n equispaced t.
CurveSample center_fiber(const SkewProduct& f, const Point3& p0, double theta_lo, double theta_hi, int n,
                         double tol = 1e-12);

/// RK4 in arclength along the unit center field (gamma' e_s + d/dtheta)/norm.
/// A negative arclen integrates toward decreasing theta. Stops early, with
/// entered_singular_band set, when a stage would fall within eta_half of 1/2.
CurveSample integrate_center(const SkewProduct& f, const Point3& p0, double arclen, double step,
                             double eta_half = default_exclusion, double tol = 1e-12);

/// max_k |s_k - (gamma(t_k) - gamma(t_0))| over an integrated center curve.
double fiber_deviation(const SkewProduct& f, const CurveSample& ode, double tol = 1e-12);

/// Strong stable curve (x0 + (beta(t) - beta(t0)) e_s, t) at the given t
/// values (lifted, any order).
CurveSample strong_stable_curve(const SkewProduct& f, const Point3& p0, const std::vector<double>& thetas,
                                double eta_zero = default_exclusion, double tol = 1e-12);
/// Same at n equispaced t in [theta_lo, theta_hi].
CurveSample strong_stable_curve(const SkewProduct& f, const Point3& p0, double theta_lo, double theta_hi, int n,
                                double eta_zero = default_exclusion, double tol = 1e-12);

/// Largest angle between curve secants and the field direction at their
/// midpoints (center field for center curves, stable field otherwise).
double secant_tangency_error(const SkewProduct& f, const CurveSample& curve, const DirectionSettings& s = {});

enum class WitnessVerdict { NonDynamicallyCoherent, CoherentCandidate };
std::string_view to_string(WitnessVerdict v);

struct WitnessSample {
    double theta;
    double gamma_prime;
};

struct WitnessReport {
    std::string example;
    SignPattern sign_lower = SignPattern::Zero; // gamma' on (0, 1/2)
    SignPattern sign_upper = SignPattern::Zero; // gamma' on (1/2, 1)
    WitnessVerdict verdict = WitnessVerdict::CoherentCandidate;
    std::vector<WitnessSample> samples;
    int discarded = 0;
};

struct WitnessSettings {
    int j_lo = 4;
    int j_hi = 12;
    int random_per_side = 100;
    /// Multiplies every sampling offset; 0.5 reruns the witness closer to 1/2.
    double offset_scale = 1.0;
    std::uint64_t seed = 20240601;
    double tol = 1e-12;
    double eta_half = default_exclusion;
};

/// Samples gamma' at 1/2 +- 2^-j and at random offsets 2^-j_hi <= d <= 2^-j_lo
/// on each side of 1/2, where the center field's behavior decides
/// integrability. Samples with |gamma'| < 1e-12 are discarded.
/// Throws InconsistentSigns when a side has mixed or no retained signs.
WitnessReport nonintegrability_witness(const SkewProduct& f, const std::string& example,
                                       const WitnessSettings& s = {});

enum class BlowupWhich { GammaPrimeAtHalf, BetaPrimeAtZero };
std::string_view to_string(BlowupWhich w);

struct ExponentFit {
    BlowupWhich which = BlowupWhich::GammaPrimeAtHalf;
    std::vector<int> j_values;
    std::vector<double> offsets;
    std::vector<double> log_distance;
    std::vector<double> log_value;
    double slope = 0.0;     // least squares slope of log|value| against -log d
    double intercept = 0.0;
    double predicted = 0.0; // 1 - log lam / log sigma, or 1 - log lam / log mu
    double relative_deviation = 0.0;
};

/// 1 - log lam / log sigma and 1 - log lam / log mu.
double predicted_rho(const SkewProduct& f);
double predicted_a(const SkewProduct& f);

/// Least squares fit of the blow-up rate at dyadic offsets 2^-j, j in
/// [j_lo, j_hi], keeping only offsets outside the exclusion band.
/// Throws DegenerateFit with fewer than 8 admissible points or a zero sample.
ExponentFit blowup_fit(const SkewProduct& f, BlowupWhich which, int j_lo = 6, int j_hi = 16,
                       double eta = default_exclusion, double tol = 1e-13);

struct PositivityConstants {
    double theta0 = 0.0;     // left end of the fundamental domain [theta0, psi^-1(theta0)]
    double theta_star = 0.75;
    double domain_hi = 0.0;  // psi^-1(theta0)
    double c1 = 0.0;         // min v' on [1/2, theta0]
    double c2 = 0.0;         // max |v'| on [theta0, 1]
    double c3 = 0.0;         // max psi' on the fundamental domain
    double ratio = 0.0;      // sigma / lam
    double lam = 0.0;
};

struct PositivityResult {
    PositivityConstants constants;
    double lhs = 0.0;
    int n_used = 0;
    bool verdict = false;
    double limit = 0.0;      // lhs as N -> infinity
};

/// C1 (1 - r^(N+1)) / (1 - r) - C2 C3 / (1 - lam).
double positivity_lhs(const PositivityConstants& c, int n);

/// Smallest N <= n_max with a positive left side. Throws ConditionFails with
/// the limiting value when there is none.
PositivityResult positivity_condition(const PositivityConstants& c, int n_max = 1000);

/// Constants from sampling v' and psi' for the given theta0.
PositivityConstants positivity_constants(const SkewProduct& f, double theta0, double theta_star = 0.75,
                                         int samples = 2000);

/// Scans theta0 over [psi(theta_star), theta_star) for the largest limiting
/// value and evaluates the condition there.
PositivityResult positivity_condition(const SkewProduct& f, double theta_star = 0.75, int n_max = 1000,
                                      int scan = 200);

struct AttractorRecord {
    double theta0 = 0.0;
    std::vector<double> distance; // d(theta_k, 1/2), k = 0..recorded
    int first_below = -1;         // first k with distance < threshold
    double threshold = 1e-6;
    double late_ratio = 0.0;      // geometric mean step ratio over the last window
    int late_window = 0;
};

/// Iterates f from p0 and records the distance to the attracting torus.
/// Recording stops early once the distance drops below 1e-280, so the late
/// ratio is never taken from subnormal values.
AttractorRecord attractor_probe(const SkewProduct& f, const Point3& p0, int n_iter, double threshold = 1e-6,
                                int late_window = 50);

/// n_curves strong stable curves in the cs-leaf through `anchor`, based at
/// anchor + i * spacing * e_s. Theta samples are n equispaced points of
/// [theta_lo, theta_hi] merged with the dyadic points 2^-j and 1 - 2^-j
/// inside it, so both approaches to the theta = 0 torus are resolved.
std::vector<CurveSample> reeb_strip_sample(const SkewProduct& f, const Point3& anchor, int n_curves,
                                           double theta_lo, double theta_hi, int n = 200, double spacing = 0.1,
                                           double eta_zero = default_exclusion, double tol = 1e-12);

} // namespace coherence
