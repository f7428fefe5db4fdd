#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coherence/circle_maps.hpp"
#include "coherence/cohomology.hpp"
#include "coherence/core_linear.hpp"
#include "coherence/errors.hpp"
#include "coherence/profile.hpp"

namespace coherence {

/// f(x, t) = (A x + v(t) e_s, psi(t)) on T^2 x S^1.
class SkewProduct {
public:
    /// Throws ConditionViolated unless sigma < lam < 1 < mu < 1/lam, when enforced.
    SkewProduct(ToralAutomorphism a, MorseSmaleMap psi, Profile v, bool enforce_inequalities = true);

    const ToralAutomorphism& matrix() const { return a_; }
    const MorseSmaleMap& psi() const { return eq_.psi; }
    const Profile& profile() const { return eq_.v; }
    const TwistedEquation& equation() const { return eq_; }
    double lambda() const { return eq_.lam; }
    Vec2 e_s() const { return a_.e_s(); }
    Vec2 e_u() const { return a_.e_u(); }

    Point3 apply(const Point3& p) const;
    /// (A w + t v'(theta) e_s, t psi'(theta)).
    Tangent3 differential(const Point3& p, const Tangent3& w) const;

private:
    ToralAutomorphism a_;
    TwistedEquation eq_;
};

enum class Field { Stable, Center, Unstable };
std::string_view to_string(Field f);

/// A line in the tangent space, in frame coordinates s e_s + u e_u + t d/dtheta.
/// Center and stable lines have u = 0, so (s, t) is the projective pair with
/// slope s/t (infinite for the horizontal line E^s_A x {0}).
/// Normalized to unit length with t >= 0, then u >= 0, then s >= 0.
struct LineDirection {
    double s = 0.0;
    double u = 0.0;
    double t = 1.0;

    static LineDirection from_frame(double s, double u, double t);
    static LineDirection graph(double slope) { return from_frame(slope, 0.0, 1.0); }
    static LineDirection horizontal() { return {1.0, 0.0, 0.0}; }
    double slope() const;
    Tangent3 ambient(const ToralAutomorphism& a) const;
};

/// Angle in [0, pi/2] between two lines.
double line_angle(const LineDirection& a, const LineDirection& b);

struct DirectionSettings {
    double tol = 1e-12;
    double eta_half = default_exclusion;
    double eta_zero = default_exclusion;
};

/// span(gamma'(t) e_s, 1) off the eta_half band, span(e_s, 0) inside it.
LineDirection center_direction(const SkewProduct& f, CirclePoint theta, const DirectionSettings& s = {});
/// span(beta'(t) e_s, 1) off the eta_zero band (closed form at t = 1/2),
/// span(e_s, 0) inside it.
LineDirection stable_direction(const SkewProduct& f, CirclePoint theta, const DirectionSettings& s = {});
LineDirection unstable_direction(const SkewProduct& f);
LineDirection field_direction(const SkewProduct& f, Field field, CirclePoint theta, const DirectionSettings& s = {});

/// True when theta and psi(theta) are both off the field's exclusion band, or
/// both on the fixed torus inside it.
bool invariance_admissible(const SkewProduct& f, Field field, CirclePoint theta, const DirectionSettings& s = {});

/// Angle between Df(p) dir(p) and dir(f(p)).
double check_invariance(const SkewProduct& f, Field field, const Point3& p, const DirectionSettings& s = {});
double check_invariance(const SkewProduct& f, Field field, CirclePoint theta, const DirectionSettings& s = {});

/// theta_i = i / n, dropping points inside the exclusion bands other than the
/// fixed tori themselves.
struct GridSpec {
    int n = 1000;
    double eta_half = default_exclusion;
    double eta_zero = default_exclusion;
};
std::vector<CirclePoint> grid_points(const GridSpec& grid);

struct CertificationRow {
    double theta;
    double g_s;
    double g_c;
    double g_u;
};

struct CertificationMargins {
    double center_over_stable;   // min g_c / g_s
    double unstable_over_center; // min g_u / g_c
    double max_stable;           // max g_s
};

struct CertificationReport {
    GridSpec grid;
    int horizon = 0;
    std::vector<CertificationRow> rows;
    CertificationMargins margins{};
    bool verdict = false;
    std::optional<ErrorKind> failure; // HorizonTooShort or CertificationFailed
    std::string message;
};

/// Push unit stable and center vectors N steps along each orbit (renormalizing
/// every step) and report per-step geometric-mean growth factors. With v = 0
/// the stable and center fields coincide off the fixed tori, so only the two
/// fixed tori are certified.
/// Never throws on a failed verdict; failure is recorded in the report.
CertificationReport certify_ph(const SkewProduct& f, const GridSpec& grid, int horizon, double tol = 1e-12);

/// Smallest horizon in [1, max_horizon] that certifies, or the report at
/// max_horizon if none does.
CertificationReport smallest_certifying_horizon(const SkewProduct& f, const GridSpec& grid, int max_horizon = 20,
                                                double tol = 1e-12);

/// Throws the report's failure as an Error.
void require_certified(const CertificationReport& report);

struct AlphaPrimeScan {
    double min_abs = 0.0;
    double min_abs_theta = 0.0;
    SignPattern sign_lower = SignPattern::Zero; // on (0, 1/2)
    SignPattern sign_upper = SignPattern::Zero; // on (1/2, 1)
    double max_functional_residual = 0.0;       // |a'(psi t) psi'(t) - lam a'(t)| / (1 + |a'(t)|)
    int samples = 0;
    bool degenerate = false; // v = 0
};

/// alpha' over the admissible grid points (both bands and fixed points removed).
AlphaPrimeScan min_alpha_prime(const SkewProduct& f, const GridSpec& grid, double tol = 1e-12);

} // namespace coherence
