#include "coherence/bundles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coherence/kernels.hpp"
#include "coherence/parallel.hpp"

namespace coherence {

SkewProduct::SkewProduct(ToralAutomorphism a, MorseSmaleMap psi, Profile v, bool enforce_inequalities)
    : a_(a), eq_{std::move(psi), std::move(v), a.lambda()} {
    if (enforce_inequalities) {
        check_ph_inequalities(eq_.psi.sigma(), eq_.psi.mu(), eq_.lam);
    }
}

Point3 SkewProduct::apply(const Point3& p) const {
    const Vec2 ax = a_.apply(p.x());
    const double shift = eq_.v.value(p.theta);
    const Vec2 es = a_.e_s();
    return wrap_point(ax.x + shift * es.x, ax.y + shift * es.y, eq_.psi(p.theta));
}

Tangent3 SkewProduct::differential(const Point3& p, const Tangent3& w) const {
    const Vec2 av = a_.apply(w.v);
    const double dv = eq_.v.slope(p.theta);
    return {av + (w.t * dv) * a_.e_s(), w.t * eq_.psi.deriv(p.theta)};
}

std::string_view to_string(Field f) {
    switch (f) {
    case Field::Stable:
        return "stable";
    case Field::Center:
        return "center";
    case Field::Unstable:
        return "unstable";
    }
    return "?";
}

LineDirection LineDirection::from_frame(double s, double u, double t) {
    if (std::isinf(s) && u == 0.0 && std::isfinite(t)) {
        return horizontal();
    }
    const double n = std::sqrt(s * s + u * u + t * t);
    LineDirection d{s / n, u / n, t / n};
    const bool flip = d.t < 0.0 || (d.t == 0.0 && (d.u < 0.0 || (d.u == 0.0 && d.s < 0.0)));
    if (flip) {
        d = {-d.s, -d.u, -d.t};
    }
    return d;
}

double LineDirection::slope() const {
    return t == 0.0 ? std::numeric_limits<double>::infinity() : s / t;
}

Tangent3 LineDirection::ambient(const ToralAutomorphism& a) const { return {a.from_frame(s, u), t}; }

double line_angle(const LineDirection& a, const LineDirection& b) {
    // atan2(|a x b|, |a . b|) stays accurate for nearly parallel lines.
    const double cx = a.u * b.t - a.t * b.u;
    const double cy = a.t * b.s - a.s * b.t;
    const double cz = a.s * b.u - a.u * b.s;
    const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double d = std::abs(a.s * b.s + a.u * b.u + a.t * b.t);
    return std::atan2(cross, d);
}

LineDirection center_direction(const SkewProduct& f, CirclePoint theta, const DirectionSettings& s) {
    if (theta.dist_to_half() <= s.eta_half) {
        return LineDirection::horizontal();
    }
    return LineDirection::graph(gamma_prime(f.equation(), theta, s.tol, s.eta_half).value);
}

LineDirection stable_direction(const SkewProduct& f, CirclePoint theta, const DirectionSettings& s) {
    if (theta.dist_to_zero() <= s.eta_zero) {
        return LineDirection::horizontal();
    }
    return LineDirection::graph(beta_prime(f.equation(), theta, s.tol, s.eta_zero).value);
}

LineDirection unstable_direction(const SkewProduct&) { return {0.0, 1.0, 0.0}; }

LineDirection field_direction(const SkewProduct& f, Field field, CirclePoint theta, const DirectionSettings& s) {
    switch (field) {
    case Field::Stable:
        return stable_direction(f, theta, s);
    case Field::Center:
        return center_direction(f, theta, s);
    case Field::Unstable:
        return unstable_direction(f);
    }
    return unstable_direction(f);
}

bool invariance_admissible(const SkewProduct& f, Field field, CirclePoint theta, const DirectionSettings& s) {
    auto in_band = [&](CirclePoint p) {
        switch (field) {
        case Field::Stable:
            return p.dist_to_zero() <= s.eta_zero;
        case Field::Center:
            return p.dist_to_half() <= s.eta_half;
        case Field::Unstable:
            return false;
        }
        return false;
    };
    const CirclePoint image = f.psi().step(theta);
    return (!in_band(theta) && !in_band(image)) || (theta.is_fixed() && in_band(theta));
}

double check_invariance(const SkewProduct& f, Field field, CirclePoint theta, const DirectionSettings& s) {
    const LineDirection d = field_direction(f, field, theta, s);
    const double lam = f.lambda();
    const double pushed_s = lam * d.s + d.t * f.profile().slope(theta);
    const double pushed_u = d.u / lam;
    const double pushed_t = d.t * f.psi().deriv(theta);
    const LineDirection image = LineDirection::from_frame(pushed_s, pushed_u, pushed_t);
    const LineDirection target = field_direction(f, field, f.psi().step(theta), s);
    return line_angle(image, target);
}

double check_invariance(const SkewProduct& f, Field field, const Point3& p, const DirectionSettings& s) {
    // The fields depend on theta only.
    return check_invariance(f, field, CirclePoint::from(p.theta), s);
}

std::vector<CirclePoint> grid_points(const GridSpec& grid) {
    std::vector<CirclePoint> out;
    out.reserve(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) {
        const CirclePoint p = CirclePoint::from(static_cast<double>(i) / grid.n);
        if (!p.is_fixed() && (p.dist_to_half() <= grid.eta_half || p.dist_to_zero() <= grid.eta_zero)) {
            continue;
        }
        out.push_back(p);
    }
    return out;
}

namespace {

CertificationReport certify_core(const SkewProduct& f, const GridSpec& grid, int horizon, double tol) {
    if (horizon < 1) {
        throw Error(ErrorKind::InvalidConfig, "certification horizon must be >= 1");
    }
    std::vector<CirclePoint> points;
    if (f.profile().is_zero()) {
        points = {CirclePoint{0.0, 0.0}, CirclePoint{0.5, 0.0}};
    } else {
        points = grid_points(grid);
    }
    const std::size_t lanes = points.size();
    const std::size_t steps = static_cast<std::size_t>(horizon);
    std::vector<double> map_slope(steps * lanes);
    std::vector<double> profile_slope(steps * lanes);
    std::vector<double> ps(lanes), qs(lanes), pc(lanes), qc(lanes);
    const DirectionSettings settings{tol, grid.eta_half, grid.eta_zero};
    const bool product = f.profile().is_zero();

    parallel_for(lanes, [&](std::size_t i) {
        CirclePoint p = points[i];
        LineDirection ds, dc;
        if (product) {
            // Decoupled system: e_s and d/dtheta swap roles between the tori.
            const bool at_zero = p.anchor == 0.0;
            ds = at_zero ? LineDirection::horizontal() : LineDirection::graph(0.0);
            dc = at_zero ? LineDirection::graph(0.0) : LineDirection::horizontal();
        } else {
            ds = stable_direction(f, p, settings);
            dc = center_direction(f, p, settings);
        }
        ps[i] = ds.s;
        qs[i] = ds.t;
        pc[i] = dc.s;
        qc[i] = dc.t;
        for (std::size_t k = 0; k < steps; ++k) {
            map_slope[k * lanes + i] = f.psi().deriv(p);
            profile_slope[k * lanes + i] = f.profile().slope(p);
            p = f.psi().step(p);
        }
    });

    std::vector<double> log_s(lanes), log_c(lanes);
    kernels::pushforward_log_growth(f.lambda(), map_slope, profile_slope, steps, ps, qs, log_s);
    kernels::pushforward_log_growth(f.lambda(), map_slope, profile_slope, steps, pc, qc, log_c);

    CertificationReport report;
    report.grid = grid;
    report.horizon = horizon;
    report.rows.resize(lanes);
    const double g_u = f.matrix().inv_lambda();
    CertificationMargins m{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < lanes; ++i) {
        const double g_s = std::exp(log_s[i] / horizon);
        const double g_c = std::exp(log_c[i] / horizon);
        report.rows[i] = {points[i].value(), g_s, g_c, g_u};
        m.center_over_stable = std::min(m.center_over_stable, g_c / g_s);
        m.unstable_over_center = std::min(m.unstable_over_center, g_u / g_c);
        m.max_stable = std::max(m.max_stable, g_s);
    }
    report.margins = m;
    report.verdict = lanes > 0 && m.center_over_stable > 1.0 && m.unstable_over_center > 1.0 && m.max_stable < 1.0;
    return report;
}

double worst_log_margin(const CertificationMargins& m) {
    return std::min({std::log(m.center_over_stable), std::log(m.unstable_over_center), -std::log(m.max_stable)});
}

} // namespace

CertificationReport certify_ph(const SkewProduct& f, const GridSpec& grid, int horizon, double tol) {
    CertificationReport report = certify_core(f, grid, horizon, tol);
    if (report.verdict) {
        return report;
    }
    const double w0 = worst_log_margin(report.margins);
    const double w1 = worst_log_margin(certify_core(f, grid, horizon + 1, tol).margins);
    const double w2 = worst_log_margin(certify_core(f, grid, horizon + 2, tol).margins);
    if (w1 > w0 && w2 > w1) {
        report.failure = ErrorKind::HorizonTooShort;
        report.message = "ordering fails at N = " + std::to_string(horizon) + " but the worst margin improves with N";
    } else {
        report.failure = ErrorKind::CertificationFailed;
        report.message = "ordering g_s < g_c < g_u, g_s < 1 fails at N = " + std::to_string(horizon);
    }
    return report;
}

CertificationReport smallest_certifying_horizon(const SkewProduct& f, const GridSpec& grid, int max_horizon,
                                                double tol) {
    for (int n = 1; n < max_horizon; ++n) {
        CertificationReport r = certify_core(f, grid, n, tol);
        if (r.verdict) {
            return r;
        }
    }
    return certify_ph(f, grid, max_horizon, tol);
}

void require_certified(const CertificationReport& report) {
    if (report.failure) {
        throw Error(*report.failure, report.message);
    }
}

namespace {

SignPattern combine(SignPattern acc, double x) {
    const SignPattern s = x > 0.0 ? SignPattern::Positive : (x < 0.0 ? SignPattern::Negative : SignPattern::Zero);
    if (acc == SignPattern::Zero) {
        return s;
    }
    if (s == SignPattern::Zero || s == acc) {
        return acc;
    }
    return SignPattern::Mixed;
}

} // namespace

AlphaPrimeScan min_alpha_prime(const SkewProduct& f, const GridSpec& grid, double tol) {
    AlphaPrimeScan scan;
    if (f.profile().is_zero()) {
        scan.degenerate = true;
        return scan;
    }
    auto admissible = [&](CirclePoint p) {
        return p.dist_to_half() > grid.eta_half && p.dist_to_zero() > grid.eta_zero;
    };
    std::vector<CirclePoint> points;
    for (const CirclePoint& p : grid_points(grid)) {
        if (admissible(p)) {
            points.push_back(p);
        }
    }
    const TwistedEquation& eq = f.equation();
    std::vector<double> value(points.size());
    std::vector<double> residual(points.size(), 0.0);
    parallel_for(points.size(), [&](std::size_t i) {
        const CirclePoint p = points[i];
        value[i] = alpha_prime(eq, p, tol, grid.eta_half, grid.eta_zero).value;
        const CirclePoint image = eq.psi.step(p);
        if (admissible(image)) {
            const double next = alpha_prime(eq, image, tol, grid.eta_half, grid.eta_zero).value;
            residual[i] = std::abs(next * eq.psi.deriv(p) - eq.lam * value[i]) / (1.0 + std::abs(value[i]));
        }
    });
    scan.min_abs = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double a = std::abs(value[i]);
        if (a < scan.min_abs) {
            scan.min_abs = a;
            scan.min_abs_theta = points[i].value();
        }
        if (points[i].value() < 0.5) {
            scan.sign_lower = combine(scan.sign_lower, value[i]);
        } else {
            scan.sign_upper = combine(scan.sign_upper, value[i]);
        }
        scan.max_functional_residual = std::max(scan.max_functional_residual, residual[i]);
    }
    scan.samples = static_cast<int>(points.size());
    if (points.empty()) {
        scan.min_abs = 0.0;
    }
    return scan;
}

} // namespace coherence
