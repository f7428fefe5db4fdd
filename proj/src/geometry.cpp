#include "coherence/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "coherence/parallel.hpp"

namespace coherence {

namespace {

Point3 leaf_point(const SkewProduct& f, const Point3& base, double s, double theta) {
    const Vec2 es = f.e_s();
    return {base.x1 + s * es.x, base.x2 + s * es.y, theta};
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
    for (int k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    }
    return out;
}

SignPattern accumulate_sign(SignPattern acc, double x) {
    const SignPattern s = x > 0.0 ? SignPattern::Positive : SignPattern::Negative;
    if (acc == SignPattern::Zero || acc == s) {
        return s;
    }
    return SignPattern::Mixed;
}

} // namespace

Vec2 semiconjugacy(const SkewProduct& f, const Point3& p, double tol) {
    const double g = gamma(f.equation(), p.theta, tol).value;
    const Vec2 es = f.e_s();
    return {wrap01(p.x1 - g * es.x), wrap01(p.x2 - g * es.y)};
}

double semiconjugacy_residual(const SkewProduct& f, const Point3& p, double tol) {
    const Vec2 lhs = semiconjugacy(f, f.apply(p), tol);
    const Vec2 rhs = f.matrix().apply(semiconjugacy(f, p, tol));
    return std::hypot(wrap_centered(lhs.x - rhs.x), wrap_centered(lhs.y - rhs.y));
}

std::string_view to_string(CurveKind k) {
    switch (k) {
    case CurveKind::CenterFiber:
        return "center_fiber";
    case CurveKind::CenterOde:
        return "center_ode";
    case CurveKind::StrongStable:
        return "strong_stable";
    }
    return "?";
}

CurveSample center_fiber(const SkewProduct& f, const Point3& p0, double theta_lo, double theta_hi, int n,
                         double tol) {
    CurveSample c;
    c.kind = CurveKind::CenterFiber;
    c.base = p0;
    c.theta_lo = theta_lo;
    c.theta_hi = theta_hi;
    c.step = n > 1 ? (theta_hi - theta_lo) / (n - 1) : 0.0;
    const std::vector<double> thetas = linspace(theta_lo, theta_hi, n);
    std::vector<double> wrapped(thetas.size());
    std::transform(thetas.begin(), thetas.end(), wrapped.begin(), wrap01);
    const std::vector<double> g = gamma_batch(f.equation(), wrapped, tol);
    const double g0 = gamma(f.equation(), p0.theta, tol).value;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const double s = g[k] - g0;
        c.points.push_back(leaf_point(f, p0, s, thetas[k]));
        c.s_displacement.push_back(s);
    }
    return c;
}

CurveSample integrate_center(const SkewProduct& f, const Point3& p0, double arclen, double step, double eta_half,
                             double tol) {
    CurveSample c;
    c.kind = CurveKind::CenterOde;
    c.base = p0;
    const double dir = arclen < 0.0 ? -1.0 : 1.0;
    const int count = std::max(1, static_cast<int>(std::ceil(std::abs(arclen) / step)));
    const double h = std::abs(arclen) / count;
    c.step = h;
    if (CirclePoint::from(p0.theta).dist_to_half() <= eta_half) {
        throw Error(ErrorKind::TooCloseToSingularity, "integrate_center: base point inside the singular band");
    }

    bool blocked = false;
    // Unit field in (s, theta); flags `blocked` instead of evaluating inside the band.
    auto field = [&](double t, double& ds, double& dt) {
        const CirclePoint p = CirclePoint::from(wrap01(t));
        if (p.dist_to_half() <= eta_half) {
            blocked = true;
            return;
        }
        const double g = gamma_prime(f.equation(), p, tol, eta_half).value;
        const double n = std::hypot(g, 1.0);
        ds = dir * g / n;
        dt = dir / n;
    };

    double s = 0.0;
    double t = p0.theta;
    c.points.push_back(leaf_point(f, p0, s, t));
    c.s_displacement.push_back(s);
    for (int k = 0; k < count; ++k) {
        double s1 = 0, t1 = 0, s2 = 0, t2 = 0, s3 = 0, t3 = 0, s4 = 0, t4 = 0;
        field(t, s1, t1);
        if (!blocked) field(t + 0.5 * h * t1, s2, t2);
        if (!blocked) field(t + 0.5 * h * t2, s3, t3);
        if (!blocked) field(t + h * t3, s4, t4);
        if (blocked) {
            c.entered_singular_band = true;
            break;
        }
        s += h / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
        t += h / 6.0 * (t1 + 2.0 * t2 + 2.0 * t3 + t4);
        c.points.push_back(leaf_point(f, p0, s, t));
        c.s_displacement.push_back(s);
    }
    c.theta_lo = std::min(p0.theta, t);
    c.theta_hi = std::max(p0.theta, t);
    return c;
}

double fiber_deviation(const SkewProduct& f, const CurveSample& ode, double tol) {
    const double g0 = gamma(f.equation(), ode.base.theta, tol).value;
    std::vector<double> dev(ode.points.size());
    parallel_for(ode.points.size(), [&](std::size_t k) {
        const double g = gamma(f.equation(), wrap01(ode.points[k].theta), tol).value;
        dev[k] = std::abs(ode.s_displacement[k] - (g - g0));
    });
    return dev.empty() ? 0.0 : *std::max_element(dev.begin(), dev.end());
}

CurveSample strong_stable_curve(const SkewProduct& f, const Point3& p0, const std::vector<double>& thetas,
                                double eta_zero, double tol) {
    CurveSample c;
    c.kind = CurveKind::StrongStable;
    c.base = p0;
    if (!thetas.empty()) {
        const auto [lo, hi] = std::minmax_element(thetas.begin(), thetas.end());
        c.theta_lo = *lo;
        c.theta_hi = *hi;
    }
    const double b0 = beta(f.equation(), p0.theta, tol, eta_zero).value;
    std::vector<double> b(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t k) {
        b[k] = beta(f.equation(), CirclePoint::from(wrap01(thetas[k])), tol, eta_zero).value;
    });
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const double s = b[k] - b0;
        c.points.push_back(leaf_point(f, p0, s, thetas[k]));
        c.s_displacement.push_back(s);
    }
    return c;
}

CurveSample strong_stable_curve(const SkewProduct& f, const Point3& p0, double theta_lo, double theta_hi, int n,
                                double eta_zero, double tol) {
    CurveSample c = strong_stable_curve(f, p0, linspace(theta_lo, theta_hi, n), eta_zero, tol);
    c.step = n > 1 ? (theta_hi - theta_lo) / (n - 1) : 0.0;
    return c;
}

double secant_tangency_error(const SkewProduct& f, const CurveSample& curve, const DirectionSettings& s) {
    const Field field = curve.kind == CurveKind::StrongStable ? Field::Stable : Field::Center;
    const std::size_t segments = curve.points.empty() ? 0 : curve.points.size() - 1;
    std::vector<double> err(segments, 0.0);
    parallel_for(segments, [&](std::size_t k) {
        const CirclePoint mid = CirclePoint::from(wrap01(0.5 * (curve.points[k].theta + curve.points[k + 1].theta)));
        const bool banned = field == Field::Center ? mid.dist_to_half() <= s.eta_half : mid.dist_to_zero() <= s.eta_zero;
        if (banned) {
            return;
        }
        const double ds = curve.s_displacement[k + 1] - curve.s_displacement[k];
        const double dt = curve.points[k + 1].theta - curve.points[k].theta;
        err[k] = line_angle(LineDirection::from_frame(ds, 0.0, dt), field_direction(f, field, mid, s));
    });
    return err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
}

std::string_view to_string(WitnessVerdict v) {
    return v == WitnessVerdict::NonDynamicallyCoherent ? "NON_DYNAMICALLY_COHERENT_WITNESS" : "COHERENT_CANDIDATE";
}

WitnessReport nonintegrability_witness(const SkewProduct& f, const std::string& example, const WitnessSettings& s) {
    WitnessReport report;
    report.example = example;
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> offset(s.offset_scale * std::ldexp(1.0, -s.j_hi),
                                                  s.offset_scale * std::ldexp(1.0, -s.j_lo));
    auto sample = [&](double side, double d) {
        const CirclePoint p{0.5, side * d};
        const double g = gamma_prime(f.equation(), p, s.tol, s.eta_half).value;
        if (std::abs(g) < 1e-12) {
            ++report.discarded;
            return false;
        }
        report.samples.push_back({p.value(), g});
        if (side < 0.0) {
            report.sign_lower = accumulate_sign(report.sign_lower, g);
        } else {
            report.sign_upper = accumulate_sign(report.sign_upper, g);
        }
        return true;
    };
    for (double side : {-1.0, 1.0}) {
        for (int j = s.j_lo; j <= s.j_hi; ++j) {
            sample(side, s.offset_scale * std::ldexp(1.0, -j));
        }
        // Discarded random draws are replaced, within a bounded budget.
        int kept = 0;
        for (int attempt = 0; kept < s.random_per_side && attempt < 10 * s.random_per_side; ++attempt) {
            if (sample(side, offset(rng))) {
                ++kept;
            }
        }
    }
    auto uniform = [](SignPattern p) { return p == SignPattern::Positive || p == SignPattern::Negative; };
    if (!uniform(report.sign_lower) || !uniform(report.sign_upper)) {
        throw Error(ErrorKind::InconsistentSigns,
                    "gamma' signs near 1/2: lower " + std::string(to_string(report.sign_lower)) + ", upper " +
                        std::string(to_string(report.sign_upper)) + " (" + std::to_string(report.discarded) +
                        " samples discarded)");
    }
    report.verdict = report.sign_lower != report.sign_upper ? WitnessVerdict::NonDynamicallyCoherent
                                                            : WitnessVerdict::CoherentCandidate;
    return report;
}

std::string_view to_string(BlowupWhich w) {
    return w == BlowupWhich::GammaPrimeAtHalf ? "gamma_prime_at_half" : "beta_prime_at_zero";
}

double predicted_rho(const SkewProduct& f) { return 1.0 - std::log(f.lambda()) / std::log(f.psi().sigma()); }

double predicted_a(const SkewProduct& f) { return 1.0 - std::log(f.lambda()) / std::log(f.psi().mu()); }

ExponentFit blowup_fit(const SkewProduct& f, BlowupWhich which, int j_lo, int j_hi, double eta, double tol) {
    ExponentFit fit;
    fit.which = which;
    for (int j = j_lo; j <= j_hi; ++j) {
        const double d = std::ldexp(1.0, -j);
        if (d > eta) {
            fit.j_values.push_back(j);
            fit.offsets.push_back(d);
        }
    }
    if (fit.offsets.size() < 8) {
        throw Error(ErrorKind::DegenerateFit, "blow-up fit needs at least 8 dyadic offsets outside the exclusion band, got " +
                                                  std::to_string(fit.offsets.size()));
    }
    std::vector<double> values(fit.offsets.size());
    parallel_for(values.size(), [&](std::size_t i) {
        const double d = fit.offsets[i];
        values[i] = which == BlowupWhich::GammaPrimeAtHalf
                        ? gamma_prime(f.equation(), CirclePoint{0.5, d}, tol, eta).value
                        : beta_prime(f.equation(), CirclePoint{0.0, d}, tol, eta).value;
    });
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == 0.0 || !std::isfinite(values[i])) {
            throw Error(ErrorKind::DegenerateFit, "blow-up sample vanishes at offset " + std::to_string(fit.offsets[i]));
        }
        fit.log_distance.push_back(std::log(fit.offsets[i]));
        fit.log_value.push_back(std::log(std::abs(values[i])));
        mx += -fit.log_distance.back();
        my += fit.log_value.back();
    }
    const double n = static_cast<double>(values.size());
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double dx = -fit.log_distance[i] - mx;
        sxy += dx * (fit.log_value[i] - my);
        sxx += dx * dx;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.predicted = which == BlowupWhich::GammaPrimeAtHalf ? predicted_rho(f) : predicted_a(f);
    fit.relative_deviation = std::abs(fit.slope - fit.predicted) / fit.predicted;
    return fit;
}

double positivity_lhs(const PositivityConstants& c, int n) {
    const double geometric = c.ratio == 1.0 ? n + 1.0 : (1.0 - std::pow(c.ratio, n + 1)) / (1.0 - c.ratio);
    return c.c1 * geometric - c.c2 * c.c3 / (1.0 - c.lam);
}

namespace {

double positivity_limit(const PositivityConstants& c) {
    if (c.ratio >= 1.0) {
        return c.c1 > 0.0 ? std::numeric_limits<double>::infinity() : -c.c2 * c.c3 / (1.0 - c.lam);
    }
    return c.c1 / (1.0 - c.ratio) - c.c2 * c.c3 / (1.0 - c.lam);
}

} // namespace

PositivityResult positivity_condition(const PositivityConstants& c, int n_max) {
    PositivityResult r;
    r.constants = c;
    r.limit = positivity_limit(c);
    for (int n = 0; n <= n_max; ++n) {
        const double lhs = positivity_lhs(c, n);
        if (lhs > 0.0) {
            r.lhs = lhs;
            r.n_used = n;
            r.verdict = true;
            return r;
        }
    }
    throw Error(ErrorKind::ConditionFails, "positivity condition fails for N <= " + std::to_string(n_max) +
                                               "; limiting value " + std::to_string(r.limit));
}

PositivityConstants positivity_constants(const SkewProduct& f, double theta0, double theta_star, int samples) {
    PositivityConstants c;
    c.theta0 = theta0;
    c.theta_star = theta_star;
    c.domain_hi = f.psi().invert(theta0);
    c.ratio = f.psi().sigma() / f.lambda();
    c.lam = f.lambda();
    const Profile& v = f.profile();
    c.c1 = std::numeric_limits<double>::infinity();
    for (double t : linspace(0.5, theta0, samples)) {
        c.c1 = std::min(c.c1, v.slope(t));
    }
    for (double t : linspace(theta0, 1.0, samples)) {
        c.c2 = std::max(c.c2, std::abs(v.slope(wrap01(t))));
    }
    for (double t : linspace(theta0, c.domain_hi, samples)) {
        c.c3 = std::max(c.c3, f.psi().deriv(t));
    }
    return c;
}

PositivityResult positivity_condition(const SkewProduct& f, double theta_star, int n_max, int scan) {
    const double lo = f.psi()(theta_star);
    PositivityConstants best;
    double best_limit = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan; ++i) {
        const double theta0 = lo + (theta_star - lo) * i / scan;
        const PositivityConstants c = positivity_constants(f, theta0, theta_star);
        const double limit = positivity_limit(c);
        if (limit > best_limit) {
            best_limit = limit;
            best = c;
        }
    }
    return positivity_condition(best, n_max);
}

AttractorRecord attractor_probe(const SkewProduct& f, const Point3& p0, int n_iter, double threshold,
                                int late_window) {
    AttractorRecord rec;
    rec.theta0 = p0.theta;
    rec.threshold = threshold;
    CirclePoint p = CirclePoint::from(p0.theta);
    if (p.is_fixed() && p.anchor == 0.0) {
        throw Error(ErrorKind::TooCloseToSingularity, "attractor_probe: start on the repelling torus theta = 0");
    }
    // Only theta matters for the distance to the attracting torus.
    constexpr double floor = 1e-280;
    if (p.is_fixed()) {
        rec.distance.assign(static_cast<std::size_t>(n_iter) + 1, 0.0);
        rec.first_below = 0;
        return rec;
    }
    rec.distance.push_back(p.dist_to_half());
    for (int k = 0; k < n_iter; ++k) {
        p = f.psi().step(p);
        const double d = p.dist_to_half();
        if (d < floor) {
            break;
        }
        rec.distance.push_back(d);
    }
    for (std::size_t k = 0; k < rec.distance.size(); ++k) {
        if (rec.distance[k] < threshold) {
            rec.first_below = static_cast<int>(k);
            break;
        }
    }
    const int steps = static_cast<int>(rec.distance.size()) - 1;
    rec.late_window = std::min(late_window, steps);
    if (rec.late_window > 0) {
        const double last = rec.distance.back();
        const double first = rec.distance[rec.distance.size() - 1 - static_cast<std::size_t>(rec.late_window)];
        rec.late_ratio = std::exp((std::log(last) - std::log(first)) / rec.late_window);
    }
    return rec;
}

std::vector<CurveSample> reeb_strip_sample(const SkewProduct& f, const Point3& anchor, int n_curves, double theta_lo,
                                           double theta_hi, int n, double spacing, double eta_zero, double tol) {
    std::vector<double> thetas = linspace(theta_lo, theta_hi, n);
    for (int j = 1; j <= 52; ++j) {
        for (double t : {std::ldexp(1.0, -j), 1.0 - std::ldexp(1.0, -j)}) {
            if (t >= theta_lo && t <= theta_hi) {
                thetas.push_back(t);
            }
        }
    }
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
    thetas.erase(std::remove_if(thetas.begin(), thetas.end(),
                                [&](double t) { return CirclePoint::from(wrap01(t)).dist_to_zero() <= eta_zero; }),
                 thetas.end());

    // All strong stable curves in one cs-leaf are e_s translates of each other.
    const CurveSample first = strong_stable_curve(f, anchor, thetas, eta_zero, tol);
    std::vector<CurveSample> out;
    for (int i = 0; i < n_curves; ++i) {
        const double shift = i * spacing;
        CurveSample c = first;
        c.base = leaf_point(f, anchor, shift, anchor.theta);
        for (std::size_t k = 0; k < c.points.size(); ++k) {
            c.points[k] = leaf_point(f, c.base, c.s_displacement[k], thetas[k]);
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace coherence
