#include "doctest.h"

#include "coherence/bundles.hpp"
#include "fixtures.hpp"

using namespace coherence;
using fixtures::cat_lambda;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidConfig;
}

} // namespace

TEST_CASE("skew product map and differential") {
    const SkewProduct f = fixtures::nondc();
    const Point3 p{0.1, 0.2, 0.0};
    const Point3 q = f.apply(p);
    // A x = (0.4, 0.3), v(0) = 2 pushes by 2 e_s, theta stays at the source.
    const Vec2 es = f.e_s();
    CHECK(q.x1 == doctest::Approx(wrap01(0.4 + 2.0 * es.x)).epsilon(1e-14));
    CHECK(q.x2 == doctest::Approx(wrap01(0.3 + 2.0 * es.y)).epsilon(1e-14));
    CHECK(q.theta == 0.0);

    const Tangent3 w = f.differential({0.0, 0.0, 0.25}, {{1.0, 0.0}, 1.0});
    const double vp = f.profile().slope(0.25);
    CHECK(w.v.x == doctest::Approx(2.0 + vp * es.x).epsilon(1e-14));
    CHECK(w.v.y == doctest::Approx(1.0 + vp * es.y).epsilon(1e-14));
    CHECK(w.t == doctest::Approx(f.psi().deriv(0.25)).epsilon(1e-14));
}

TEST_CASE("partial hyperbolicity inequalities are enforced") {
    const ToralAutomorphism a = ToralAutomorphism::cat_map();
    CHECK(kind_of([&] {
              SkewProduct(a, MorseSmaleMap::symmetric(0.45, 1.05, 0.05, 0.05), Profile::odd_sine());
          }) == ErrorKind::ConditionViolated);
    CHECK(kind_of([&] { SkewProduct(a, MorseSmaleMap::sine(0.01), Profile::cos_bump()); }) ==
          ErrorKind::ConditionViolated);
    CHECK_NOTHROW(SkewProduct(a, MorseSmaleMap::sine(0.01), Profile::cos_bump(), false));
}

TEST_CASE("line directions") {
    const LineDirection d = LineDirection::from_frame(-3.0, 0.0, -4.0);
    CHECK(d.s == doctest::Approx(0.6));
    CHECK(d.t == doctest::Approx(0.8));
    CHECK(d.slope() == doctest::Approx(0.75));
    CHECK(line_angle(LineDirection::horizontal(), LineDirection::graph(0.0)) ==
          doctest::Approx(std::acos(-1.0) / 2));
    CHECK(line_angle(d, LineDirection::from_frame(3.0, 0.0, 4.0)) == 0.0);
}

TEST_CASE("center and stable fields at the fixed tori") {
    const SkewProduct f = fixtures::nonlui();
    const LineDirection c_half = center_direction(f, CirclePoint{0.5, 0.0});
    CHECK(c_half.t == 0.0);
    const LineDirection s_zero = stable_direction(f, CirclePoint{0.0, 0.0});
    CHECK(s_zero.t == 0.0);
    const LineDirection s_half = stable_direction(f, CirclePoint{0.5, 0.0});
    CHECK(s_half.slope() == doctest::Approx(two_pi / (f.psi().sigma() - f.lambda())).epsilon(1e-12));
    const LineDirection u = unstable_direction(f);
    CHECK(u.u == 1.0);
}

TEST_CASE("fields are invariant") {
    for (const SkewProduct& f : {fixtures::nondc(), fixtures::nonlui()}) {
        DirectionSettings s;
        s.tol = 1e-13;
        for (Field field : {Field::Stable, Field::Center, Field::Unstable}) {
            double worst = 0.0;
            for (int i = 0; i < 400; ++i) {
                const CirclePoint t = CirclePoint::from((i + 0.37) / 400.0);
                if (invariance_admissible(f, field, t, s)) {
                    worst = std::max(worst, check_invariance(f, field, t, s));
                }
            }
            CHECK(worst < 1e-9);
        }
        for (Field field : {Field::Stable, Field::Center}) {
            CHECK(check_invariance(f, field, CirclePoint{0.0, 0.0}, s) < 1e-12);
            CHECK(check_invariance(f, field, CirclePoint{0.5, 0.0}, s) < 1e-12);
        }
    }
}

TEST_CASE("grid drops the exclusion bands but keeps the fixed tori") {
    const std::vector<CirclePoint> pts = grid_points({1000, 1.5e-3, 1.5e-3});
    bool has_zero = false;
    bool has_half = false;
    for (const CirclePoint& p : pts) {
        if (p.is_fixed()) {
            has_zero = has_zero || p.anchor == 0.0;
            has_half = has_half || p.anchor == 0.5;
        } else {
            CHECK(p.dist_to_zero() > 1.5e-3);
            CHECK(p.dist_to_half() > 1.5e-3);
        }
    }
    CHECK(has_zero);
    CHECK(has_half);
    CHECK(pts.size() == 1000 - 4);
}

TEST_CASE("certification of both examples") {
    const SkewProduct f = fixtures::nondc();
    const CertificationReport r = certify_ph(f, {}, 8);
    CHECK(r.verdict);
    CHECK_FALSE(r.failure.has_value());
    CHECK(r.margins.center_over_stable > 1.0);
    CHECK(r.margins.unstable_over_center > 1.0);
    CHECK(r.margins.max_stable < 1.0);
    // The row at the fixed torus theta = 0 is exact: lambda, mu, 1/lambda.
    const CertificationRow& row0 = r.rows.front();
    CHECK(row0.theta == 0.0);
    CHECK(row0.g_s == doctest::Approx(cat_lambda()).epsilon(1e-13));
    CHECK(row0.g_c == doctest::Approx(f.psi().mu()).epsilon(1e-13));
    CHECK(row0.g_u == doctest::Approx(1.0 / cat_lambda()).epsilon(1e-13));

    const CertificationReport short_run = certify_ph(f, {}, 1);
    CHECK_FALSE(short_run.verdict);
    REQUIRE(short_run.failure.has_value());
    CHECK(*short_run.failure == ErrorKind::HorizonTooShort);
    CHECK(kind_of([&] { require_certified(short_run); }) == ErrorKind::HorizonTooShort);

    const CertificationReport best = smallest_certifying_horizon(f, {}, 20);
    CHECK(best.verdict);
    CHECK(best.horizon > 1);
    CHECK(best.horizon <= 8);

    CHECK(certify_ph(fixtures::nonlui(), {}, 8).verdict);
}

TEST_CASE("a zero profile certifies on the fixed tori only") {
    const SkewProduct f(ToralAutomorphism::cat_map(), make_sine_map(0.15, cat_lambda()), Profile::zero());
    const CertificationReport r = certify_ph(f, {}, 8);
    CHECK(r.rows.size() == 2);
    CHECK(r.verdict);
}

TEST_CASE("a sink weaker than the stable rate fails certification") {
    const SkewProduct f(ToralAutomorphism::cat_map(), MorseSmaleMap::sine(0.01), Profile::zero(), false);
    const CertificationReport r = certify_ph(f, {}, 8);
    CHECK_FALSE(r.verdict);
    REQUIRE(r.failure.has_value());
    CHECK(*r.failure == ErrorKind::CertificationFailed);
    // With a nonzero profile the stable series itself no longer converges.
    const SkewProduct g(ToralAutomorphism::cat_map(), MorseSmaleMap::sine(0.01), Profile::cos_bump(), false);
    CHECK(kind_of([&] { certify_ph(g, {}, 8); }) == ErrorKind::NoDecay);
}

TEST_CASE("center field approaches the horizontal line at the sink") {
    for (const SkewProduct& f : {fixtures::nondc(), fixtures::nonlui()}) {
        DirectionSettings s;
        s.eta_half = 0.0;
        for (double side : {-1.0, 1.0}) {
            double prev = 10.0;
            for (int j = 6; j <= 16; ++j) {
                const LineDirection c = center_direction(f, CirclePoint{0.5, side * std::ldexp(1.0, -j)}, s);
                const double angle = line_angle(c, LineDirection::horizontal());
                CHECK(angle < prev);
                prev = angle;
            }
        }
    }
}

TEST_CASE("alpha prime stays away from zero") {
    const AlphaPrimeScan a = min_alpha_prime(fixtures::nondc(), {});
    CHECK_FALSE(a.degenerate);
    CHECK(a.min_abs > 1.0);
    CHECK(a.max_functional_residual < 1e-9);
    CHECK(a.sign_lower != SignPattern::Mixed);
    CHECK(a.sign_upper != SignPattern::Mixed);
    const AlphaPrimeScan b = min_alpha_prime(fixtures::nonlui(), {});
    CHECK(b.min_abs > 1.0);
    const SkewProduct flat(ToralAutomorphism::cat_map(), make_sine_map(0.15, cat_lambda()), Profile::zero());
    CHECK(min_alpha_prime(flat, {}).degenerate);
}
