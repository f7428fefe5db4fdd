#include "doctest.h"

#include <cstring>
#include <random>

#include "coherence/cohomology.hpp"
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

TwistedEquation with_profile(const SkewProduct& f, Profile v) { return {f.psi(), std::move(v), f.lambda()}; }

} // namespace

TEST_CASE("gamma closed forms") {
    const SkewProduct f = fixtures::nondc();
    const double lam = cat_lambda();
    const TwistedEquation constant = with_profile(f, Profile::constant(1.0));
    for (double t : {0.0, 0.1, 0.5, 0.77}) {
        CHECK(gamma(constant, t, 1e-13).value == doctest::Approx(1.0 / (1.0 - lam)).epsilon(1e-12));
    }
    CHECK(1.0 / (1.0 - lam) == doctest::Approx(1.618034).epsilon(1e-6));
    // The source at 0 is fixed, so every backward iterate sees v(0) = 2.
    CHECK(gamma(f.equation(), 0.0, 1e-13).value == doctest::Approx(2.0 / (1.0 - lam)).epsilon(1e-12));
    CHECK(gamma(f.equation(), 0.5, 1e-13).value == doctest::Approx(0.0).epsilon(1e-15));
    const TwistedEquation none = with_profile(f, Profile::zero());
    CHECK(gamma(none, 0.3, 1e-12).value == 0.0);
    CHECK(beta(none, 0.3, 1e-12).value == 0.0);
}

TEST_CASE("gamma against naive summation with a bisection inverse") {
    const TwistedEquation eq = fixtures::nondc().equation();
    const TwistedEquation eq2 = fixtures::nonlui().equation();
    for (double t : {0.05, 0.2, 0.33, 0.49, 0.51, 0.7, 0.95}) {
        CHECK(std::abs(gamma(eq, t, 1e-13).value - fixtures::gamma_oracle(eq, t, 80)) < 1e-11);
        CHECK(std::abs(gamma(eq2, t, 1e-13).value - fixtures::gamma_oracle(eq2, t, 80)) < 1e-11);
    }
}

TEST_CASE("gamma_batch is bitwise equal to pointwise gamma") {
    const TwistedEquation eq = fixtures::nonlui().equation();
    std::vector<double> ts;
    for (int i = 0; i < 257; ++i) {
        ts.push_back(i / 257.0);
    }
    const std::vector<double> batch = gamma_batch(eq, ts, 1e-12);
    REQUIRE(batch.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double single = gamma(eq, ts[i], 1e-12).value;
        CHECK(std::memcmp(&single, &batch[i], sizeof(double)) == 0);
    }
}

TEST_CASE("beta at and near the fixed points") {
    const SkewProduct f = fixtures::nonlui();
    CHECK(beta(f.equation(), 0.5, 1e-12).value == 0.0);
    CHECK(kind_of([&] { beta(f.equation(), 0.0, 1e-12); }) == ErrorKind::TooCloseToSingularity);
    CHECK(kind_of([&] { beta(f.equation(), 5e-5, 1e-12); }) == ErrorKind::TooCloseToSingularity);
    // cos bump has v(1/2) = 0 so beta exists for the sine example too.
    CHECK(std::isfinite(beta(fixtures::nondc().equation(), 0.3, 1e-12).value));
}

TEST_CASE("derivatives at the fixed points") {
    const SkewProduct g = fixtures::nonlui();
    const double lam = g.lambda();
    const double sigma = g.psi().sigma();
    const double mu = g.psi().mu();
    // odd sine: v'(1/2) = 2 pi, v'(0) = -2 pi.
    CHECK(beta_prime(g.equation(), 0.5, 1e-12).value == doctest::Approx(two_pi / (sigma - lam)).epsilon(1e-12));
    CHECK(gamma_prime(g.equation(), 0.0, 1e-12).value == doctest::Approx(-two_pi / (mu - lam)).epsilon(1e-12));
    const SkewProduct f = fixtures::nondc();
    // cos bump: v' vanishes at both fixed points.
    CHECK(gamma_prime(f.equation(), 0.0, 1e-12).value == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(beta_prime(f.equation(), 0.5, 1e-12).value == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("derivatives agree with finite differences") {
    for (const SkewProduct& f : {fixtures::nondc(), fixtures::nonlui()}) {
        const TwistedEquation& eq = f.equation();
        for (double t : {0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.85}) {
            const double h = 1e-6;
            const double g_fd =
                fixtures::central_difference([&](double x) { return gamma(eq, wrap01(x), 1e-14).value; }, t, h);
            const double g = gamma_prime(eq, t, 1e-13).value;
            CHECK(std::abs(g - g_fd) <= 1e-5 * (1.0 + std::abs(g)));
            const double b_fd =
                fixtures::central_difference([&](double x) { return beta(eq, wrap01(x), 1e-14).value; }, t, h);
            const double b = beta_prime(eq, t, 1e-13).value;
            CHECK(std::abs(b - b_fd) <= 1e-5 * (1.0 + std::abs(b)));
        }
    }
}

TEST_CASE("residuals of the twisted equation") {
    const double tol = 1e-10;
    for (const SkewProduct& f : {fixtures::nondc(), fixtures::nonlui()}) {
        const TwistedEquation& eq = f.equation();
        auto g = [&](CirclePoint p) { return gamma(eq, p, tol).value; };
        double worst = 0.0;
        for (int i = 1; i < 200; ++i) {
            worst = std::max(worst, residual_twisted(g, eq, CirclePoint::from(i / 200.0)));
        }
        CHECK(worst <= 3.0 * tol);
    }
    const TwistedEquation eq = fixtures::nondc().equation();
    auto b = [&](CirclePoint p) { return beta(eq, p, tol).value; };
    double worst = 0.0;
    for (int i = 1; i < 200; ++i) {
        if (i == 100) {
            continue;
        }
        worst = std::max(worst, residual_twisted(b, eq, CirclePoint::from(i / 200.0)));
    }
    CHECK(worst <= 3.0 * tol);
}

TEST_CASE("blow-up of gamma' toward the sink grows monotonically") {
    const TwistedEquation eq = fixtures::nondc().equation();
    double prev = 0.0;
    for (int j = 6; j <= 16; ++j) {
        const double g = std::abs(gamma_prime(eq, CirclePoint{0.5, std::ldexp(1.0, -j)}, 1e-13, 0.0).value);
        CHECK(g > prev);
        prev = g;
    }
}

TEST_CASE("alpha solves the homogeneous equation") {
    const TwistedEquation eq = fixtures::nondc().equation();
    for (double t : {0.1, 0.3, 0.6, 0.9}) {
        const CirclePoint p = CirclePoint::from(t);
        const double lhs = alpha(eq, eq.psi.step(p), 1e-12).value;
        const double rhs = eq.lam * alpha(eq, p, 1e-12).value;
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("ratio tail") {
    RatioTail tail;
    double est = 0.0;
    tail.push(1.0);
    CHECK_FALSE(tail.estimate(est));
    double term = 1.0;
    for (int i = 0; i < 6; ++i) {
        term *= 0.5;
        tail.push(term);
    }
    REQUIRE(tail.estimate(est));
    CHECK(est == doctest::Approx(term).epsilon(1e-12));
    RatioTail growing;
    for (int i = 0; i < 8; ++i) {
        growing.push(std::pow(1.1, i));
    }
    CHECK_FALSE(growing.estimate(est));
}
