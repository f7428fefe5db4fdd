#include "coherence/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coherence/errors.hpp"
#include "coherence/kernels.hpp"
#include "coherence/parallel.hpp"

namespace coherence {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

[[noreturn]] void too_close(const char* what, double theta, double dist, double eta) {
    throw Error(ErrorKind::TooCloseToSingularity, std::string(what) + " at theta = " + fmt(theta) +
                                                      ": distance " + fmt(dist) + " <= exclusion " + fmt(eta));
}

[[noreturn]] void no_decay(const char* what, double theta, int k) {
    throw Error(ErrorKind::NoDecay, std::string(what) + " at theta = " + fmt(theta) + ": terms did not decay within " +
                                        std::to_string(k) + " terms (needs v(1/2) = 0 and sigma < lam)");
}

} // namespace

void RatioTail::push(double abs_term) {
    for (int i = 0; i < 5; ++i) {
        window_[i] = window_[i + 1];
    }
    window_[5] = abs_term;
    count_ = std::min(count_ + 1, 6);
}

bool RatioTail::estimate(double& out) const {
    if (count_ < 6) {
        return false;
    }
    double r = 0.0;
    bool all_zero = true;
    for (int i = 1; i < 6; ++i) {
        const double prev = window_[i - 1];
        const double cur = window_[i];
        all_zero = all_zero && prev == 0.0 && cur == 0.0;
        double ratio;
        if (prev == 0.0) {
            ratio = cur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        } else {
            ratio = cur / prev;
        }
        r = std::max(r, ratio);
    }
    if (all_zero) {
        out = 0.0;
        return true;
    }
    if (!(r < 1.0)) {
        return false;
    }
    // An isolated zero in the last slot must not end the sum early.
    const double lead = std::max(window_[5], window_[4] * r);
    out = lead * r / (1.0 - r);
    return true;
}

int gamma_term_count(const TwistedEquation& eq, double tol) {
    double bound = eq.v.sup_abs() / ((1.0 - eq.lam) * eq.lam);
    int k = 0;
    while (bound > tol && k < series_k_max) {
        bound *= eq.lam;
        ++k;
    }
    return k;
}

SeriesResult gamma(const TwistedEquation& eq, CirclePoint theta, double tol) {
    SeriesResult out;
    if (eq.v.is_zero()) {
        return out;
    }
    const int terms = gamma_term_count(eq, tol);
    CirclePoint p = theta;
    double sum = 0.0;
    double w = 1.0;
    for (int k = 1; k <= terms; ++k) {
        p = eq.psi.step_back(p);
        sum = sum + w * eq.v.value(p);
        w = w * eq.lam;
    }
    out.value = sum;
    out.terms_used = terms;
    out.tail_bound = eq.v.sup_abs() * std::pow(eq.lam, terms) / ((1.0 - eq.lam) * eq.lam);
    out.converged = out.tail_bound <= tol;
    return out;
}

std::vector<double> gamma_batch(const TwistedEquation& eq, std::span<const double> thetas, double tol) {
    const std::size_t lanes = thetas.size();
    std::vector<double> out(lanes, 0.0);
    if (eq.v.is_zero() || lanes == 0) {
        return out;
    }
    const std::size_t terms = static_cast<std::size_t>(gamma_term_count(eq, tol));
    std::vector<double> values(terms * lanes);
    parallel_for(lanes, [&](std::size_t i) {
        CirclePoint p = CirclePoint::from(thetas[i]);
        for (std::size_t k = 0; k < terms; ++k) {
            p = eq.psi.step_back(p);
            values[k * lanes + i] = eq.v.value(p);
        }
    });
    kernels::geometric_weighted_sum(eq.lam, values, terms, out);
    return out;
}

SeriesResult beta(const TwistedEquation& eq, CirclePoint theta, double tol, double eta) {
    const double d0 = theta.dist_to_zero();
    if (d0 <= eta) {
        too_close("beta", theta.value(), d0, eta);
    }
    SeriesResult out;
    if (eq.v.is_zero()) {
        return out;
    }
    const long double inv_lam = 1.0L / static_cast<long double>(eq.lam);
    long double sum = 0.0L;
    long double w = 1.0L;
    RatioTail tail;
    CirclePoint p = theta;
    for (int k = 0; k < series_k_max; ++k) {
        if (p.is_fixed() && p.anchor == 0.5) {
            // The orbit sits on the sink: every remaining term is v(1/2) lam^{-j}.
            if (eq.v.value(p) != 0.0) {
                no_decay("beta", theta.value(), k);
            }
            out.value = static_cast<double>(-sum * inv_lam);
            out.tail_bound = 0.0;
            out.terms_used = k;
            return out;
        }
        const long double t = static_cast<long double>(eq.v.value(p)) * w;
        sum += t;
        if (!std::isfinite(static_cast<double>(sum))) {
            no_decay("beta", theta.value(), k);
        }
        tail.push(static_cast<double>(std::fabs(t)));
        double est = 0.0;
        if (tail.estimate(est) && est / eq.lam <= tol) {
            out.value = static_cast<double>(-sum * inv_lam);
            out.tail_bound = est / eq.lam;
            out.terms_used = k + 1;
            return out;
        }
        w *= inv_lam;
        p = eq.psi.step(p);
    }
    no_decay("beta", theta.value(), series_k_max);
}

SeriesResult alpha(const TwistedEquation& eq, CirclePoint theta, double tol, double eta) {
    const SeriesResult b = beta(eq, theta, tol, eta);
    const SeriesResult g = gamma(eq, theta, tol);
    return {g.value - b.value, g.tail_bound + b.tail_bound, g.terms_used + b.terms_used, g.converged && b.converged};
}

SeriesResult gamma_prime(const TwistedEquation& eq, CirclePoint theta, double tol, double eta_half) {
    const double dh = theta.dist_to_half();
    if (dh <= eta_half) {
        too_close("gamma'", theta.value(), dh, eta_half);
    }
    SeriesResult out;
    if (eq.v.is_zero()) {
        return out;
    }
    const double mu = eq.psi.mu();
    if (theta.is_fixed()) {
        out.value = eq.v.slope(theta) / (mu - eq.lam);
        return out;
    }
    double sum = 0.0;
    double w = 1.0;
    RatioTail tail;
    CirclePoint p = theta;
    for (int k = 1; k <= series_k_max; ++k) {
        p = eq.psi.step_back(p);
        const double d = eq.psi.deriv(p);
        w = (k == 1) ? 1.0 / d : w * eq.lam / d;
        const double t = eq.v.slope(p) * w;
        if (p.is_fixed()) {
            // Reached the source exactly: the rest is geometric with ratio lam/mu.
            out.value = sum + t / (1.0 - eq.lam / mu);
            out.terms_used = k;
            return out;
        }
        sum += t;
        tail.push(std::abs(t));
        double est = 0.0;
        if (tail.estimate(est) && est <= tol) {
            out.value = sum;
            out.tail_bound = est;
            out.terms_used = k;
            return out;
        }
    }
    no_decay("gamma'", theta.value(), series_k_max);
}

SeriesResult beta_prime(const TwistedEquation& eq, CirclePoint theta, double tol, double eta_zero) {
    const double d0 = theta.dist_to_zero();
    if (d0 <= eta_zero) {
        too_close("beta'", theta.value(), d0, eta_zero);
    }
    SeriesResult out;
    if (eq.v.is_zero()) {
        return out;
    }
    const double sigma = eq.psi.sigma();
    const long double lam = eq.lam;
    long double sum = 0.0L;
    long double w = 1.0L;
    RatioTail tail;
    CirclePoint p = theta;
    for (int k = 0; k < series_k_max; ++k) {
        if (p.is_fixed() && p.anchor == 0.5) {
            // On the sink the remaining terms are geometric with ratio sigma/lam.
            const double slope = eq.v.slope(p);
            if (slope != 0.0 && !(sigma < eq.lam)) {
                no_decay("beta'", theta.value(), k);
            }
            sum += static_cast<long double>(slope) * w / (1.0L - static_cast<long double>(sigma) / lam);
            out.value = static_cast<double>(-sum / lam);
            out.terms_used = k;
            return out;
        }
        const long double t = static_cast<long double>(eq.v.slope(p)) * w;
        sum += t;
        if (!std::isfinite(static_cast<double>(sum))) {
            no_decay("beta'", theta.value(), k);
        }
        tail.push(static_cast<double>(std::fabs(t)));
        double est = 0.0;
        if (tail.estimate(est) && est / eq.lam <= tol) {
            out.value = static_cast<double>(-sum / lam);
            out.tail_bound = est / eq.lam;
            out.terms_used = k + 1;
            return out;
        }
        w *= static_cast<long double>(eq.psi.deriv(p)) / lam;
        p = eq.psi.step(p);
    }
    no_decay("beta'", theta.value(), series_k_max);
}

SeriesResult alpha_prime(const TwistedEquation& eq, CirclePoint theta, double tol, double eta_half,
                         double eta_zero) {
    const SeriesResult g = gamma_prime(eq, theta, tol, eta_half);
    const SeriesResult b = beta_prime(eq, theta, tol, eta_zero);
    return {g.value - b.value, g.tail_bound + b.tail_bound, g.terms_used + b.terms_used, g.converged && b.converged};
}

double residual_twisted(const std::function<double(double)>& u, const TwistedEquation& eq, double theta) {
    const double image = eq.psi(theta);
    return std::abs(u(image) - eq.lam * u(theta) - eq.v.value(theta));
}

double residual_twisted(const std::function<double(CirclePoint)>& u, const TwistedEquation& eq, CirclePoint theta) {
    return std::abs(u(eq.psi.step(theta)) - eq.lam * u(theta) - eq.v.value(theta));
}

} // namespace coherence
