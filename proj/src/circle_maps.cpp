#include "coherence/circle_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coherence/errors.hpp"

namespace coherence {

double HermitePiece::value(double x) const {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
}

double HermitePiece::slope(double x) const {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    const double d00 = 6.0 * t2 - 6.0 * t;
    const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double d01 = -6.0 * t2 + 6.0 * t;
    const double d11 = 3.0 * t2 - 2.0 * t;
    return (d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1;
}

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

} // namespace

MorseSmaleMap MorseSmaleMap::sine(double kappa) {
    if (!(kappa > 0.0)) {
        throw Error(ErrorKind::ConditionViolated, "kappa = " + fmt(kappa) + " must be positive (mu > 1)");
    }
    if (!(kappa < 1.0 / two_pi)) {
        throw Error(ErrorKind::ConditionViolated,
                    "psi not monotone: kappa = " + fmt(kappa) + " >= 1/(2 pi) makes psi'(1/2) <= 0");
    }
    MorseSmaleMap m;
    m.family_ = MapFamily::Sine;
    m.kappa_ = kappa;
    m.mu_ = 1.0 + two_pi * kappa;
    m.sigma_ = 1.0 - two_pi * kappa;
    m.max_deriv_ = m.mu_;
    return m;
}

MorseSmaleMap MorseSmaleMap::symmetric(double sigma, double mu, double delta_half, double delta_zero) {
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw Error(ErrorKind::ConditionViolated, "sigma = " + fmt(sigma) + " must lie in (0,1)");
    }
    if (!(mu > 1.0)) {
        throw Error(ErrorKind::ConditionViolated, "mu = " + fmt(mu) + " must exceed 1");
    }
    if (!(delta_half > 0.0 && delta_zero > 0.0 && delta_half + delta_zero < 0.5)) {
        throw Error(ErrorKind::GeometryInfeasible,
                    "affine half-widths " + fmt(delta_half) + ", " + fmt(delta_zero) + " do not fit in (0, 1/2)");
    }
    HermitePiece h{delta_zero, 0.5 - delta_half, mu * delta_zero, 0.5 - sigma * delta_half, mu, sigma};
    const double secant = (h.y1 - h.y0) / (h.x1 - h.x0);
    if (!(secant > 0.0)) {
        throw Error(ErrorKind::GeometryInfeasible, "affine pieces overlap in the image: psi(delta_zero) >= psi(1/2 - delta_half)");
    }
    // Fritsch-Carlson sufficient condition for a monotone cubic Hermite piece.
    const double a = h.m0 / secant;
    const double b = h.m1 / secant;
    if (a * a + b * b > 9.0) {
        throw Error(ErrorKind::GeometryInfeasible,
                    "cubic join is not monotone (alpha^2 + beta^2 = " + fmt(a * a + b * b) + " > 9)");
    }

    MorseSmaleMap m;
    m.family_ = MapFamily::PiecewiseSymmetric;
    m.sigma_ = sigma;
    m.mu_ = mu;
    m.delta_half_ = delta_half;
    m.delta_zero_ = delta_zero;
    m.hermite_ = h;

    double max_d = mu;
    double min_d = sigma;
    constexpr int samples = 4096;
    for (int i = 0; i <= samples; ++i) {
        const double x = h.x0 + (h.x1 - h.x0) * i / samples;
        const double s = h.slope(x);
        max_d = std::max(max_d, s);
        min_d = std::min(min_d, s);
    }
    if (!(min_d > 0.0)) {
        throw Error(ErrorKind::GeometryInfeasible, "cubic join has non-positive slope " + fmt(min_d));
    }
    m.max_deriv_ = max_d;
    return m;
}

void check_ph_inequalities(double sigma, double mu, double lam) {
    if (!(lam > 0.0 && lam < 1.0)) {
        throw Error(ErrorKind::ConditionViolated, "lambda = " + fmt(lam) + " must lie in (0,1)");
    }
    if (!(sigma < lam)) {
        throw Error(ErrorKind::ConditionViolated, "sigma < lambda fails: sigma = " + fmt(sigma) + " >= lambda = " + fmt(lam));
    }
    if (!(mu > 1.0)) {
        throw Error(ErrorKind::ConditionViolated, "1 < mu fails: mu = " + fmt(mu));
    }
    if (!(mu < 1.0 / lam)) {
        throw Error(ErrorKind::ConditionViolated,
                    "mu < 1/lambda fails: mu = " + fmt(mu) + " >= 1/lambda = " + fmt(1.0 / lam));
    }
}

MorseSmaleMap make_sine_map(double kappa, double lam) {
    MorseSmaleMap m = MorseSmaleMap::sine(kappa);
    check_ph_inequalities(m.sigma(), m.mu(), lam);
    return m;
}

MorseSmaleMap make_symmetric_map(double sigma, double mu, double lam, double delta_half, double delta_zero) {
    check_ph_inequalities(sigma, mu, lam);
    return MorseSmaleMap::symmetric(sigma, mu, delta_half, delta_zero);
}

double MorseSmaleMap::eval_unit(double r) const {
    const double dz = delta_zero_;
    const double dh = delta_half_;
    if (r <= dz) {
        return mu_ * r;
    }
    if (r >= 1.0 - dz) {
        return 1.0 + mu_ * (r - 1.0);
    }
    if (std::abs(r - 0.5) <= dh) {
        return 0.5 + sigma_ * (r - 0.5);
    }
    if (r < 0.5) {
        return hermite_.value(r);
    }
    return 1.0 - hermite_.value(1.0 - r);
}

double MorseSmaleMap::deriv_unit(double r) const {
    const double dz = delta_zero_;
    const double dh = delta_half_;
    if (r <= dz || r >= 1.0 - dz) {
        return mu_;
    }
    if (std::abs(r - 0.5) <= dh) {
        return sigma_;
    }
    if (r < 0.5) {
        return hermite_.slope(r);
    }
    return hermite_.slope(1.0 - r);
}

double MorseSmaleMap::lift_offset(double anchor, double delta) const {
    if (family_ == MapFamily::Sine) {
        const double s = std::abs(delta) <= 0.25 ? sin_2pi(CirclePoint{anchor, delta}) : sin_2pi(anchor + delta);
        return delta + kappa_ * s;
    }
    if (anchor == 0.5 && std::abs(delta) <= delta_half_) {
        return sigma_ * delta;
    }
    if (anchor == 0.0 && std::abs(delta) <= delta_zero_) {
        return mu_ * delta;
    }
    const double theta = anchor + delta;
    const double n = std::floor(theta);
    double r = theta - n;
    if (r >= 1.0) {
        r = 0.0;
    }
    return eval_unit(r) + n - anchor;
}

double MorseSmaleMap::lift_deriv(double anchor, double delta) const {
    if (family_ == MapFamily::Sine) {
        const double c = std::abs(delta) <= 0.25 ? cos_2pi(CirclePoint{anchor, delta}) : cos_2pi(anchor + delta);
        return 1.0 + two_pi * kappa_ * c;
    }
    if (anchor == 0.5 && std::abs(delta) <= delta_half_) {
        return sigma_;
    }
    if (anchor == 0.0 && std::abs(delta) <= delta_zero_) {
        return mu_;
    }
    return deriv_unit(wrap01(anchor + delta));
}

CirclePoint MorseSmaleMap::step(CirclePoint p) const {
    return CirclePoint::normalized(p.anchor, lift_offset(p.anchor, p.offset));
}

double MorseSmaleMap::deriv(CirclePoint p) const { return lift_deriv(p.anchor, p.offset); }

CirclePoint MorseSmaleMap::step_back(CirclePoint p, double tol) const {
    const double target = p.offset;
    const double anchor = p.anchor;
    if (target == 0.0) {
        return p;
    }
    if (family_ == MapFamily::PiecewiseSymmetric) {
        if (anchor == 0.5 && std::abs(target) <= sigma_ * delta_half_) {
            return CirclePoint::normalized(anchor, target / sigma_);
        }
        if (anchor == 0.0 && std::abs(target) <= mu_ * delta_zero_) {
            return CirclePoint::normalized(anchor, target / mu_);
        }
    }

    // The displacement psi(t) - t stays inside (-1/2, 1/2), so this brackets the preimage.
    double lo = target - 0.5;
    double hi = target + 0.5;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (lift_offset(anchor, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const double f = lift_offset(anchor, x) - target;
        if (f == 0.0) {
            break;
        }
        if (f > 0.0) {
            hi = std::min(hi, x);
        } else {
            lo = std::max(lo, x);
        }
        double next = x - f / lift_deriv(anchor, x);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double dx = std::abs(next - x);
        x = next;
        if (dx <= 1e-15 * std::abs(x) || dx == 0.0) {
            break;
        }
    }
    const double residual = std::abs(lift_offset(anchor, x) - target);
    if (!(residual < tol)) {
        throw Error(ErrorKind::NoConvergence, "inverse at theta = " + fmt(p.value()) + " left residual " +
                                                  fmt(residual) + " >= tol " + fmt(tol));
    }
    return CirclePoint::normalized(anchor, x);
}

OrbitSegment orbit(const MorseSmaleMap& psi, CirclePoint start, int k, Direction direction) {
    OrbitSegment seg;
    seg.base = start.value();
    seg.direction = direction;
    seg.length = k;
    seg.points.reserve(static_cast<std::size_t>(k) + 1);
    seg.cocycle.reserve(static_cast<std::size_t>(k) + 1);
    seg.anchored.reserve(static_cast<std::size_t>(k) + 1);

    CirclePoint p = start;
    double c = 1.0;
    seg.anchored.push_back(p);
    seg.points.push_back(p.value());
    seg.cocycle.push_back(c);
    for (int i = 0; i < k; ++i) {
        if (direction == Direction::Forward) {
            c *= psi.deriv(p);
            p = psi.step(p);
        } else {
            p = psi.step_back(p);
            c /= psi.deriv(p);
        }
        seg.anchored.push_back(p);
        seg.points.push_back(p.value());
        seg.cocycle.push_back(c);
    }
    return seg;
}

OrbitSegment orbit(const MorseSmaleMap& psi, double theta, int k, Direction direction) {
    return orbit(psi, CirclePoint::from(theta), k, direction);
}

namespace {

struct RatioRange {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;

    void add(double r) {
        if (!std::isfinite(r) || !(r > 0.0)) {
            throw Error(ErrorKind::SampleDegenerate, "non-finite or non-positive comparison ratio " + fmt(r));
        }
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    double c0() const { return std::min(lo, 1.0 / hi); }
};

} // namespace

ComparisonConstants comparison_constants(const MorseSmaleMap& psi, double eps0, int sample_size, int k_max) {
    if (!(eps0 > 0.0) || sample_size < 1 || k_max < 0) {
        throw Error(ErrorKind::SampleDegenerate, "comparison window needs eps0 > 0, a sample and k_max >= 0");
    }
    const double sigma = psi.sigma();
    const double mu = psi.mu();
    RatioRange fwd_deriv, bwd_deriv, fwd_dist, bwd_dist;

    for (int i = 0; i < sample_size; ++i) {
        const double u = sample_size == 1 ? 0.0 : -1.0 + 2.0 * i / (sample_size - 1);
        const double offset = eps0 * u;

        // forward from the sink window
        {
            CirclePoint p = CirclePoint::normalized(0.5, offset);
            const double d0 = p.dist_to_half();
            double cocycle = 1.0;
            double scale = 1.0;
            for (int k = 0; k <= k_max; ++k) {
                fwd_deriv.add(cocycle / scale);
                if (d0 > 0.0) {
                    fwd_dist.add(p.dist_to_half() / (scale * d0));
                }
                cocycle *= psi.deriv(p);
                p = psi.step(p);
                scale *= sigma;
            }
        }
        // backward from the source window
        {
            CirclePoint p = CirclePoint::normalized(0.0, offset);
            const double d0 = p.dist_to_zero();
            double cocycle = 1.0;
            double scale = 1.0;
            for (int k = 0; k <= k_max; ++k) {
                bwd_deriv.add(cocycle / scale);
                if (d0 > 0.0) {
                    bwd_dist.add(p.dist_to_zero() / (scale * d0));
                }
                p = psi.step_back(p);
                cocycle /= psi.deriv(p);
                scale /= mu;
            }
        }
    }

    ComparisonConstants out;
    out.c0_deriv = std::min(fwd_deriv.c0(), bwd_deriv.c0());
    out.c0_dist = std::min(fwd_dist.lo == std::numeric_limits<double>::infinity() ? 1.0 : fwd_dist.c0(),
                           bwd_dist.lo == std::numeric_limits<double>::infinity() ? 1.0 : bwd_dist.c0());
    out.c0 = std::min(out.c0_deriv, out.c0_dist);
    if (!(out.c0 >= 1e-6)) {
        throw Error(ErrorKind::SampleDegenerate,
                    "comparison constant c0 = " + fmt(out.c0) + " below 1e-6; eps0 = " + fmt(eps0) +
                        " reaches beyond the linearization window");
    }
    return out;
}

} // namespace coherence
