#include "coherence/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coherence/errors.hpp"

namespace coherence {

std::string_view to_string(ProfileFamily f) {
    switch (f) {
    case ProfileFamily::CosBump: return "cos_bump";
    case ProfileFamily::OddSine: return "odd_sine";
    case ProfileFamily::Constant: return "constant";
    case ProfileFamily::Zero: return "zero";
    case ProfileFamily::CustomTable: return "custom_table";
    }
    return "unknown";
}

std::string_view to_string(SignPattern s) {
    switch (s) {
    case SignPattern::Positive: return "positive";
    case SignPattern::Negative: return "negative";
    case SignPattern::Mixed: return "mixed";
    case SignPattern::Zero: return "zero";
    }
    return "unknown";
}

Profile::Profile(ProfileFamily family, double amplitude, std::vector<double> samples)
    : family_(family), amplitude_(amplitude), samples_(std::move(samples)) {
    finish();
}

Profile Profile::cos_bump(double amplitude) { return Profile(ProfileFamily::CosBump, amplitude, {}); }
Profile Profile::odd_sine(double amplitude) { return Profile(ProfileFamily::OddSine, amplitude, {}); }
Profile Profile::constant(double c) { return Profile(ProfileFamily::Constant, c, {}); }
Profile Profile::zero() { return Profile(ProfileFamily::Zero, 0.0, {}); }

Profile Profile::table(std::vector<double> samples) {
    if (samples.size() < 2 || samples.size() % 2 != 0) {
        throw Error(ErrorKind::InvalidConfig, "custom profile table needs an even number (>= 2) of samples");
    }
    for (double s : samples) {
        if (!std::isfinite(s)) {
            throw Error(ErrorKind::InvalidConfig, "custom profile table has a non-finite sample");
        }
    }
    return Profile(ProfileFamily::CustomTable, 1.0, std::move(samples));
}

namespace {

// Linear interpolation anchored at the nearest node so that values near the
// nodes 0 and 1/2 keep relative precision in the offset.
struct TableLookup {
    double value;
    double slope;
};

TableLookup table_lookup(const std::vector<double>& s, CirclePoint p) {
    const long n = static_cast<long>(s.size());
    const double nd = static_cast<double>(n);
    const double anchor_node = p.anchor * nd; // integer: n is even
    const double scaled = p.offset * nd;
    const double nearest = std::round(scaled);
    const double u = scaled - nearest; // in [-1/2, 1/2], exact near the anchor
    long m = static_cast<long>(anchor_node + nearest) % n;
    if (m < 0) {
        m += n;
    }
    const double vm = s[static_cast<std::size_t>(m)];
    const double vnext = s[static_cast<std::size_t>((m + 1) % n)];
    const double vprev = s[static_cast<std::size_t>((m - 1 + n) % n)];
    if (u >= 0.0) {
        const double k = (vnext - vm) * nd;
        return {vm + (vnext - vm) * u, k};
    }
    const double k = (vm - vprev) * nd;
    return {vm + (vm - vprev) * u, k};
}

} // namespace

double Profile::value(CirclePoint p) const {
    switch (family_) {
    case ProfileFamily::CosBump: {
        if (p.anchor == 0.5) {
            // 1 + cos(2 pi (1/2 + d)) = 2 sin^2(pi d)
            const double s = std::sin(0.5 * two_pi * p.offset);
            return amplitude_ * 2.0 * s * s;
        }
        return amplitude_ * (1.0 + cos_2pi(p));
    }
    case ProfileFamily::OddSine: return -amplitude_ * sin_2pi(p);
    case ProfileFamily::Constant: return amplitude_;
    case ProfileFamily::Zero: return 0.0;
    case ProfileFamily::CustomTable: return table_lookup(samples_, p).value;
    }
    return 0.0;
}

double Profile::slope(CirclePoint p) const {
    switch (family_) {
    case ProfileFamily::CosBump: return -two_pi * amplitude_ * sin_2pi(p);
    case ProfileFamily::OddSine: return -two_pi * amplitude_ * cos_2pi(p);
    case ProfileFamily::Constant: return 0.0;
    case ProfileFamily::Zero: return 0.0;
    case ProfileFamily::CustomTable: return table_lookup(samples_, p).slope;
    }
    return 0.0;
}

void Profile::finish() {
    switch (family_) {
    case ProfileFamily::CosBump: sup_abs_ = 2.0 * std::abs(amplitude_); break;
    case ProfileFamily::OddSine: sup_abs_ = std::abs(amplitude_); break;
    case ProfileFamily::Constant: sup_abs_ = std::abs(amplitude_); break;
    case ProfileFamily::Zero: sup_abs_ = 0.0; break;
    case ProfileFamily::CustomTable: {
        sup_abs_ = 0.0;
        for (double s : samples_) {
            sup_abs_ = std::max(sup_abs_, std::abs(s));
        }
        break;
    }
    }

    auto classify = [this](double lo, double hi) {
        constexpr int samples = 1000;
        bool pos = false;
        bool neg = false;
        for (int i = 1; i < samples; ++i) {
            const double t = lo + (hi - lo) * i / samples;
            const double d = slope(t);
            pos = pos || d > 0.0;
            neg = neg || d < 0.0;
        }
        if (pos && neg) {
            return SignPattern::Mixed;
        }
        if (pos) {
            return SignPattern::Positive;
        }
        return neg ? SignPattern::Negative : SignPattern::Zero;
    };
    sign_lower_ = classify(0.0, 0.5);
    sign_upper_ = classify(0.5, 1.0);
}

} // namespace coherence
