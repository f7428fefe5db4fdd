#pragma once

#include <string_view>
#include <vector>

#include "coherence/core_linear.hpp"

namespace coherence {

enum class ProfileFamily { CosBump, OddSine, Constant, Zero, CustomTable };

enum class SignPattern { Positive, Negative, Mixed, Zero };

std::string_view to_string(ProfileFamily f);
std::string_view to_string(SignPattern s);

/// The perturbation v : S^1 -> R pushing points along e_s.
///   CosBump      v = amplitude (1 + cos 2 pi t)
///   OddSine      v = -amplitude sin 2 pi t
///   Constant     v = amplitude
///   Zero         v = 0
///   CustomTable  periodic piecewise-linear through equispaced samples
///                (an even count, so 0 and 1/2 are nodes)
class Profile {
public:
    static Profile cos_bump(double amplitude = 1.0);
    static Profile odd_sine(double amplitude = 1.0);
    static Profile constant(double c);
    static Profile zero();
    static Profile table(std::vector<double> samples);

    ProfileFamily family() const { return family_; }
    double amplitude() const { return amplitude_; }
    const std::vector<double>& samples() const { return samples_; }

    double value(CirclePoint p) const;
    double slope(CirclePoint p) const;
    double value(double theta) const { return value(CirclePoint::from(theta)); }
    double slope(double theta) const { return slope(CirclePoint::from(theta)); }

    /// sup |v| over the circle.
    double sup_abs() const { return sup_abs_; }
    bool is_zero() const { return sup_abs_ == 0.0; }

    bool v_half_zero() const { return value(CirclePoint{0.5, 0.0}) == 0.0; }
    bool v_zero_zero() const { return value(CirclePoint{0.0, 0.0}) == 0.0; }

    /// Sign of v' sampled on (0,1/2) and (1/2,1).
    SignPattern slope_sign_lower() const { return sign_lower_; }
    SignPattern slope_sign_upper() const { return sign_upper_; }

private:
    Profile(ProfileFamily family, double amplitude, std::vector<double> samples);
    void finish();

    ProfileFamily family_;
    double amplitude_;
    std::vector<double> samples_;
    double sup_abs_ = 0.0;
    SignPattern sign_lower_ = SignPattern::Zero;
    SignPattern sign_upper_ = SignPattern::Zero;
};

} // namespace coherence
