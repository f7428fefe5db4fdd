#include <cmath>

#include "coherence/kernels.hpp"

namespace coherence::kernels::scalar {

void pushforward_log_growth(double lam, std::span<const double> map_slope, std::span<const double> profile_slope,
                            std::size_t steps, std::span<double> p, std::span<double> q,
                            std::span<double> log_growth) {
    const std::size_t lanes = p.size();
    for (std::size_t i = 0; i < lanes; ++i) {
        double pi = p[i];
        double qi = q[i];
        double prod = 1.0;
        double acc = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            const double dv = profile_slope[k * lanes + i];
            const double dpsi = map_slope[k * lanes + i];
            const double p1 = lam * pi + qi * dv;
            const double q1 = qi * dpsi;
            const double n = std::sqrt(p1 * p1 + q1 * q1);
            pi = p1 / n;
            qi = q1 / n;
            prod = prod * n;
            if ((k + 1) % log_flush_block == 0 || k + 1 == steps) {
                acc += std::log(prod);
                prod = 1.0;
            }
        }
        p[i] = pi;
        q[i] = qi;
        log_growth[i] = acc;
    }
}

void geometric_weighted_sum(double ratio, std::span<const double> values, std::size_t terms,
                            std::span<double> out) {
    const std::size_t lanes = out.size();
    for (std::size_t i = 0; i < lanes; ++i) {
        double sum = 0.0;
        double w = 1.0;
        for (std::size_t k = 0; k < terms; ++k) {
            sum = sum + w * values[k * lanes + i];
            w = w * ratio;
        }
        out[i] = sum;
    }
}

void twisted_residual(double lam, std::span<const double> u_image, std::span<const double> u,
                      std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::abs((u_image[i] - lam * u[i]) - v[i]);
    }
}

} // namespace coherence::kernels::scalar
