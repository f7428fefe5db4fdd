#include <cstdlib>
#include <string>

#include "coherence/kernels.hpp"

namespace coherence::kernels {

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") != 0;
    }();
    return supported;
#else
    return false;
#endif
}

Isa active_isa() {
    static const Isa isa = [] {
        const char* env = std::getenv("COHERENCE_LAB_SIMD");
        if (env != nullptr && std::string(env) == "scalar") {
            return Isa::Scalar;
        }
        return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
    }();
    return isa;
}

void pushforward_log_growth(double lam, std::span<const double> map_slope, std::span<const double> profile_slope,
                            std::size_t steps, std::span<double> p, std::span<double> q,
                            std::span<double> log_growth) {
    if (active_isa() == Isa::Avx2) {
        avx2::pushforward_log_growth(lam, map_slope, profile_slope, steps, p, q, log_growth);
    } else {
        scalar::pushforward_log_growth(lam, map_slope, profile_slope, steps, p, q, log_growth);
    }
}

void geometric_weighted_sum(double ratio, std::span<const double> values, std::size_t terms,
                            std::span<double> out) {
    if (active_isa() == Isa::Avx2) {
        avx2::geometric_weighted_sum(ratio, values, terms, out);
    } else {
        scalar::geometric_weighted_sum(ratio, values, terms, out);
    }
}

void twisted_residual(double lam, std::span<const double> u_image, std::span<const double> u,
                      std::span<const double> v, std::span<double> out) {
    if (active_isa() == Isa::Avx2) {
        avx2::twisted_residual(lam, u_image, u, v, out);
    } else {
        scalar::twisted_residual(lam, u_image, u, v, out);
    }
}

} // namespace coherence::kernels
