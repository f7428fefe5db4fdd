#include <cmath>
#include <vector>

#include "coherence/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define COHERENCE_HAVE_X86 1
#include <immintrin.h>
#else
#define COHERENCE_HAVE_X86 0
#endif

namespace coherence::kernels::avx2 {

#if COHERENCE_HAVE_X86

// No "fma" in the target list: mul + add must round exactly like the scalar path.
#define COHERENCE_AVX2 __attribute__((target("avx2")))

namespace {

constexpr std::size_t width = 4;

COHERENCE_AVX2 void pushforward_block(double lam, const double* map_slope, const double* profile_slope,
                                      std::size_t steps, std::size_t lanes, std::size_t i, double* p, double* q,
                                      double* log_growth) {
    const __m256d lamv = _mm256_set1_pd(lam);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d pv = _mm256_loadu_pd(p + i);
    __m256d qv = _mm256_loadu_pd(q + i);
    __m256d prod = one;
    alignas(32) double prod_lanes[width];
    double acc[width] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < steps; ++k) {
        const __m256d dv = _mm256_loadu_pd(profile_slope + k * lanes + i);
        const __m256d dpsi = _mm256_loadu_pd(map_slope + k * lanes + i);
        const __m256d p1 = _mm256_add_pd(_mm256_mul_pd(lamv, pv), _mm256_mul_pd(qv, dv));
        const __m256d q1 = _mm256_mul_pd(qv, dpsi);
        const __m256d n = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(p1, p1), _mm256_mul_pd(q1, q1)));
        pv = _mm256_div_pd(p1, n);
        qv = _mm256_div_pd(q1, n);
        prod = _mm256_mul_pd(prod, n);
        if ((k + 1) % log_flush_block == 0 || k + 1 == steps) {
            _mm256_store_pd(prod_lanes, prod);
            for (std::size_t l = 0; l < width; ++l) {
                acc[l] += std::log(prod_lanes[l]);
            }
            prod = one;
        }
    }
    _mm256_storeu_pd(p + i, pv);
    _mm256_storeu_pd(q + i, qv);
    for (std::size_t l = 0; l < width; ++l) {
        log_growth[i + l] = acc[l];
    }
}

COHERENCE_AVX2 void weighted_sum_block(double ratio, const double* values, std::size_t terms, std::size_t lanes,
                                       std::size_t i, double* out) {
    const __m256d r = _mm256_set1_pd(ratio);
    __m256d sum = _mm256_setzero_pd();
    __m256d w = _mm256_set1_pd(1.0);
    for (std::size_t k = 0; k < terms; ++k) {
        sum = _mm256_add_pd(sum, _mm256_mul_pd(w, _mm256_loadu_pd(values + k * lanes + i)));
        w = _mm256_mul_pd(w, r);
    }
    _mm256_storeu_pd(out + i, sum);
}

COHERENCE_AVX2 void residual_block(double lam, const double* u_image, const double* u, const double* v,
                                   std::size_t i, double* out) {
    const __m256d lamv = _mm256_set1_pd(lam);
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d diff = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_loadu_pd(u_image + i), _mm256_mul_pd(lamv, _mm256_loadu_pd(u + i))),
        _mm256_loadu_pd(v + i));
    _mm256_storeu_pd(out + i, _mm256_andnot_pd(sign, diff));
}

} // namespace

void pushforward_log_growth(double lam, std::span<const double> map_slope, std::span<const double> profile_slope,
                            std::size_t steps, std::span<double> p, std::span<double> q,
                            std::span<double> log_growth) {
    if (!avx2_supported()) {
        scalar::pushforward_log_growth(lam, map_slope, profile_slope, steps, p, q, log_growth);
        return;
    }
    const std::size_t lanes = p.size();
    std::size_t i = 0;
    for (; i + width <= lanes; i += width) {
        pushforward_block(lam, map_slope.data(), profile_slope.data(), steps, lanes, i, p.data(), q.data(),
                          log_growth.data());
    }
    // Tail lanes: run the reference on a compacted copy.
    if (i < lanes) {
        const std::size_t rest = lanes - i;
        std::vector<double> ms(steps * rest), ps(steps * rest);
        for (std::size_t k = 0; k < steps; ++k) {
            for (std::size_t l = 0; l < rest; ++l) {
                ms[k * rest + l] = map_slope[k * lanes + i + l];
                ps[k * rest + l] = profile_slope[k * lanes + i + l];
            }
        }
        scalar::pushforward_log_growth(lam, ms, ps, steps, p.subspan(i), q.subspan(i), log_growth.subspan(i));
    }
}

void geometric_weighted_sum(double ratio, std::span<const double> values, std::size_t terms,
                            std::span<double> out) {
    if (!avx2_supported()) {
        scalar::geometric_weighted_sum(ratio, values, terms, out);
        return;
    }
    const std::size_t lanes = out.size();
    std::size_t i = 0;
    for (; i + width <= lanes; i += width) {
        weighted_sum_block(ratio, values.data(), terms, lanes, i, out.data());
    }
    for (; i < lanes; ++i) {
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
    if (!avx2_supported()) {
        scalar::twisted_residual(lam, u_image, u, v, out);
        return;
    }
    std::size_t i = 0;
    for (; i + width <= out.size(); i += width) {
        residual_block(lam, u_image.data(), u.data(), v.data(), i, out.data());
    }
    scalar::twisted_residual(lam, u_image.subspan(i), u.subspan(i), v.subspan(i), out.subspan(i));
}

#else

void pushforward_log_growth(double lam, std::span<const double> map_slope, std::span<const double> profile_slope,
                            std::size_t steps, std::span<double> p, std::span<double> q,
                            std::span<double> log_growth) {
    scalar::pushforward_log_growth(lam, map_slope, profile_slope, steps, p, q, log_growth);
}

void geometric_weighted_sum(double ratio, std::span<const double> values, std::size_t terms,
                            std::span<double> out) {
    scalar::geometric_weighted_sum(ratio, values, terms, out);
}

void twisted_residual(double lam, std::span<const double> u_image, std::span<const double> u,
                      std::span<const double> v, std::span<double> out) {
    scalar::twisted_residual(lam, u_image, u, v, out);
}

#endif

} // namespace coherence::kernels::avx2
