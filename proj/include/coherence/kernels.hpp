#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant that performs the same IEEE operations in the same order per lane,
// so the two agree bit for bit. Dispatch happens once, at first use.
//
// Layouts are structure-of-arrays: table[step * lanes + lane].

#include <cstddef>
#include <span>
#include <string_view>

namespace coherence::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

bool avx2_supported();

/// The ISA the dispatching entry points use. COHERENCE_LAB_SIMD=scalar forces
/// the reference path.
Isa active_isa();

/// Push the (e_s, d/dtheta) vectors (p[i], q[i]) through the upper triangular
/// cocycle [[lam, profile_slope], [0, map_slope]] for `steps` steps,
/// renormalizing every step. log_growth[i] receives the sum of log norms;
/// (p, q) are left holding the final unit vectors.
void pushforward_log_growth(double lam, std::span<const double> map_slope, std::span<const double> profile_slope,
                            std::size_t steps, std::span<double> p, std::span<double> q,
                            std::span<double> log_growth);

/// out[i] = sum_k ratio^k values[k * lanes + i], accumulated in increasing k.
void geometric_weighted_sum(double ratio, std::span<const double> values, std::size_t terms,
                            std::span<double> out);

/// out[i] = |u_image[i] - lam u[i] - v[i]|.
void twisted_residual(double lam, std::span<const double> u_image, std::span<const double> u,
                      std::span<const double> v, std::span<double> out);

namespace scalar {
void pushforward_log_growth(double lam, std::span<const double> map_slope, std::span<const double> profile_slope,
                            std::size_t steps, std::span<double> p, std::span<double> q,
                            std::span<double> log_growth);
void geometric_weighted_sum(double ratio, std::span<const double> values, std::size_t terms,
                            std::span<double> out);
void twisted_residual(double lam, std::span<const double> u_image, std::span<const double> u,
                      std::span<const double> v, std::span<double> out);
} // namespace scalar

namespace avx2 {
// Callable only when avx2_supported(); otherwise they forward to scalar.
void pushforward_log_growth(double lam, std::span<const double> map_slope, std::span<const double> profile_slope,
                            std::size_t steps, std::span<double> p, std::span<double> q,
                            std::span<double> log_growth);
void geometric_weighted_sum(double ratio, std::span<const double> values, std::size_t terms,
                            std::span<double> out);
void twisted_residual(double lam, std::span<const double> u_image, std::span<const double> u,
                      std::span<const double> v, std::span<double> out);
} // namespace avx2

/// Number of steps folded into one product before taking its log.
inline constexpr std::size_t log_flush_block = 8;

} // namespace coherence::kernels
