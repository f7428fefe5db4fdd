#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "coherence/bundles.hpp"

namespace coherence {

/// Everything a lab run needs, as read from a key = value file with sections.
struct LabConfig {
    std::string example = "nondc";
    std::array<long, 4> matrix{2, 1, 1, 1};

    MapFamily map_family = MapFamily::Sine;
    double kappa = 0.15;
    double sigma = 0.0; // symmetric family
    double mu = 0.0;
    double delta_half = 0.05;
    double delta_zero = 0.05;

    ProfileFamily profile_family = ProfileFamily::CosBump;
    double amplitude = 1.0;
    std::vector<double> table;

    double tol = 1e-10;
    double eta_half = default_exclusion;
    double eta_zero = default_exclusion;
    int grid_n = 1000;
    int horizon = 8;
    int max_horizon = 20;
    /// Off only for deliberately broken systems (e.g. sigma >= lam).
    bool enforce_ph_inequalities = true;
    std::string output_dir = "out";
};

/// Validated defaults for "nondc" (sine map, cos bump) and "nonlui"
/// (symmetric map with sigma = 0.95 lam, mu = 1.05, odd sine).
LabConfig default_config(std::string_view example);

/// Throws InvalidConfig on syntax errors, unknown keys or bad values.
LabConfig parse_config(std::string_view text);
/// Throws IoError when the file cannot be read.
LabConfig read_config(const std::string& path);
/// Canonical text; parse_config(write_config(c)) reproduces c exactly. A
/// [derived] section with lambda, mu, sigma is informational and ignored on read.
std::string write_config(const LabConfig& c);

/// 64-bit FNV-1a of the canonical config text.
std::uint64_t config_digest(const LabConfig& c);
std::string digest_hex(std::uint64_t digest);

/// Builds the system, running every constructor check.
SkewProduct build_system(const LabConfig& c);

std::string_view to_string(MapFamily f);

} // namespace coherence
