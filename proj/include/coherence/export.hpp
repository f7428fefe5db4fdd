#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "coherence/bundles.hpp"
#include "coherence/geometry.hpp"

namespace coherence {

/// %.17g, so text reproduces the double exactly.
std::string format_double(double x);

nlohmann::json to_json(const CertificationReport& r);
nlohmann::json to_json(const ExponentFit& fit);
nlohmann::json to_json(const WitnessReport& w);
nlohmann::json to_json(const PositivityResult& p);
nlohmann::json to_json(const AlphaPrimeScan& s);

/// Columns k, x1, x2, theta, lifted_s_displacement; coordinates wrapped to [0,1).
std::string curve_csv(const CurveSample& c);
/// Columns k, distance_to_half.
std::string probe_csv(const AttractorRecord& r);

/// Writes through a temporary file in the same directory and renames it into
/// place, so a failed run never leaves a partial file. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace coherence
