#include "coherence/export.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coherence/errors.hpp"

namespace coherence {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json to_json(const CertificationReport& r) {
    json rows = json::array();
    for (const CertificationRow& row : r.rows) {
        rows.push_back({row.theta, row.g_s, row.g_c, row.g_u});
    }
    json out = {
        {"gridSpec", {{"n", r.grid.n}, {"eta_half", r.grid.eta_half}, {"eta_zero", r.grid.eta_zero},
                      {"points", r.rows.size()}}},
        {"N", r.horizon},
        {"rows", rows},
        {"margins",
         {{"min_gc_over_gs", r.margins.center_over_stable},
          {"min_gu_over_gc", r.margins.unstable_over_center},
          {"max_gs", r.margins.max_stable}}},
        {"verdict", r.verdict},
    };
    if (r.failure) {
        out["error"] = std::string(error_name(*r.failure));
        out["message"] = r.message;
    }
    return out;
}

json to_json(const ExponentFit& fit) {
    json samples = json::array();
    for (std::size_t i = 0; i < fit.offsets.size(); ++i) {
        samples.push_back({{"j", fit.j_values[i]},
                           {"offset", fit.offsets[i]},
                           {"log_d", fit.log_distance[i]},
                           {"log_abs_value", fit.log_value[i]}});
    }
    return {{"which", std::string(to_string(fit.which))},
            {"samples", samples},
            {"fitted_slope", fit.slope},
            {"intercept", fit.intercept},
            {"predicted_exponent", fit.predicted},
            {"relative_deviation", fit.relative_deviation}};
}

json to_json(const WitnessReport& w) {
    json samples = json::array();
    for (const WitnessSample& s : w.samples) {
        samples.push_back({s.theta, s.gamma_prime});
    }
    return {{"example", w.example},
            {"sign_lower", std::string(to_string(w.sign_lower))},
            {"sign_upper", std::string(to_string(w.sign_upper))},
            {"verdict", std::string(to_string(w.verdict))},
            {"discarded", w.discarded},
            {"samples", samples}};
}

json to_json(const PositivityResult& p) {
    const PositivityConstants& c = p.constants;
    return {{"theta0", c.theta0},   {"theta_star", c.theta_star}, {"domain_hi", c.domain_hi},
            {"C1", c.c1},           {"C2", c.c2},                 {"C3", c.c3},
            {"sigma_over_lambda", c.ratio}, {"lhs", p.lhs},       {"N", p.n_used},
            {"limit", p.limit},     {"verdict", p.verdict}};
}

json to_json(const AlphaPrimeScan& s) {
    return {{"min_abs_alpha_prime", s.min_abs},
            {"at_theta", s.min_abs_theta},
            {"sign_lower", std::string(to_string(s.sign_lower))},
            {"sign_upper", std::string(to_string(s.sign_upper))},
            {"max_functional_residual", s.max_functional_residual},
            {"samples", s.samples},
            {"degenerate", s.degenerate}};
}

std::string curve_csv(const CurveSample& c) {
    std::ostringstream o;
    o << "k,x1,x2,theta,lifted_s_displacement\n";
    for (std::size_t k = 0; k < c.points.size(); ++k) {
        const Point3 w = wrap_point(c.points[k].x1, c.points[k].x2, c.points[k].theta);
        o << k << ',' << format_double(w.x1) << ',' << format_double(w.x2) << ',' << format_double(w.theta) << ','
          << format_double(c.s_displacement[k]) << '\n';
    }
    return o.str();
}

std::string probe_csv(const AttractorRecord& r) {
    std::ostringstream o;
    o << "k,distance_to_half\n";
    for (std::size_t k = 0; k < r.distance.size(); ++k) {
        o << k << ',' << format_double(r.distance[k]) << '\n';
    }
    return o.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            throw Error(ErrorKind::IoError, "cannot create directory '" + target.parent_path().string() + "'");
        }
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
        }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot move output into '" + path + "'");
    }
}

} // namespace coherence
