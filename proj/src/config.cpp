#include "coherence/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "coherence/errors.hpp"

namespace coherence {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Shortest text that reads back to the same double.
std::string fmt_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

[[noreturn]] void bad(int line, const std::string& what) {
    throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& v, int line) {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        bad(line, "expected a number, got '" + v + "'");
    }
    return x;
}

long parse_long(const std::string& v, int line) {
    long x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        bad(line, "expected an integer, got '" + v + "'");
    }
    return x;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    bad(line, "expected true or false, got '" + v + "'");
}

MapFamily parse_map_family(const std::string& v, int line) {
    if (v == "sine") {
        return MapFamily::Sine;
    }
    if (v == "piecewise_symmetric") {
        return MapFamily::PiecewiseSymmetric;
    }
    bad(line, "unknown map family '" + v + "'");
}

ProfileFamily parse_profile_family(const std::string& v, int line) {
    for (ProfileFamily f : {ProfileFamily::CosBump, ProfileFamily::OddSine, ProfileFamily::Constant,
                            ProfileFamily::Zero, ProfileFamily::CustomTable}) {
        if (v == to_string(f)) {
            return f;
        }
    }
    bad(line, "unknown profile family '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(trim(item), line));
    }
    return out;
}

} // namespace

std::string_view to_string(MapFamily f) { return f == MapFamily::Sine ? "sine" : "piecewise_symmetric"; }

LabConfig default_config(std::string_view example) {
    LabConfig c;
    if (example == "nondc") {
        return c;
    }
    if (example == "nonlui") {
        const double lam = ToralAutomorphism::cat_map().lambda();
        c.example = "nonlui";
        c.map_family = MapFamily::PiecewiseSymmetric;
        c.kappa = 0.0;
        c.sigma = 0.95 * lam;
        c.mu = 1.05;
        c.profile_family = ProfileFamily::OddSine;
        return c;
    }
    throw Error(ErrorKind::InvalidConfig, "unknown example '" + std::string(example) + "' (expected nondc or nonlui)");
}

LabConfig parse_config(std::string_view text) {
    LabConfig c;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                bad(line, "malformed section header");
            }
            section = trim(std::string_view(s).substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            bad(line, "expected key = value");
        }
        const std::string key = trim(std::string_view(s).substr(0, eq));
        const std::string val = trim(std::string_view(s).substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;

        if (full == "example") {
            c.example = val;
        } else if (full == "matrix.a") {
            c.matrix[0] = parse_long(val, line);
        } else if (full == "matrix.b") {
            c.matrix[1] = parse_long(val, line);
        } else if (full == "matrix.c") {
            c.matrix[2] = parse_long(val, line);
        } else if (full == "matrix.d") {
            c.matrix[3] = parse_long(val, line);
        } else if (full == "map.family") {
            c.map_family = parse_map_family(val, line);
        } else if (full == "map.kappa") {
            c.kappa = parse_double(val, line);
        } else if (full == "map.sigma") {
            c.sigma = parse_double(val, line);
        } else if (full == "map.mu") {
            c.mu = parse_double(val, line);
        } else if (full == "map.delta_half") {
            c.delta_half = parse_double(val, line);
        } else if (full == "map.delta_zero") {
            c.delta_zero = parse_double(val, line);
        } else if (full == "profile.family") {
            c.profile_family = parse_profile_family(val, line);
        } else if (full == "profile.amplitude") {
            c.amplitude = parse_double(val, line);
        } else if (full == "profile.table") {
            c.table = parse_list(val, line);
        } else if (full == "tolerances.tol") {
            c.tol = parse_double(val, line);
        } else if (full == "tolerances.eta_half") {
            c.eta_half = parse_double(val, line);
        } else if (full == "tolerances.eta_zero") {
            c.eta_zero = parse_double(val, line);
        } else if (full == "grid.n") {
            c.grid_n = static_cast<int>(parse_long(val, line));
        } else if (full == "certify.horizon") {
            c.horizon = static_cast<int>(parse_long(val, line));
        } else if (full == "certify.max_horizon") {
            c.max_horizon = static_cast<int>(parse_long(val, line));
        } else if (full == "checks.enforce_ph_inequalities") {
            c.enforce_ph_inequalities = parse_bool(val, line);
        } else if (full == "output.dir") {
            c.output_dir = val;
        } else if (section == "derived") {
            // Informational; recomputed on write.
        } else {
            bad(line, "unknown key '" + full + "'");
        }
    }
    if (!(c.tol > 0.0) || !(c.eta_half >= 0.0) || !(c.eta_zero >= 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "tolerances must be positive");
    }
    if (c.grid_n < 2 || c.horizon < 1 || c.max_horizon < 1) {
        throw Error(ErrorKind::InvalidConfig, "grid.n must be >= 2 and horizons >= 1");
    }
    return c;
}

LabConfig read_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string write_config(const LabConfig& c) {
    std::ostringstream o;
    o << "# coherence_lab configuration\n";
    o << "example = " << c.example << "\n\n";
    o << "[matrix]\n";
    o << "a = " << c.matrix[0] << "\nb = " << c.matrix[1] << "\nc = " << c.matrix[2] << "\nd = " << c.matrix[3]
      << "\n\n";
    o << "[map]\n";
    o << "family = " << to_string(c.map_family) << "\n";
    if (c.map_family == MapFamily::Sine) {
        o << "kappa = " << fmt_double(c.kappa) << "\n";
    } else {
        o << "sigma = " << fmt_double(c.sigma) << "\n";
        o << "mu = " << fmt_double(c.mu) << "\n";
        o << "delta_half = " << fmt_double(c.delta_half) << "\n";
        o << "delta_zero = " << fmt_double(c.delta_zero) << "\n";
    }
    o << "\n[profile]\n";
    o << "family = " << to_string(c.profile_family) << "\n";
    o << "amplitude = " << fmt_double(c.amplitude) << "\n";
    if (!c.table.empty()) {
        o << "table = ";
        for (std::size_t i = 0; i < c.table.size(); ++i) {
            o << (i ? ", " : "") << fmt_double(c.table[i]);
        }
        o << "\n";
    }
    o << "\n[tolerances]\n";
    o << "tol = " << fmt_double(c.tol) << "\neta_half = " << fmt_double(c.eta_half)
      << "\neta_zero = " << fmt_double(c.eta_zero) << "\n\n";
    o << "[grid]\nn = " << c.grid_n << "\n\n";
    o << "[certify]\nhorizon = " << c.horizon << "\nmax_horizon = " << c.max_horizon << "\n\n";
    o << "[checks]\nenforce_ph_inequalities = " << (c.enforce_ph_inequalities ? "true" : "false") << "\n\n";
    o << "[output]\ndir = " << c.output_dir << "\n";

    // Derived values, when the parameters admit them.
    try {
        const ToralAutomorphism a(c.matrix[0], c.matrix[1], c.matrix[2], c.matrix[3]);
        double mu = c.mu;
        double sigma = c.sigma;
        if (c.map_family == MapFamily::Sine) {
            mu = 1.0 + two_pi * c.kappa;
            sigma = 1.0 - two_pi * c.kappa;
        }
        o << "\n[derived]\n";
        o << "lambda = " << fmt_double(a.lambda()) << "\ninv_lambda = " << fmt_double(a.inv_lambda())
          << "\nmu = " << fmt_double(mu) << "\nsigma = " << fmt_double(sigma) << "\n";
    } catch (const Error&) {
    }
    return o.str();
}

std::uint64_t config_digest(const LabConfig& c) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : write_config(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_hex(std::uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

namespace {

Profile build_profile(const LabConfig& c) {
    switch (c.profile_family) {
    case ProfileFamily::CosBump:
        return Profile::cos_bump(c.amplitude);
    case ProfileFamily::OddSine:
        return Profile::odd_sine(c.amplitude);
    case ProfileFamily::Constant:
        return Profile::constant(c.amplitude);
    case ProfileFamily::Zero:
        return Profile::zero();
    case ProfileFamily::CustomTable:
        return Profile::table(c.table);
    }
    return Profile::zero();
}

} // namespace

SkewProduct build_system(const LabConfig& c) {
    const ToralAutomorphism a(c.matrix[0], c.matrix[1], c.matrix[2], c.matrix[3]);
    const double lam = a.lambda();
    MorseSmaleMap psi = [&] {
        if (c.map_family == MapFamily::Sine) {
            return c.enforce_ph_inequalities ? make_sine_map(c.kappa, lam) : MorseSmaleMap::sine(c.kappa);
        }
        return c.enforce_ph_inequalities ? make_symmetric_map(c.sigma, c.mu, lam, c.delta_half, c.delta_zero)
                                         : MorseSmaleMap::symmetric(c.sigma, c.mu, c.delta_half, c.delta_zero);
    }();
    return SkewProduct(a, std::move(psi), build_profile(c), c.enforce_ph_inequalities);
}

} // namespace coherence
