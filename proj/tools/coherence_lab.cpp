#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coherence/cohomology.hpp"
#include "coherence/config.hpp"
#include "coherence/errors.hpp"
#include "coherence/export.hpp"
#include "coherence/geometry.hpp"
#include "coherence/kernels.hpp"

using namespace coherence;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_cert_failed = 3;
constexpr int exit_numeric = 4;

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::IoError:
    case ErrorKind::InvalidConfig:
    case ErrorKind::NotHyperbolic:
    case ErrorKind::ConditionViolated:
    case ErrorKind::GeometryInfeasible:
        return exit_usage;
    case ErrorKind::CertificationFailed:
    case ErrorKind::HorizonTooShort:
        return exit_cert_failed;
    default:
        return exit_numeric;
    }
}

struct Options {
    std::string config_path;
    std::string out_dir;
    std::optional<double> tol;
    std::optional<int> grid;
    std::optional<int> horizon;
    std::vector<double> thetas;

    std::string example;
    std::string make_path;
    std::string which = "gamma";
    std::string kind = "center_fiber";
    int iterations = 500;
    double theta_lo = 0.1;
    double theta_hi = 0.4;
    int n = 200;
    double arclen = 0.25;
    double step = 1e-3;
    int curves = 5;
    int j_lo = 6;
    int j_hi = 16;
};

struct Run {
    std::string command;
    LabConfig config;
    std::filesystem::path out;
    json verdicts = json::object();
    std::vector<std::string> artifacts;

    void emit(const std::string& name, const std::string& content) {
        const std::string path = (out / name).string();
        write_file_atomic(path, content);
        artifacts.push_back(path);
    }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string which_file_tag(const std::string& which) {
    std::string s = which;
    if (!s.empty() && s.back() == '\'') {
        s.pop_back();
        s += "_prime";
    }
    return s;
}

SeriesResult eval_series(const TwistedEquation& eq, const std::string& which, CirclePoint t, const LabConfig& c) {
    const std::string w = which_file_tag(which);
    if (w == "gamma") return gamma(eq, t, c.tol);
    if (w == "beta") return beta(eq, t, c.tol, c.eta_zero);
    if (w == "alpha") return alpha(eq, t, c.tol, c.eta_zero);
    if (w == "gamma_prime") return gamma_prime(eq, t, c.tol, c.eta_half);
    if (w == "beta_prime") return beta_prime(eq, t, c.tol, c.eta_zero);
    if (w == "alpha_prime") return alpha_prime(eq, t, c.tol, c.eta_half, c.eta_zero);
    throw Error(ErrorKind::InvalidConfig, "unknown series '" + which + "'");
}

GridSpec grid_of(const LabConfig& c) { return {c.grid_n, c.eta_half, c.eta_zero}; }

bool positivity_applies(const SkewProduct& f) {
    return f.psi().family() == MapFamily::PiecewiseSymmetric && f.profile().family() == ProfileFamily::OddSine;
}

int cmd_certify(Run& run, const SkewProduct& f) {
    const LabConfig& c = run.config;
    const CertificationReport report = certify_ph(f, grid_of(c), c.horizon, c.tol);
    json j = to_json(report);
    const CertificationReport smallest = smallest_certifying_horizon(f, grid_of(c), c.max_horizon, c.tol);
    j["smallest_certifying_N"] = smallest.verdict ? json(smallest.horizon) : json(nullptr);
    j["simd"] = std::string(kernels::to_string(kernels::active_isa()));
    run.emit("certification.json", dump(j));
    run.verdicts["certified"] = report.verdict;
    run.verdicts["N"] = report.horizon;
    run.verdicts["margins"] = j["margins"];
    if (!report.verdict) {
        throw Error(*report.failure, report.message);
    }
    return exit_ok;
}

int cmd_series(Run& run, const SkewProduct& f, const Options& o) {
    const LabConfig& c = run.config;
    std::vector<CirclePoint> points;
    if (o.thetas.empty()) {
        for (int i = 0; i < c.grid_n; ++i) {
            points.push_back(CirclePoint::from(static_cast<double>(i) / c.grid_n));
        }
    } else {
        for (double t : o.thetas) {
            points.push_back(CirclePoint::from(wrap01(t)));
        }
    }
    std::ostringstream csv;
    csv << "theta,value,tail_bound,terms,status\n";
    int flagged = 0;
    for (const CirclePoint& p : points) {
        csv << format_double(p.value()) << ',';
        try {
            const SeriesResult r = eval_series(f.equation(), o.which, p, c);
            csv << format_double(r.value) << ',' << format_double(r.tail_bound) << ',' << r.terms_used << ",ok\n";
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::InvalidConfig) {
                throw;
            }
            ++flagged;
            csv << ",,," << e.name() << '\n';
        }
    }
    run.emit("series_" + which_file_tag(o.which) + ".csv", csv.str());
    run.verdicts["rows"] = points.size();
    run.verdicts["flagged_rows"] = flagged;
    return exit_ok;
}

int cmd_curves(Run& run, const SkewProduct& f, const Options& o) {
    const LabConfig& c = run.config;
    const double base_theta = o.thetas.empty() ? o.theta_lo : o.thetas.front();
    const Point3 base{0.0, 0.0, base_theta};
    if (o.kind == "center_fiber") {
        const CurveSample s = center_fiber(f, base, o.theta_lo, o.theta_hi, o.n);
        run.emit("curve_center_fiber.csv", curve_csv(s));
    } else if (o.kind == "center_ode") {
        const CurveSample s = integrate_center(f, base, o.arclen, o.step, c.eta_half);
        run.emit("curve_center_ode.csv", curve_csv(s));
        run.verdicts["entered_singular_band"] = s.entered_singular_band;
        run.verdicts["fiber_deviation"] = fiber_deviation(f, s);
    } else if (o.kind == "strong_stable") {
        const CurveSample s = strong_stable_curve(f, base, o.theta_lo, o.theta_hi, o.n, c.eta_zero);
        run.emit("curve_strong_stable.csv", curve_csv(s));
    } else if (o.kind == "reeb") {
        const Point3 anchor{0.0, 0.0, o.thetas.empty() ? 0.5 : o.thetas.front()};
        const auto strips = reeb_strip_sample(f, anchor, o.curves, o.theta_lo, o.theta_hi, o.n, 0.1, c.eta_zero);
        for (std::size_t i = 0; i < strips.size(); ++i) {
            run.emit("reeb_" + std::to_string(i) + ".csv", curve_csv(strips[i]));
        }
    } else {
        throw Error(ErrorKind::InvalidConfig, "unknown curve kind '" + o.kind + "'");
    }
    return exit_ok;
}

int cmd_blowup(Run& run, const SkewProduct& f, const Options& o) {
    const std::string w = which_file_tag(o.which);
    BlowupWhich which;
    if (w == "gamma_prime" || w == "gamma") {
        which = BlowupWhich::GammaPrimeAtHalf;
    } else if (w == "beta_prime" || w == "beta") {
        which = BlowupWhich::BetaPrimeAtZero;
    } else {
        throw Error(ErrorKind::InvalidConfig, "blowup expects --which gamma' or beta'");
    }
    const double eta = which == BlowupWhich::GammaPrimeAtHalf ? run.config.eta_half : run.config.eta_zero;
    const ExponentFit fit = blowup_fit(f, which, o.j_lo, o.j_hi, eta);
    run.emit(std::string("blowup_") + std::string(to_string(which)) + ".json", dump(to_json(fit)));
    run.verdicts["fitted_slope"] = fit.slope;
    run.verdicts["predicted"] = fit.predicted;
    run.verdicts["relative_deviation"] = fit.relative_deviation;
    return exit_ok;
}

int cmd_witness(Run& run, const SkewProduct& f) {
    WitnessSettings s;
    s.eta_half = run.config.eta_half;
    const WitnessReport w = nonintegrability_witness(f, run.config.example, s);
    json j = to_json(w);
    if (positivity_applies(f)) {
        j["positivity"] = to_json(positivity_condition(f));
    }
    run.emit("witness.json", dump(j));
    run.verdicts["witness"] = std::string(to_string(w.verdict));
    std::cout << to_string(w.verdict) << "\n";
    return exit_ok;
}

int cmd_probe(Run& run, const SkewProduct& f, const Options& o) {
    const double theta0 = o.thetas.empty() ? 0.9 : o.thetas.front();
    const AttractorRecord r = attractor_probe(f, Point3{0.0, 0.0, theta0}, o.iterations);
    run.emit("probe.csv", probe_csv(r));
    run.verdicts["first_below_1e-6"] = r.first_below;
    run.verdicts["late_ratio"] = r.late_ratio;
    run.verdicts["sigma"] = f.psi().sigma();
    return exit_ok;
}

int cmd_report(Run& run, const SkewProduct& f) {
    const LabConfig& c = run.config;
    json j;
    j["example"] = c.example;
    j["lambda"] = f.lambda();
    j["mu"] = f.psi().mu();
    j["sigma"] = f.psi().sigma();
    const CertificationReport cert = certify_ph(f, grid_of(c), c.horizon, c.tol);
    j["certification"] = {{"N", cert.horizon}, {"verdict", cert.verdict}, {"margins", to_json(cert)["margins"]}};
    j["alpha_prime"] = to_json(min_alpha_prime(f, grid_of(c), c.tol));
    WitnessSettings ws;
    ws.eta_half = c.eta_half;
    j["witness"] = to_json(nonintegrability_witness(f, c.example, ws));
    j["witness"].erase("samples");
    if (f.profile().family() == ProfileFamily::CosBump) {
        j["blowup_gamma_prime"] = to_json(blowup_fit(f, BlowupWhich::GammaPrimeAtHalf, 6, 16, c.eta_half));
        j["blowup_beta_prime"] = to_json(blowup_fit(f, BlowupWhich::BetaPrimeAtZero, 6, 16, c.eta_zero));
    }
    if (positivity_applies(f)) {
        j["positivity"] = to_json(positivity_condition(f));
    }
    run.emit("report.json", dump(j));
    run.verdicts["certified"] = cert.verdict;
    run.verdicts["witness"] = j["witness"]["verdict"];
    if (!cert.verdict) {
        throw Error(*cert.failure, cert.message);
    }
    return exit_ok;
}

void write_run_report(const Run& run, double seconds, int code, const std::optional<Error>& error) {
    json j = {{"command", run.command},
              {"config_digest", digest_hex(config_digest(run.config))},
              {"wall_time_s", seconds},
              {"verdicts", run.verdicts},
              {"artifacts", run.artifacts},
              {"exit_code", code}};
    if (error) {
        j["error"] = {{"name", error->name()}, {"message", error->what()}};
    }
    write_file_atomic((run.out / (run.command + "_run.json")).string(), dump(j));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherence_lab: build, certify and probe the two partially hyperbolic skew products on T^3"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Config file")->required();
        sub->add_option("--out", o.out_dir, "Output directory (default: the config's output.dir)");
        sub->add_option("--tol", o.tol, "Series tolerance");
        sub->add_option("--grid", o.grid, "Grid size");
        sub->add_option("--horizon", o.horizon, "Certification horizon N");
        sub->add_option("--theta", o.thetas, "Theta value (repeatable)");
    };

    CLI::App* make = app.add_subcommand("make-config", "Write a default configuration");
    make->add_option("example", o.example, "nondc or nonlui")->required();
    make->add_option("path", o.make_path, "Output config path")->required();

    CLI::App* certify = app.add_subcommand("certify", "Certify the partially hyperbolic splitting");
    common(certify);
    CLI::App* series = app.add_subcommand("series", "Evaluate gamma, beta, alpha or their derivatives");
    common(series);
    series->add_option("--which", o.which, "gamma, beta, alpha, gamma', beta' or alpha'");
    CLI::App* curves = app.add_subcommand("curves", "Export center or strong stable curves");
    common(curves);
    curves->add_option("--kind", o.kind, "center_fiber, center_ode, strong_stable or reeb");
    curves->add_option("--theta-lo", o.theta_lo, "Lower theta");
    curves->add_option("--theta-hi", o.theta_hi, "Upper theta");
    curves->add_option("--n", o.n, "Points per curve");
    curves->add_option("--arclen", o.arclen, "Arc length for center_ode (negative: downward)");
    curves->add_option("--step", o.step, "Integration step for center_ode");
    curves->add_option("--curves", o.curves, "Number of reeb curves");
    CLI::App* blowup = app.add_subcommand("blowup", "Fit the blow-up exponent of gamma' or beta'");
    common(blowup);
    blowup->add_option("--which", o.which, "gamma' or beta'");
    blowup->add_option("--j-lo", o.j_lo, "Smallest dyadic exponent");
    blowup->add_option("--j-hi", o.j_hi, "Largest dyadic exponent");
    CLI::App* witness = app.add_subcommand("witness", "Sign witness for non-integrability of the center");
    common(witness);
    CLI::App* probe = app.add_subcommand("probe", "Convergence to the attracting torus");
    common(probe);
    probe->add_option("--iterations", o.iterations, "Iterations");
    CLI::App* report = app.add_subcommand("report", "Run every check and summarize");
    common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    if (make->parsed()) {
        try {
            const LabConfig c = default_config(o.example);
            build_system(c);
            write_file_atomic(o.make_path, write_config(c));
            std::cout << o.make_path << "\n";
            return exit_ok;
        } catch (const Error& e) {
            std::cerr << "coherence_lab: " << e.what() << "\n";
            return exit_usage;
        }
    }

    Run run;
    CLI::App* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    try {
        run.config = read_config(o.config_path);
    } catch (const Error& e) {
        std::cerr << "coherence_lab: " << e.what() << "\n";
        return exit_usage;
    }
    if (o.tol) run.config.tol = *o.tol;
    if (o.grid) run.config.grid_n = *o.grid;
    if (o.horizon) run.config.horizon = *o.horizon;
    run.out = o.out_dir.empty() ? std::filesystem::path(run.config.output_dir) : std::filesystem::path(o.out_dir);

    const auto start = std::chrono::steady_clock::now();
    int code = exit_ok;
    std::optional<Error> error;
    try {
        const SkewProduct f = build_system(run.config);
        if (sub == certify) code = cmd_certify(run, f);
        else if (sub == series) code = cmd_series(run, f, o);
        else if (sub == curves) code = cmd_curves(run, f, o);
        else if (sub == blowup) code = cmd_blowup(run, f, o);
        else if (sub == witness) code = cmd_witness(run, f);
        else if (sub == probe) code = cmd_probe(run, f, o);
        else if (sub == report) code = cmd_report(run, f);
    } catch (const Error& e) {
        error = e;
        code = exit_code_for(e.kind());
        std::cerr << "coherence_lab: " << e.what() << "\n";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        write_run_report(run, seconds, code, error);
    } catch (const Error& e) {
        std::cerr << "coherence_lab: " << e.what() << "\n";
        return exit_usage;
    }
    return code;
}
