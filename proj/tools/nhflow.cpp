// Command-line front end: condition checking, flow runs, shrinking-sphere
// tables, rescale reruns and the oracle verification suites.
//
// Exit codes: 0 success, 2 configuration error, 3 empty classification
// without override, 4 convexity breakdown, 5 verification failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhflow/flow.hpp"
#include "nhflow/io.hpp"
#include "nhflow/monitors.hpp"
#include "nhflow/oracles.hpp"

using nlohmann::json;
using namespace nhflow;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path, "");
    std::stringstream ss;
    ss << in.rdbuf();
    return json::parse(ss.str());
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json j = load_json(path);
    for (const auto& o : overrides) apply_override(j, o);
    return parse_config(j);
}

int cmd_check(const RunConfig& cfg) {
    const FConditionReport fr = condition_report_f(cfg.f, cfg.n, 2000, 16.0, cfg.seed + 1);
    const PhiConditionReport pr = condition_report_phi(cfg.phi);
    const CaseClassification cls = classify_case(fr, pr, cfg.n, true);
    json out;
    out["f_report"] = f_report_to_json(fr);
    out["phi_report"] = phi_report_to_json(pr);
    out["classification"] = classification_to_json(cls);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_flow(const RunConfig& cfg, const std::string& out_dir) {
    const RunResult result = run_flow(cfg);
    write_outputs(result, cfg, out_dir);
    std::cout << "wrote " << out_dir << " (steps=" << result.steps
              << ", T_est=" << format_double(result.extinction.T_est)
              << ", p_est=" << format_double(result.extinction.p_est) << ")\n";
    return 0;
}

int cmd_sphere(const RunConfig& cfg, double theta0, int samples, const std::string& out_path) {
    const ShrinkingSphere sphere(cfg.phi, theta0);
    std::string csv = "t,theta,tau\n";
    for (int i = 0; i <= samples; ++i) {
        const double t = sphere.extinction_time() * i / (samples + 1.0);
        const double th = sphere.theta_at(t);
        csv += format_double(t);
        csv += ',';
        csv += format_double(th);
        csv += ',';
        csv += format_double(-std::log(th));
        csv += '\n';
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        out << csv;
    } else {
        std::cout << csv;
    }
    std::cout << "T = " << format_double(sphere.extinction_time()) << "\n";
    return 0;
}

int cmd_rescale(const std::string& run_dir) {
    const json run = load_json((std::filesystem::path(run_dir) / "run.json").string());
    if (!run.contains("config")) throw ConfigError("run.json has no config block", "/config");
    const RunConfig cfg = parse_config(run["config"]);
    const RunResult result = run_flow(cfg);
    write_outputs(result, cfg, run_dir);
    json extra;
    extra["T_est"] = result.extinction.T_est;
    extra["decay_rate"] = result.decay.rate;
    extra["decay_fit_residual"] = result.decay.residual;
    std::ofstream out(std::filesystem::path(run_dir) / "rescale.json", std::ios::binary);
    out << extra.dump(2) << "\n";
    std::cout << "rescaled " << run_dir << " (decay_rate=" << format_double(result.decay.rate)
              << ")\n";
    return 0;
}

json suite_to_json(const SuiteReport& r) {
    json j;
    j["name"] = r.name;
    j["samples"] = r.samples;
    j["violations"] = r.violations;
    j["worst_residual"] = r.worst_residual;
    j["worst_margin"] = r.worst_margin;
    j["reported_only_failures"] = r.reported_only_failures;
    j["pass"] = r.pass;
    j["notes"] = r.notes;
    return j;
}

int cmd_verify(int fd_samples, int suite_samples, const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    json out;
    bool all_pass = true;

    // derivative checks across all builtin speeds
    {
        std::vector<SpeedFunction> speeds = {
            SpeedFunction::arithmetic_mean(), SpeedFunction::geometric_mean(),
            SpeedFunction::rms(), SpeedFunction::harmonic_mean(), SpeedFunction::power_mean(3.0)};
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double worst_g = 0.0, worst_h = 0.0;
        for (const auto& f : speeds) {
            for (int s = 0; s < fd_samples; ++s) {
                const int n = 2 + s % 3;
                std::vector<double> k(n);
                for (int i = 0; i < n; ++i) k[i] = std::exp(unif(rng) * std::log(10.0));
                PrincipalCurvatures kappa(k);
                worst_g = std::max(worst_g,
                                   fd_check_gradient(f, kappa, 1e-5 * kappa.min()));
                worst_h = std::max(worst_h, fd_check_hessian(f, kappa, 1e-4 * kappa.min()));
            }
        }
        json fd;
        fd["gradient_worst"] = worst_g;
        fd["hessian_worst"] = worst_h;
        fd["pass"] = worst_g <= 1e-6 && worst_h <= 1e-5;
        all_pass = all_pass && fd["pass"].get<bool>();
        out["finite_differences"] = fd;
    }

    json suites = json::array();
    for (int n : {2, 3, 4}) {
        SuiteReport r = identity_suite_37(suite_samples, n, 1.0 / (2.0 * n));
        r.name += "(n=" + std::to_string(n) + ")";
        all_pass = all_pass && r.pass;
        suites.push_back(suite_to_json(r));
    }
    for (int n : {2, 3, 4}) {
        SuiteReport r = gradient_inequality_suite(suite_samples, n);
        r.name += "(n=" + std::to_string(n) + ")";
        all_pass = all_pass && r.pass;
        suites.push_back(suite_to_json(r));
    }
    for (int n : {2, 3}) {
        SuiteReport r = tight_pinch_suite(suite_samples, n);
        r.name += "(n=" + std::to_string(n) + ")";
        all_pass = all_pass && r.pass;
        suites.push_back(suite_to_json(r));
    }
    out["suites"] = suites;

    {
        const MuEstimate mu = estimate_mu(SpeedFunction::geometric_mean(), 2, 0.05, 4000);
        out["mu_geometric_n2_sigma005"] = {{"second_derivative", mu.mu_second_derivative},
                                           {"gradient", mu.mu_gradient},
                                           {"value", mu.mu_value},
                                           {"combined", mu.combined}};
    }

    const auto t1 = std::chrono::steady_clock::now();
    out["elapsed_seconds"] = std::chrono::duration<double>(t1 - t0).count();
    out["pass"] = all_pass;
    const std::string text = out.dump(2) + "\n";
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        f << text;
    }
    std::cout << text;
    return all_pass ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"contraction of convex axisymmetric hypersurfaces by curvature-speed profiles"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", run_dir, out_path;
    std::vector<std::string> overrides;
    double theta0 = 1.0;
    int samples = 200, fd_samples = 200, suite_samples = 10000;

    CLI::App* check = app.add_subcommand("check", "condition reports and case classification");
    check->add_option("--config", config_path)->required();
    check->add_option("--set", overrides, "dotted-key=value config overrides");

    CLI::App* flow = app.add_subcommand("flow", "integrate a contraction run");
    flow->add_option("--config", config_path)->required();
    flow->add_option("--out", out_dir, "output directory");
    flow->add_option("--set", overrides, "dotted-key=value config overrides");

    CLI::App* sphere = app.add_subcommand("sphere", "shrinking-sphere radius history");
    sphere->add_option("--config", config_path)->required();
    sphere->add_option("--theta0", theta0, "initial radius");
    sphere->add_option("--samples", samples, "rows in the table");
    sphere->add_option("--out", out_path, "CSV path (stdout if omitted)");
    sphere->add_option("--set", overrides, "dotted-key=value config overrides");

    CLI::App* rescale = app.add_subcommand("rescale", "re-run a saved run and refresh outputs");
    rescale->add_option("--run", run_dir)->required();

    CLI::App* verify = app.add_subcommand("verify", "oracle suites");
    verify->add_option("--fd-samples", fd_samples, "curvature samples per speed");
    verify->add_option("--suite-samples", suite_samples, "samples per identity suite");
    verify->add_option("--out", out_path, "write the JSON report here too");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(check)) return cmd_check(load_config(config_path, overrides));
        if (app.got_subcommand(flow)) return cmd_flow(load_config(config_path, overrides), out_dir);
        if (app.got_subcommand(sphere))
            return cmd_sphere(load_config(config_path, overrides), theta0, samples, out_path);
        if (app.got_subcommand(rescale)) return cmd_rescale(run_dir);
        if (app.got_subcommand(verify)) return cmd_verify(fd_samples, suite_samples, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ClassificationEmptyError& e) {
        std::cerr << "classification error: " << e.what() << "\n";
        return 3;
    } catch (const ConvexityError& e) {
        std::cerr << "convexity error: " << e.what() << "\n";
        return 4;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        const std::string what = e.what();
        return what.find("convexity breakdown") != std::string::npos ? 4 : 1;
    }
    return 0;
}
