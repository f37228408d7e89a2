#include "nhflow/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace nhflow {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& base,
                  std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return it.key() == k; }) == allowed.end())
            throw ConfigError("unknown key", base + "/" + it.key());
    }
}

double get_number(const json& j, const std::string& base, const char* key, double fallback,
                  bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ConfigError("missing key", base + "/" + key);
        return fallback;
    }
    if (!j[key].is_number()) throw ConfigError("expected a number", base + "/" + key);
    return j[key].get<double>();
}

long get_integer(const json& j, const std::string& base, const char* key, long fallback,
                 bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ConfigError("missing key", base + "/" + key);
        return fallback;
    }
    if (!j[key].is_number_integer()) throw ConfigError("expected an integer", base + "/" + key);
    return j[key].get<long>();
}

SpeedFunction parse_speed(const json& j) {
    if (!j.is_object()) throw ConfigError("expected an object", "/f");
    require_keys(j, "/f", {"kind", "p"});
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("missing or non-string kind", "/f/kind");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "arithmetic_mean") return SpeedFunction::arithmetic_mean();
    if (kind == "geometric_mean") return SpeedFunction::geometric_mean();
    if (kind == "rms") return SpeedFunction::rms();
    if (kind == "harmonic_mean") return SpeedFunction::harmonic_mean();
    if (kind == "power_mean") {
        if (!j.contains("p")) throw ConfigError("power_mean needs exponent p", "/f/p");
        return SpeedFunction::power_mean(get_number(j, "/f", "p", 0.0, true));
    }
    throw ConfigError("unknown speed kind '" + kind + "'", "/f/kind");
}

std::vector<std::pair<double, double>> parse_terms(const json& j, const std::string& base) {
    if (!j.is_array() || j.empty()) throw ConfigError("expected a nonempty array", base);
    std::vector<std::pair<double, double>> terms;
    for (size_t i = 0; i < j.size(); ++i) {
        const json& t = j[i];
        if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number())
            throw ConfigError("expected a [c, k] pair", base + "/" + std::to_string(i));
        terms.emplace_back(t[0].get<double>(), t[1].get<double>());
    }
    return terms;
}

PhiProfile parse_phi(const json& j) {
    if (!j.is_object()) throw ConfigError("expected an object", "/phi");
    require_keys(j, "/phi", {"kind", "terms"});
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("missing or non-string kind", "/phi/kind");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "log1p") return PhiProfile::log1p_profile();
    if (kind == "expm1") return PhiProfile::expm1_profile();
    if (kind == "power_sum") {
        if (!j.contains("terms")) throw ConfigError("power_sum needs terms", "/phi/terms");
        return PhiProfile::power_sum(parse_terms(j["terms"], "/phi/terms"));
    }
    if (kind == "log1p+power_sum") {
        if (!j.contains("terms")) throw ConfigError("sum profile needs terms", "/phi/terms");
        return PhiProfile::sum({PhiProfile::log1p_profile(),
                                PhiProfile::power_sum(parse_terms(j["terms"], "/phi/terms"))});
    }
    throw ConfigError("unknown profile kind '" + kind + "'", "/phi/kind");
}

ShapeSpec parse_shape(const json& j) {
    if (!j.is_object()) throw ConfigError("expected an object", "/shape");
    require_keys(j, "/shape", {"kind", "R", "a", "b", "eps", "mode", "coeffs"});
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("missing or non-string kind", "/shape/kind");
    const std::string kind = j["kind"].get<std::string>();
    ShapeSpec spec;
    if (kind == "sphere") {
        spec.kind = ShapeSpec::Kind::Sphere;
        spec.R = get_number(j, "/shape", "R", 1.0);
    } else if (kind == "spheroid") {
        spec.kind = ShapeSpec::Kind::Spheroid;
        spec.axial = get_number(j, "/shape", "a", 1.0, true);
        spec.equatorial = get_number(j, "/shape", "b", 1.0, true);
    } else if (kind == "perturbed_sphere") {
        spec.kind = ShapeSpec::Kind::PerturbedSphere;
        spec.R = get_number(j, "/shape", "R", 1.0);
        spec.eps = get_number(j, "/shape", "eps", 0.0, true);
        spec.mode = static_cast<int>(get_integer(j, "/shape", "mode", 2));
    } else if (kind == "raw") {
        if (!j.contains("coeffs") || !j["coeffs"].is_array())
            throw ConfigError("raw shape needs a coeffs array", "/shape/coeffs");
        spec.kind = ShapeSpec::Kind::Raw;
        for (const auto& v : j["coeffs"]) {
            if (!v.is_number()) throw ConfigError("expected numbers", "/shape/coeffs");
            spec.coeffs.push_back(v.get<double>());
        }
    } else {
        throw ConfigError("unknown shape kind '" + kind + "'", "/shape/kind");
    }
    return spec;
}

}  // namespace

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("expected an object", "");
    require_keys(j, "", {"n", "f", "phi", "shape", "modes", "c_safe", "r_stop", "sigma", "delta",
                         "monitor_stride", "max_steps", "seed", "override_classification"});
    for (const char* req : {"n", "f", "phi", "shape"}) {
        if (!j.contains(req)) throw ConfigError("missing required key", std::string("/") + req);
    }

    RunConfig cfg;
    cfg.n = static_cast<int>(get_integer(j, "", "n", 2, true));
    if (cfg.n < 2) throw ConfigError("dimension must be >= 2", "/n");
    cfg.f = parse_speed(j["f"]);
    cfg.phi = parse_phi(j["phi"]);
    cfg.shape = parse_shape(j["shape"]);
    cfg.modes = static_cast<int>(get_integer(j, "", "modes", 64));
    if (cfg.modes < 4) throw ConfigError("modes must be >= 4", "/modes");
    cfg.c_safe = get_number(j, "", "c_safe", 0.2);
    if (!(cfg.c_safe > 0.0 && cfg.c_safe <= 1.0)) throw ConfigError("c_safe must lie in (0,1]", "/c_safe");
    cfg.r_stop = get_number(j, "", "r_stop", 0.0);
    cfg.sigma = get_number(j, "", "sigma", 0.0);
    cfg.delta = get_number(j, "", "delta", 0.0);
    cfg.monitor_stride = static_cast<int>(get_integer(j, "", "monitor_stride", 16));
    if (cfg.monitor_stride < 1) throw ConfigError("monitor_stride must be >= 1", "/monitor_stride");
    cfg.max_steps = get_integer(j, "", "max_steps", 2000000);
    if (cfg.max_steps < 1) throw ConfigError("max_steps must be >= 1", "/max_steps");
    cfg.seed = static_cast<std::uint64_t>(get_integer(j, "", "seed", 0));
    if (j.contains("override_classification")) {
        if (!j["override_classification"].is_boolean())
            throw ConfigError("expected a boolean", "/override_classification");
        cfg.override_classification = j["override_classification"].get<bool>();
    }
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what(), "");
    }
    return parse_config(j);
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value", "/" + assignment);
    std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    std::replace(path.begin(), path.end(), '.', '/');
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare strings are taken literally
    }
    j[json::json_pointer("/" + path)] = parsed;
}

namespace {

json speed_to_json(const SpeedFunction& f) {
    switch (f.kind()) {
        case SpeedFunction::Kind::ArithmeticMean: return {{"kind", "arithmetic_mean"}};
        case SpeedFunction::Kind::GeometricMean: return {{"kind", "geometric_mean"}};
        case SpeedFunction::Kind::Rms: return {{"kind", "rms"}};
        case SpeedFunction::Kind::HarmonicMean: return {{"kind", "harmonic_mean"}};
        case SpeedFunction::Kind::PowerMean: return {{"kind", "power_mean"}, {"p", f.power()}};
    }
    return {};
}

json phi_to_json(const PhiProfile& phi) {
    switch (phi.kind()) {
        case PhiProfile::Kind::Log1p: return {{"kind", "log1p"}};
        case PhiProfile::Kind::Expm1: return {{"kind", "expm1"}};
        case PhiProfile::Kind::PowerSum: {
            json terms = json::array();
            for (const auto& [c, k] : phi.terms()) terms.push_back({c, k});
            return {{"kind", "power_sum"}, {"terms", terms}};
        }
        case PhiProfile::Kind::Sum: {
            // the parser only builds log1p + power_sum composites
            json terms = json::array();
            for (const auto& part : phi.parts()) {
                if (part.kind() == PhiProfile::Kind::PowerSum)
                    for (const auto& [c, k] : part.terms()) terms.push_back({c, k});
            }
            return {{"kind", "log1p+power_sum"}, {"terms", terms}};
        }
    }
    return {};
}

json shape_to_json(const ShapeSpec& s) {
    switch (s.kind) {
        case ShapeSpec::Kind::Sphere: return {{"kind", "sphere"}, {"R", s.R}};
        case ShapeSpec::Kind::Spheroid:
            return {{"kind", "spheroid"}, {"a", s.axial}, {"b", s.equatorial}};
        case ShapeSpec::Kind::PerturbedSphere:
            return {{"kind", "perturbed_sphere"}, {"R", s.R}, {"eps", s.eps}, {"mode", s.mode}};
        case ShapeSpec::Kind::Raw: return {{"kind", "raw"}, {"coeffs", s.coeffs}};
    }
    return {};
}

}  // namespace

json config_to_json(const RunConfig& config, const RunResult* result) {
    json j;
    j["n"] = config.n;
    j["f"] = speed_to_json(config.f);
    j["phi"] = phi_to_json(config.phi);
    j["shape"] = shape_to_json(config.shape);
    j["modes"] = config.modes;
    j["c_safe"] = config.c_safe;
    j["r_stop"] = result ? result->r_stop_eff : config.r_stop;
    j["sigma"] = result ? result->sigma_eff : config.sigma;
    j["delta"] = result ? result->delta_eff : config.delta;
    j["monitor_stride"] = config.monitor_stride;
    j["max_steps"] = config.max_steps;
    j["seed"] = config.seed;
    j["override_classification"] = config.override_classification;
    return j;
}

json f_report_to_json(const FConditionReport& rep) {
    json j;
    j["normalization_ok"] = rep.normalization_ok;
    j["homogeneity_residual"] = rep.homogeneity_residual;
    j["monotone_ok"] = rep.monotone_ok;
    j["concavity_class"] = to_string(rep.concavity_class);
    j["inverse_concave_ok"] = rep.inverse_concave_ok;
    j["vanishes_on_boundary_ok"] = rep.vanishes_on_boundary_ok;
    j["dual_vanishes_on_boundary_ok"] = rep.dual_vanishes_on_boundary_ok;
    j["sample_count"] = rep.sample_count;
    j["cone_ratio_bound"] = rep.cone_ratio_bound;
    j["seed"] = rep.seed;
    j["min_quadratic_form"] = rep.min_quadratic_form;
    j["max_quadratic_form"] = rep.max_quadratic_form;
    json probes = json::array();
    for (const auto& p : rep.boundary_profile)
        probes.push_back({{"eps", p.eps}, {"f", p.f_value}, {"sum_over_f", p.sum_over_f}});
    j["boundary_profile"] = probes;
    return j;
}

json phi_report_to_json(const PhiConditionReport& rep) {
    json j;
    j["a"] = rep.a;
    j["b"] = rep.b;
    j["c"] = rep.c;
    j["d_i"] = rep.d_i;
    j["d_ii"] = rep.d_ii;
    j["d_ii_epsilon"] = rep.d_ii_epsilon;
    j["d_iii"] = rep.d_iii;
    j["e"] = rep.e;
    j["f"] = rep.f;
    j["g"] = rep.g;
    j["h"] = rep.h;
    j["i"] = rep.i;
    if (rep.h_unbounded) j["empirical_c_for_h"] = "unbounded";
    else j["empirical_c_for_h"] = rep.empirical_c_for_h;
    if (!rep.h_tight_bound.empty()) {
        j["h_bound_coeff_weighted"] = rep.h_bound_coeff_weighted;
        j["h_bound_termwise"] = rep.h_bound_termwise;
        j["h_tight_bound"] = rep.h_tight_bound;
    }
    j["grid"] = {{"s_min", rep.grid.s_min}, {"s_max", rep.grid.s_max}, {"points", rep.grid.points},
                 {"spacing", "log"}};
    return j;
}

json classification_to_json(const CaseClassification& cls) {
    json j;
    j["applicable_cases"] = cls.applicable_cases;
    j["empty"] = cls.empty();
    json cases = json::array();
    for (const auto& c : cls.cases) {
        json jc;
        jc["id"] = c.id;
        jc["certifiable"] = c.certifiable;
        jc["f_side_ok"] = c.f_side_ok;
        jc["f_side"] = c.f_side_note;
        json reqs = json::array();
        for (const auto& r : c.phi_requirements)
            reqs.push_back({{"condition", r.condition}, {"satisfied", r.satisfied}});
        jc["phi_requirements"] = reqs;
        jc["applicable"] = c.applicable;
        cases.push_back(jc);
    }
    j["cases"] = cases;
    return j;
}

json monotonicity_to_json(const std::vector<MonotonicityReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) {
        json j;
        j["quantity"] = r.quantity;
        j["direction"] = r.direction;
        j["worst_violation"] = r.worst_violation;
        if (r.has_violation_time) j["first_violation_time"] = r.first_violation_time;
        else j["first_violation_time"] = nullptr;
        j["pass"] = r.pass;
        j["tolerance"] = r.tolerance;
        arr.push_back(j);
    }
    return arr;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string series_csv(const RunResult& result) {
    std::string out =
        "t,tau,theta,kappa_min,kappa_max,pinch_ratio,G_max,HoverF_max,KoverFn_min,Zsigma_max,"
        "rPhi_max,Ztso_max,Ztso_valid,speed_min,speed_max,sup_dev_unit\n";
    for (const MonitorRecord& r : result.series) {
        out += format_double(r.t);
        out += ',';
        out += format_double(r.tau);
        out += ',';
        out += format_double(r.theta);
        out += ',';
        out += format_double(r.kappa_min);
        out += ',';
        out += format_double(r.kappa_max);
        out += ',';
        out += format_double(r.pinch_ratio);
        out += ',';
        out += format_double(r.G_max);
        out += ',';
        out += format_double(r.HoverF_max);
        out += ',';
        out += format_double(r.KoverFn_min);
        out += ',';
        out += format_double(r.Zsigma_max);
        out += ',';
        out += format_double(r.rPhi_max);
        out += ',';
        out += format_double(r.Ztso_max);
        out += ',';
        out += r.Ztso_valid ? '1' : '0';
        out += ',';
        out += format_double(r.speed_min);
        out += ',';
        out += format_double(r.speed_max);
        out += ',';
        out += format_double(r.sup_dev_unit);
        out += '\n';
    }
    return out;
}

std::string profile_csv(const SupportProfile& profile) {
    const CosineBasis& b = profile.basis();
    const auto u = profile.node_values();
    const CurvatureField field = radii(profile);
    std::string out = "theta,u,r1,r2\n";
    for (int j = 0; j <= b.N; ++j) {
        out += format_double(b.theta[j]);
        out += ',';
        out += format_double(u[j]);
        out += ',';
        out += format_double(field.r1[j]);
        out += ',';
        out += format_double(field.r2[j]);
        out += '\n';
    }
    return out;
}

std::string profile_svg(const SupportProfile& profile) {
    const auto pts = embed_profile(profile);
    double zmin = pts[0][0], zmax = pts[0][0], rmax = 0.0;
    for (const auto& p : pts) {
        zmin = std::min(zmin, p[0]);
        zmax = std::max(zmax, p[0]);
        rmax = std::max(rmax, p[1]);
    }
    const double span = std::max({zmax - zmin, rmax, 1e-12});
    const double scale = 0.9 / span;
    const double z0 = 0.5 * (zmin + zmax);
    char buf[64];
    std::string out =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\">\n<polyline fill=\"none\" "
        "stroke=\"black\" stroke-width=\"0.004\" points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
        const double x = 0.5 + (pts[i][0] - z0) * scale;
        const double y = 0.95 - pts[i][1] * scale;
        std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i ? " " : "", x, y);
        out += buf;
    }
    out += "\"/>\n</svg>\n";
    return out;
}

namespace {
void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}
}  // namespace

void write_outputs(const RunResult& result, const RunConfig& config, const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root / "snapshots");

    json run;
    run["config"] = config_to_json(config, &result);
    run["T_est"] = result.extinction.T_est;
    run["p_est"] = result.extinction.p_est;
    run["theta_bar"] = result.extinction.theta_bar;
    run["extinction_confident"] = result.extinction.confident;
    run["termination_reason"] = result.termination_reason;
    run["steps"] = result.steps;
    run["t_final"] = result.t_final;
    run["classification"] = classification_to_json(result.classification);
    run["monotonicity"] = monotonicity_to_json(result.monotonicity);
    run["decay_rate"] = result.decay.rate;
    run["decay_fit_residual"] = result.decay.residual;
    write_file(root / "run.json", run.dump(2) + "\n");

    write_file(root / "series.csv", series_csv(result));

    // rebuild profiles on a shared basis for the snapshot writers
    SupportProfile proto(config.n, std::vector<double>(result.final_coeff), result.nodes);
    for (const Snapshot& s : result.snapshots) {
        const SupportProfile p = proto.with_coeffs(s.coeff);
        char name[64];
        std::snprintf(name, sizeof(name), "profile_%03d", s.index);
        write_file(root / "snapshots" / (std::string(name) + ".csv"), profile_csv(p));
        write_file(root / "snapshots" / (std::string(name) + ".svg"), profile_svg(p));
    }
}

}  // namespace nhflow
