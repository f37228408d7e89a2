// Run configuration parsing (strict JSON schema with pointer-path errors),
// dotted-key overrides and the bit-stable output writers: run.json,
// series.csv and per-snapshot CSV/SVG profiles.
#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nhflow/flow.hpp"

namespace nhflow {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, std::string pointer_path)
        : std::runtime_error(msg + " at " + pointer_path), pointer(std::move(pointer_path)) {}
    std::string pointer;
};

// Strict parse: unknown keys are rejected with their JSON pointer; n, f, phi
// and shape are required, everything else defaults.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);

// Dotted-key override "a.b=value"; value is parsed as a JSON literal with a
// string fallback.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Effective configuration echo; parse_config(config_to_json(...)) round-trips.
nlohmann::json config_to_json(const RunConfig& config, const RunResult* result = nullptr);

nlohmann::json f_report_to_json(const FConditionReport& rep);
nlohmann::json phi_report_to_json(const PhiConditionReport& rep);
nlohmann::json classification_to_json(const CaseClassification& cls);
nlohmann::json monotonicity_to_json(const std::vector<MonotonicityReport>& reports);

// Writes run.json, series.csv and snapshots/profile_<k>.{csv,svg} under dir.
// Doubles are printed with 17 significant digits and \n line endings; two
// identical runs produce byte-identical files.
void write_outputs(const RunResult& result, const RunConfig& config, const std::string& dir);

std::string format_double(double v);  // %.17g
std::string series_csv(const RunResult& result);
std::string profile_csv(const SupportProfile& profile);
std::string profile_svg(const SupportProfile& profile);

}  // namespace nhflow
