#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "cqnls/ground_state.hpp"
#include "cqnls/inout.hpp"
#include "cqnls/propagator.hpp"

namespace cqnls {

struct ScenarioConfig {
    std::string scenario;
    int n = 512;
    double half_width = 40.0;
    nlohmann::json initial;  // {"type": "ground-state" | "scaled-ground-state" |
                             //  "gaussian" | "chirped-gaussian" | "field-file", ...}
    std::optional<double> mass_factor;  // normalize M(u0) to factor * M(Q)
    std::optional<double> mass_target;  // ... or to an absolute value
    double dt = 0.0;
    double T = 0.0;
    int cadence = 100;
    std::vector<double> radii{5.0, 10.0};
    std::vector<double> n_list{8.0, 16.0, 32.0};
    std::vector<double> r_list{4.0, 8.0, 16.0};
    std::vector<double> c_list{0.5, 1.0, 2.0, 4.0};
    int kind = 1;
    int trials = 8;
    int windows = 3;
    int samples = 8;
    int profile_m = 1024;
    int n_profiles = 200;
    double rmax = 20.0;
    double gs_tol = 1e-10;
    int gs_max_iter = 500;
    std::optional<bool> absorber;  // scenario-dependent default when unset
    uint64_t seed = 1234;
    std::string out_csv, out_field, out_summary, out_svg;
    nlohmann::json raw;  // exactly what was parsed, for the config hash
};

/// Parses and validates a scenario config; throws std::invalid_argument with
/// the offending field path on malformed input.
ScenarioConfig parse_scenario_config(const nlohmann::json& j,
                                     const std::string& scenario_override = "");

struct ScenarioResult {
    int exit_code = 0;  // 0 ok, 1 checks failed or NaN abort, 2 config error
    nlohmann::json summary;
};

/// Runs one scenario end to end, writing the configured artifacts. The JSON
/// summary always carries the config hash, version string, warnings, and the
/// scenario's pass/fail checks.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// M(Q) on this grid (Petviashvili, cached per grid within the process).
double townes_mass(const GridSpec& g);

uint64_t fnv1a_hash(const std::string& s);

}  // namespace cqnls
