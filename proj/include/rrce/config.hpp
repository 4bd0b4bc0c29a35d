// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrce/evaluation.hpp"

namespace rrce {

enum class Command { Design, Estimate, Sweep, Identities };

std::string to_string(Command c);
Command parse_command(const std::string& s);

struct DesignSpec {
    std::string beam = "geb";
    Index dim = 6;
    bool export_pattern = false;
    double pattern_step_deg = 0.1;

    friend bool operator==(const DesignSpec&, const DesignSpec&) = default;
};

struct EstimateSpec {
    std::vector<std::string> estimators = {"rr_mmse_joint"};
    std::vector<std::string> beams = {"geb"};
    Index dim = 6;
    ErrorTarget target = ErrorTarget::Full;

    friend bool operator==(const EstimateSpec&, const EstimateSpec&) = default;
};

/// Fully validated run configuration. `scenario.seed` is the run seed and
/// `mc_trials` applies to both sweeps and single-point estimates.
struct RunConfig {
    int schema_version = 1;
    Command command = Command::Sweep;
    Scenario scenario;
    SweepSpec sweep;
    DesignSpec design;
    EstimateSpec estimate;
    std::string output_dir = "out";
    int threads = 0;  // 0 = hardware concurrency
    Index mc_trials = 0;

    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr int kSchemaVersion = 1;

/// Default grid of a sweep axis when the config names the axis but no grid.
std::vector<double> default_grid(SweepAxis axis);

/// Parses a JSON document. Unknown keys and type mismatches raise ConfigError
/// naming the key. `base_dir` resolves a relative "scenario_file".
RunConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");

RunConfig parse_config_file(const std::string& path);

/// Effective-config snapshot; `parse_config_text(serialize_config(c)) == c`.
std::string serialize_config(const RunConfig& config);

/// Grid syntax for command-line overrides: "4,5,6" or "start:stop[:step]".
std::vector<double> parse_grid(const std::string& text);

} // namespace rrce
