#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "squeezenh/experiments.hpp"

namespace squeezenh {

enum class ExperimentKind { steady, evolve, sweep, scaling_steady, scaling_dynamic, qfunc, baselines };

enum class SweepMode { steady, dynamic };

enum class OutputFormat { csv, json };

std::string to_string(ExperimentKind kind);
// Throws ConfigError on an unknown name.
ExperimentKind parse_kind(const std::string& name);

// Validated experiment description. Which fields are meaningful depends on kind;
// see docs/schemas.md.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::steady;
  int n_atoms = 20;
  std::vector<int> n_grid;
  std::optional<GammaRule> gamma;  // gamma_over_chi or gamma_rule
  std::vector<double> gamma_grid;
  SweepMode sweep_mode = SweepMode::steady;
  double duration = 5.0;
  std::vector<double> q_times;
  int q_theta_points = 181;
  int q_phi_points = 361;
  RunOptions run;
  std::string out_dir;  // empty: tables go to stdout
  OutputFormat format = OutputFormat::csv;

  // Canonical JSON of the resolved config; its hash is the provenance key.
  nlohmann::json to_json() const;
  std::string hash() const;
};

// Applies defaults and validates. Unknown keys, wrong types, missing required
// keys and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Re-runs validation after command-line overrides.
void validate(ExperimentConfig& config);

}  // namespace squeezenh
