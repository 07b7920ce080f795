#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "squeezenh/config.hpp"
#include "squeezenh/experiments.hpp"
#include "squeezenh/output_table.hpp"

namespace squeezenh {

inline constexpr const char* kCodeVersion = "0.1.0";

// Runs the experiment described by `config` and returns its output tables in a
// fixed order. Provenance (config hash, code version) is attached to each.
std::vector<OutputTable> run_experiment(const ExperimentConfig& config);

OutputTable trace_table(const EvolutionTrace& trace);
OutputTable scaling_table(const ScalingStudy& study);
OutputTable fits_table(const ScalingStudy& study);
OutputTable baselines_table(const std::vector<int>& n_values, const std::vector<Baseline>& oat,
                            const std::vector<Baseline>& tact);

// Full command-line entry point. Exit codes: 0 success, 1 configuration or
// usage error, 2 numerical failure. Data goes to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace squeezenh
