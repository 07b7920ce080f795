#pragma once

#include <vector>

namespace squeezenh {

// Squeezing observables of one propagated state at time t (units of 1/chi).
struct SqueezingSnapshot {
  double t = 0.0;
  double xi2 = 1.0;
  double alpha_min = 0.0;  // (-pi/2, pi/2], measured from the first transverse axis
  bool alpha_degenerate = false;
  double p = 1.0;      // no-decay probability
  double log_p = 0.0;  // ln P, finite even when P underflows
  double jz_mean = 0.0;
  double jx_mean = 0.0;
  double jy_mean = 0.0;
};

// Geometric sampling from t_first up to t_switch, then linear spacing up to
// duration with the step of the last geometric interval. t = 0 is always the
// first sample.
struct TimeGrid {
  double duration = 1.0;
  double t_first = 1e-4;
  double t_switch = 1.0;
  int per_decade = 400;

  // Throws std::invalid_argument on non-positive or inconsistent settings.
  std::vector<double> times() const;
};

struct EvolutionTrace {
  TimeGrid grid;
  std::vector<SqueezingSnapshot> samples;
  // True when a stop rule ended the run before grid.duration.
  bool stopped_early = false;
};

}  // namespace squeezenh
