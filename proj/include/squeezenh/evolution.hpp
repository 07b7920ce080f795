#pragma once

#include <functional>
#include <vector>

#include "squeezenh/banded_operator.hpp"
#include "squeezenh/collective_moments.hpp"
#include "squeezenh/frame.hpp"
#include "squeezenh/propagator.hpp"
#include "squeezenh/spin_state.hpp"
#include "squeezenh/trace.hpp"

namespace squeezenh {

// Returns true to end the run after the latest sample.
using StopRule = std::function<bool(const std::vector<SqueezingSnapshot>&)>;
using StateObserver = std::function<void(double t, const SpinState&)>;

struct EvolveOptions {
  PropagationOptions propagation;
  StopRule stop;
  StateObserver observer;
  // Additional sample times merged into the grid (e.g. for Q snapshots).
  std::vector<double> extra_times;
  // Frame the Hamiltonian and initial state are written in; snapshots are always lab quantities.
  Frame frame = Frame::lab;
};

SqueezingSnapshot take_snapshot(const CollectiveMoments& moments, const SpinState& state, double t,
                                Frame frame = Frame::lab);

EvolutionTrace evolve(const BandedOperator& h, const SpinState& initial, const TimeGrid& grid,
                      const EvolveOptions& options = {});

// Earliest sampled t after which every later sample has
// |xi2 - steady_xi2| / steady_xi2 < rel_tol. Throws NumericalError("not yet steady")
// when the last sample is still outside the band.
double detect_steady_time(const EvolutionTrace& trace, double steady_xi2, double rel_tol = 0.01);
// Same, with the final sample standing in for the steady value.
double detect_steady_time_from_tail(const EvolutionTrace& trace, double rel_tol = 0.01);

}  // namespace squeezenh
