#include "squeezenh/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "squeezenh/error.hpp"
#include "squeezenh/squeezing.hpp"

namespace squeezenh {

std::vector<double> TimeGrid::times() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("grid duration must be positive");
  if (!(t_first > 0.0) || !(t_switch > 0.0)) throw std::invalid_argument("grid start times must be positive");
  if (per_decade < 1) throw std::invalid_argument("grid needs at least one sample per decade");

  std::vector<double> out{0.0};
  const double geometric_end = std::min(t_switch, duration);
  const double ratio = std::pow(10.0, 1.0 / per_decade);
  if (t_first < geometric_end) {
    for (int i = 0;; ++i) {
      const double t = t_first * std::pow(ratio, i);
      if (t >= geometric_end) break;
      out.push_back(t);
    }
  }
  const double last = out.back();
  const double step = last > 0.0 ? last * (ratio - 1.0) : duration / 1000.0;
  const double start = last;
  for (long i = 1;; ++i) {
    const double t = start + static_cast<double>(i) * step;
    if (t >= duration * (1.0 - 1e-12)) break;
    out.push_back(t);
  }
  out.push_back(duration);
  return out;
}

SqueezingSnapshot take_snapshot(const CollectiveMoments& moments, const SpinState& state, double t, Frame frame) {
  const SpinMoments m = to_lab(moments(state.amplitudes()), frame);
  const SqueezingResult sq = squeezing_parameter(m, state.sector().n_atoms());
  SqueezingSnapshot snap;
  snap.t = t;
  snap.xi2 = sq.xi2;
  snap.alpha_min = sq.alpha_min;
  snap.alpha_degenerate = sq.alpha_degenerate;
  snap.log_p = state.log_survival_probability();
  snap.p = std::exp(snap.log_p);
  snap.jx_mean = m.mean.x();
  snap.jy_mean = m.mean.y();
  snap.jz_mean = m.mean.z();
  return snap;
}

EvolutionTrace evolve(const BandedOperator& h, const SpinState& initial, const TimeGrid& grid,
                      const EvolveOptions& options) {
  std::vector<double> times = grid.times();
  if (!options.extra_times.empty()) {
    for (double t : options.extra_times) {
      if (t > 0.0 && t <= grid.duration) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(b)); }),
                times.end());
  }

  EvolutionTrace trace;
  trace.grid = grid;
  trace.samples.reserve(times.size());
  const CollectiveMoments moments(initial.sector());
  Propagator propagator(h, options.propagation);
  SpinState state = initial;
  double t_now = 0.0;
  for (double t : times) {
    propagator.advance(state, t - t_now);
    t_now = t;
    trace.samples.push_back(take_snapshot(moments, state, t, options.frame));
    if (options.observer) options.observer(t, state);
    if (options.stop && options.stop(trace.samples)) {
      trace.stopped_early = t < grid.duration;
      break;
    }
  }
  return trace;
}

double detect_steady_time(const EvolutionTrace& trace, double steady_xi2, double rel_tol) {
  if (!(steady_xi2 > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("steady value and tolerance must be positive");
  const auto& s = trace.samples;
  if (s.empty()) throw NumericalError("not yet steady");
  auto inside = [&](const SqueezingSnapshot& x) { return std::abs(x.xi2 - steady_xi2) / steady_xi2 < rel_tol; };
  if (!inside(s.back())) throw NumericalError("not yet steady");
  std::size_t first = s.size() - 1;
  while (first > 0 && inside(s[first - 1])) --first;
  return s[first].t;
}

double detect_steady_time_from_tail(const EvolutionTrace& trace, double rel_tol) {
  if (trace.samples.empty()) throw NumericalError("not yet steady");
  return detect_steady_time(trace, trace.samples.back().xi2, rel_tol);
}

}  // namespace squeezenh
