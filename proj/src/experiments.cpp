#include "squeezenh/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "squeezenh/error.hpp"
#include "squeezenh/evolution.hpp"
#include "squeezenh/spin_operators.hpp"
#include "squeezenh/squeezing.hpp"
#include "squeezenh/steady_state.hpp"

namespace squeezenh {

namespace {

// Runs fn(0..count-1) on a pool of `workers` threads pulling indices from a shared
// counter. Results land in index order; the first failure in index order is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, int workers, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

TimeGrid trace_grid(double duration, const RunOptions& options) {
  return TimeGrid{duration, 1e-4, 1.0, options.per_decade};
}

EvolveOptions evolve_options(const RunOptions& options) {
  EvolveOptions ev;
  ev.propagation.tol = options.tol;
  ev.frame = options.frame;
  return ev;
}

// Hermitian runs: stop once xi2 has climbed to three times its running minimum.
StopRule rise_rule() {
  return [](const std::vector<SqueezingSnapshot>& s) {
    double lowest = s.front().xi2;
    for (const auto& x : s) lowest = std::min(lowest, x.xi2);
    return lowest < 1.0 && s.back().xi2 >= 3.0 * lowest;
  };
}

// Dissipative runs: stop once both xi2 and the decay rate d(ln P)/dt sit on
// their steady values for two consecutive samples.
StopRule steady_rule(double steady_xi2, Complex eigenvalue) {
  const double rate = 2.0 * eigenvalue.imag();
  return [steady_xi2, rate](const std::vector<SqueezingSnapshot>& s) {
    constexpr double kBand = 1e-4;
    auto settled = [&](std::size_t i) {
      if (i == 0) return false;
      const double r = (s[i].log_p - s[i - 1].log_p) / (s[i].t - s[i - 1].t);
      return std::abs(s[i].xi2 - steady_xi2) <= kBand * steady_xi2 && std::abs(r - rate) <= kBand * std::abs(rate);
    };
    const std::size_t n = s.size();
    return n >= 3 && settled(n - 1) && settled(n - 2);
  };
}

double interpolate_log_p(const EvolutionTrace& trace, double t) {
  const auto& s = trace.samples;
  auto it = std::lower_bound(s.begin(), s.end(), t, [](const SqueezingSnapshot& x, double v) { return x.t < v; });
  if (it == s.begin()) return s.front().log_p;
  if (it == s.end()) return s.back().log_p;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.log_p + w * (hi.log_p - lo.log_p);
}

Baseline hermitian_optimum(const BandedOperator& h, const SpinSector& sector, const RunOptions& options) {
  EvolveOptions ev = evolve_options(options);
  ev.stop = rise_rule();
  const EvolutionTrace trace = evolve(h, all_down(sector, options.frame), trace_grid(options.max_duration, options), ev);
  const TMinResult m = detect_t_min(trace);
  Baseline out;
  out.xi2_min = m.xi2_min;
  out.t_min = m.t_min;
  return out;
}

void check_n(int n_atoms, int minimum) {
  if (n_atoms < minimum) throw ConfigError("N ≥ " + std::to_string(minimum) + " required");
}

}  // namespace

double GammaRule::operator()(int n_atoms) const {
  if (kind == Kind::fixed) return value;
  return 1.0 / (value * n_atoms);
}

GammaRule GammaRule::parse(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s.push_back(c);
  }
  GammaRule rule;
  if (s.rfind("1/(", 0) == 0 && s.size() > 5 && s.substr(s.size() - 2) == "N)") {
    const std::string coeff = s.substr(3, s.size() - 5);
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(coeff, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != coeff.size() || !(c > 0.0)) throw ConfigError("bad gamma rule '" + text + "'");
    rule.kind = Kind::inverse_linear;
    rule.value = c;
    return rule;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !(v >= 0.0) || !std::isfinite(v)) {
    throw ConfigError("bad gamma rule '" + text + "'; expected a number or 1/(cN)");
  }
  rule.value = v;
  return rule;
}

std::string GammaRule::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::fixed) {
    os << value;
  } else {
    os << "1/(" << value << "N)";
  }
  return os.str();
}

std::vector<int> default_n_grid(int n_max) {
  std::vector<int> out;
  for (int i = 0;; ++i) {
    const int n = static_cast<int>(std::lround(std::pow(10.0, 2.0 + i / 5.0)));
    if (n > n_max) break;
    out.push_back(n);
  }
  return out;
}

Baseline baseline_oat(int n_atoms, const RunOptions& options) {
  check_n(n_atoms, 4);
  const ModelParams params{n_atoms, 1.0, 0.0};
  const DynamicOptimum opt = dynamic_optimum(params, options);
  Baseline out;
  out.xi2_min = opt.xi2_min;
  out.t_min = opt.t_min;
  out.xi2_asymptotic = 1.15 * std::pow(n_atoms, -2.0 / 3.0);
  out.t_asymptotic = 1.2 * std::pow(n_atoms, -2.0 / 3.0);
  return out;
}

Baseline baseline_tact(int n_atoms, const RunOptions& options) {
  check_n(n_atoms, 4);
  const SpinSector sector(n_atoms);
  Baseline out = hermitian_optimum(build_h_tact(sector, 1.0, options.frame), sector, options);
  out.xi2_asymptotic = 4.0 / n_atoms;
  out.t_asymptotic = std::log(4.0 * n_atoms) / (2.0 * n_atoms);
  return out;
}

SteadyPoint steady_point(const ModelParams& params, const RunOptions& options) {
  params.validate();
  check_n(params.n_atoms, 2);
  if (!(params.gamma_over_chi > 0.0)) throw ConfigError("steady state needs gamma/chi > 0");
  const SpinSector sector = params.sector();
  SteadyStateOptions so;
  Frame frame = Frame::lab;
  if (sector.dim() > so.dense_max_dim) {
    frame = options.frame;
    so.method = SteadyStateMethod::propagation;
    so.initial = all_down(sector, frame);
  }
  const BandedOperator h = build_h_eff(params, frame);
  const EigenPair pair = steady_state(h, so);
  const CollectiveMoments moments(sector);
  const SqueezingResult sq =
      squeezing_parameter(to_lab(moments(pair.right_eigenvector.amplitudes()), frame), params.n_atoms);
  SteadyPoint out;
  out.gamma_over_chi = params.gamma_over_chi;
  out.xi2 = sq.xi2;
  out.alpha_min = sq.alpha_min;
  out.eigenvalue = pair.eigenvalue;
  out.residual = pair.scaled_residual();
  return out;
}

SteadySweep run_steady_sweep(int n_atoms, const std::vector<double>& gamma_grid, const RunOptions& options) {
  check_n(n_atoms, 4);
  if (gamma_grid.size() < 3) throw ConfigError("steady sweep needs at least 3 gamma values");
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    if (!(gamma_grid[i] > 0.0)) throw ConfigError("gamma grid values must be positive");
    if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1])) throw ConfigError("gamma grid must be increasing");
  }

  SteadySweep out;
  out.n_atoms = n_atoms;
  auto xi2_at = [&](double g) { return steady_point(ModelParams{n_atoms, 1.0, g}, options).xi2; };
  // Baselines ride along as the last two work items.
  const std::size_t count = gamma_grid.size();
  struct Item {
    std::optional<SteadyPoint> point;
    Baseline baseline;
  };
  const auto items = parallel_map(count + 2, options.workers, [&](std::size_t i) {
    Item item;
    if (i < count) {
      try {
        item.point = steady_point(ModelParams{n_atoms, 1.0, gamma_grid[i]}, options);
      } catch (const AmbiguousSteadyStateError&) {
      }
    } else if (i == count) {
      item.baseline = baseline_oat(n_atoms, options);
    } else {
      item.baseline = baseline_tact(n_atoms, options);
    }
    return item;
  });
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) {
    if (items[i].point) {
      out.points.push_back(*items[i].point);
      grid.push_back(gamma_grid[i]);
    } else {
      out.ambiguous.push_back(gamma_grid[i]);
    }
  }
  out.oat = items[count].baseline;
  out.tact = items[count + 1].baseline;
  if (out.points.empty()) throw AmbiguousSteadyStateError();

  constexpr double kResolution = 1e-6;
  out.markers.resolution = kResolution;
  const std::size_t valid = grid.size();
  std::size_t best = 0;
  for (std::size_t i = 1; i < valid; ++i) {
    if (out.points[i].xi2 < out.points[best].xi2) best = i;
  }
  out.markers.gamma_at_minimum = grid[best];
  out.markers.xi2_at_minimum = out.points[best].xi2;
  if (best > 0 && best + 1 < valid) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = grid[best - 1];
    double b = grid[best + 1];
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = xi2_at(c);
    double fd = xi2_at(d);
    while (b - a > kResolution) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = xi2_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = xi2_at(d);
      }
    }
    const double g = 0.5 * (a + b);
    const double f = xi2_at(g);
    if (f <= out.markers.xi2_at_minimum) {
      out.markers.gamma_at_minimum = g;
      out.markers.xi2_at_minimum = f;
    }
  }

  const double tact = out.tact.xi2_min;
  for (std::size_t i = 0; i + 1 < valid; ++i) {
    const double lo_val = out.points[i].xi2 - tact;
    const double hi_val = out.points[i + 1].xi2 - tact;
    if (lo_val == 0.0) {
      out.markers.tact_crossings.push_back(grid[i]);
      continue;
    }
    if ((lo_val < 0.0) == (hi_val < 0.0) || hi_val == 0.0) continue;
    double a = grid[i];
    double b = grid[i + 1];
    double fa = lo_val;
    while (b - a > kResolution) {
      const double m = 0.5 * (a + b);
      const double fm = xi2_at(m) - tact;
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.markers.tact_crossings.push_back(0.5 * (a + b));
  }
  if (out.points.back().xi2 == tact) out.markers.tact_crossings.push_back(grid.back());
  return out;
}

EvolutionRun run_evolution(const EvolutionRequest& request, const RunOptions& options) {
  check_n(request.n_atoms, 2);
  if (!(request.duration > 0.0)) throw ConfigError("duration must be positive");
  if (request.gamma_over_chi < 0.0) throw ConfigError("gamma/chi must be >= 0");
  if (!request.q_times.empty() && (request.q_theta_points < 2 || request.q_phi_points < 2)) {
    throw ConfigError("Q grids need at least 2 points per axis");
  }
  for (double t : request.q_times) {
    if (!(t >= 0.0) || t > request.duration) throw ConfigError("Q snapshot times must lie in [0, duration]");
  }

  EvolutionRun run;
  run.params = ModelParams{request.n_atoms, 1.0, request.gamma_over_chi};
  const SpinSector sector = run.params.sector();
  const BandedOperator h = build_h_eff(run.params, options.frame);

  EvolveOptions ev = evolve_options(options);
  ev.extra_times = request.q_times;
  const auto theta = linspace(0.0, std::numbers::pi, static_cast<std::size_t>(request.q_theta_points));
  const auto phi = linspace(0.0, 2.0 * std::numbers::pi, static_cast<std::size_t>(request.q_phi_points));
  std::vector<double> pending = request.q_times;
  std::sort(pending.begin(), pending.end());
  const CollectiveMoments moments(sector);
  ev.observer = [&](double t, const SpinState& state) {
    while (!pending.empty() && std::abs(pending.front() - t) <= 1e-12 * std::max(1.0, t)) {
      pending.erase(pending.begin());
      QSnapshot snap;
      snap.t = t;
      const SqueezingResult sq = squeezing_parameter(to_lab(moments(state.amplitudes()), options.frame), sector.n_atoms());
      snap.alpha_min = sq.alpha_min;
      snap.grid = husimi_q(state, theta, phi, options.frame);
      snap.q_axis_angle = q_principal_angle(snap.grid, sq.e1, sq.e2);
      run.snapshots.push_back(std::move(snap));
    }
  };
  run.trace = evolve(h, all_down(sector, options.frame), trace_grid(request.duration, options), ev);
  return run;
}

DynamicOptimum dynamic_optimum(const ModelParams& params, const RunOptions& options) {
  params.validate();
  check_n(params.n_atoms, 2);
  const SpinSector sector = params.sector();
  const bool dissipative = params.gamma_over_chi > 0.0;

  DynamicOptimum out;
  out.n_atoms = params.n_atoms;
  out.gamma_over_chi = params.gamma_over_chi;

  EvolveOptions ev = evolve_options(options);
  if (dissipative) {
    // Without a unique steady state the run simply goes to max_duration.
    try {
      const SteadyPoint steady = steady_point(params, options);
      out.steady_xi2 = steady.xi2;
      ev.stop = steady_rule(steady.xi2, steady.eigenvalue);
    } catch (const AmbiguousSteadyStateError&) {
    }
  } else {
    ev.stop = rise_rule();
  }
  const BandedOperator h = build_h_eff(params, options.frame);
  const EvolutionTrace trace = evolve(h, all_down(sector, options.frame), trace_grid(options.max_duration, options), ev);
  out.run_duration = trace.samples.back().t;

  std::optional<TMinResult> m;
  try {
    m = detect_t_min(trace);
  } catch (const NumericalError&) {
    if (!dissipative || !trace.stopped_early) throw;
  }
  // A dip that stays inside the steady band is the steady plateau itself.
  if (dissipative && trace.stopped_early && out.steady_xi2 > 0.0 &&
      (!m || m->xi2_min >= out.steady_xi2 * (1.0 - options.steady_rel_tol))) {
    out.steady_limited = true;
    out.t_min = detect_steady_time(trace, out.steady_xi2, options.steady_rel_tol);
    out.xi2_min = m ? m->xi2_min : trace.samples.back().xi2;
    const auto it = std::find_if(trace.samples.begin(), trace.samples.end(),
                                 [&](const SqueezingSnapshot& s) { return s.t == out.t_min; });
    out.raw_t = out.t_min;
    out.raw_xi2 = it->xi2;
    out.alpha_min = it->alpha_min;
    out.log_p = it->log_p;
    return out;
  }
  out.xi2_min = m->xi2_min;
  out.t_min = m->t_min;
  out.raw_t = m->raw_t;
  out.raw_xi2 = m->raw_xi2;
  out.alpha_min = trace.samples[m->index].alpha_min;
  out.log_p = interpolate_log_p(trace, m->t_min);
  return out;
}

double ScalingRow::p() const { return std::exp(log_p); }
double ScalingRow::log10_p() const { return log_p / std::numbers::ln10; }
double ScalingRow::total_time() const { return t / p(); }
double ScalingRow::log10_total_time() const { return std::log10(t) - log10_p(); }

namespace {

void check_n_grid(const std::vector<int>& n_grid) {
  if (n_grid.empty()) throw ConfigError("N grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    check_n(n_grid[i], 4);
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("N grid must be strictly ascending");
  }
}

void fit_rows(ScalingStudy& study) {
  if (study.rows.size() < 3) return;
  std::vector<double> ns, xi2s, ts;
  for (const auto& r : study.rows) {
    ns.push_back(r.n_atoms);
    xi2s.push_back(r.xi2);
    ts.push_back(r.t);
  }
  study.xi2_fit = fit_power_law(ns, xi2s);
  if (std::all_of(ts.begin(), ts.end(), [](double t) { return t > 0.0; })) study.t_fit = fit_power_law(ns, ts);
}

}  // namespace

ScalingStudy run_scaling_steady(const std::vector<int>& n_grid, const GammaRule& rule, const RunOptions& options) {
  check_n_grid(n_grid);
  ScalingStudy study;
  study.rows = parallel_map(n_grid.size(), options.workers, [&](std::size_t i) {
    const ModelParams params{n_grid[i], 1.0, rule(n_grid[i])};
    const SteadyPoint steady = steady_point(params, options);
    EvolveOptions ev = evolve_options(options);
    ev.stop = steady_rule(steady.xi2, steady.eigenvalue);
    const SpinSector sector = params.sector();
    const EvolutionTrace trace =
        evolve(build_h_eff(params, options.frame), all_down(sector, options.frame), trace_grid(options.max_duration, options), ev);
    ScalingRow row;
    row.n_atoms = params.n_atoms;
    row.gamma_over_chi = params.gamma_over_chi;
    row.xi2 = steady.xi2;
    row.alpha_min = steady.alpha_min;
    row.t = detect_steady_time(trace, steady.xi2, options.steady_rel_tol);
    row.log_p = interpolate_log_p(trace, row.t);
    return row;
  });
  fit_rows(study);
  return study;
}

ScalingStudy run_scaling_dynamic(const std::vector<int>& n_grid, double gamma_over_chi, const RunOptions& options) {
  check_n_grid(n_grid);
  if (!(gamma_over_chi >= 0.0)) throw ConfigError("gamma/chi must be >= 0");
  ScalingStudy study;
  study.rows = parallel_map(n_grid.size(), options.workers, [&](std::size_t i) {
    const DynamicOptimum opt = dynamic_optimum(ModelParams{n_grid[i], 1.0, gamma_over_chi}, options);
    ScalingRow row;
    row.n_atoms = opt.n_atoms;
    row.gamma_over_chi = gamma_over_chi;
    row.xi2 = opt.xi2_min;
    row.alpha_min = opt.alpha_min;
    row.t = opt.t_min;
    row.log_p = opt.log_p;
    return row;
  });
  fit_rows(study);
  return study;
}

DynamicSweep run_gamma_sweep_dynamic(int n_atoms, const std::vector<double>& gamma_grid, const RunOptions& options) {
  check_n(n_atoms, 4);
  if (gamma_grid.empty()) throw ConfigError("gamma grid must not be empty");
  for (double g : gamma_grid) {
    if (!(g > 0.0)) throw ConfigError("gamma grid values must be positive");
  }
  DynamicSweep out;
  out.n_atoms = n_atoms;
  const std::size_t count = gamma_grid.size();
  struct Item {
    DynamicOptimum opt;
    Baseline baseline;
  };
  const auto items = parallel_map(count + 2, options.workers, [&](std::size_t i) {
    Item item;
    if (i < count) {
      item.opt = dynamic_optimum(ModelParams{n_atoms, 1.0, gamma_grid[i]}, options);
    } else if (i == count) {
      item.baseline = baseline_oat(n_atoms, options);
    } else {
      item.baseline = baseline_tact(n_atoms, options);
    }
    return item;
  });
  for (std::size_t i = 0; i < count; ++i) out.rows.push_back(items[i].opt);
  out.oat = items[count].baseline;
  out.tact = items[count + 1].baseline;

  std::vector<DynamicOptimum> by_gamma = out.rows;
  std::sort(by_gamma.begin(), by_gamma.end(),
            [](const DynamicOptimum& a, const DynamicOptimum& b) { return a.gamma_over_chi > b.gamma_over_chi; });
  out.squeezing_improves_as_gamma_drops = true;
  out.time_grows_as_gamma_drops = true;
  for (std::size_t i = 1; i < by_gamma.size(); ++i) {
    if (by_gamma[i].xi2_min > by_gamma[i - 1].xi2_min) out.squeezing_improves_as_gamma_drops = false;
    if (by_gamma[i].t_min < by_gamma[i - 1].t_min) out.time_grows_as_gamma_drops = false;
  }
  return out;
}

}  // namespace squeezenh
