#pragma once

#include <optional>
#include <string>
#include <vector>

#include "squeezenh/banded_operator.hpp"
#include "squeezenh/frame.hpp"
#include "squeezenh/husimi.hpp"
#include "squeezenh/power_law.hpp"
#include "squeezenh/spin_operators.hpp"
#include "squeezenh/trace.hpp"

namespace squeezenh {

struct RunOptions {
  double tol = 1e-10;  // propagation error per unit chi*t
  int workers = 1;
  Frame frame = Frame::twist;
  // Relative band used to define the steady time t_s.
  double steady_rel_tol = 0.01;
  // Hard cap on chi*t for runs that stop on their own.
  double max_duration = 20.0;
  // Sampling density of the geometric part of every trace.
  int per_decade = 400;
};

// Rule for gamma/chi that may depend on N.
struct GammaRule {
  enum class Kind { fixed, inverse_linear } kind = Kind::fixed;
  double value = 0.0;  // fixed: gamma/chi; inverse_linear: c in gamma/chi = 1/(c N)

  double operator()(int n_atoms) const;
  // Accepts a number or the text "1/(<c>N)", e.g. "1/(0.03N)".
  static GammaRule parse(const std::string& text);
  std::string describe() const;
};

// 10^(2 + i/5) rounded, for all values <= n_max. 100, 158, 251, 398, 631, 1000, ...
std::vector<int> default_n_grid(int n_max = 3162);

struct Baseline {
  double xi2_min = 0.0;
  double t_min = 0.0;
  double xi2_asymptotic = 0.0;  // OAT: 1.15 N^(-2/3);  TACT: 4/N
  double t_asymptotic = 0.0;    // OAT: 1.2 N^(-2/3);   TACT: ln(4N)/(2N)
};

// Numerically exact optimum of the Hermitian evolution from |down...down>.
Baseline baseline_oat(int n_atoms, const RunOptions& options = {});
Baseline baseline_tact(int n_atoms, const RunOptions& options = {});

struct SteadyPoint {
  double gamma_over_chi = 0.0;
  double xi2 = 0.0;
  double alpha_min = 0.0;
  Complex eigenvalue;
  double residual = 0.0;  // scaled eigen-residual
};

// Steady state of H_eff for one parameter set. Dense lab-frame eigensolve for
// dim <= 2048, otherwise converged propagation in options.frame.
SteadyPoint steady_point(const ModelParams& params, const RunOptions& options = {});

struct SweepMarkers {
  double gamma_at_minimum = 0.0;
  double xi2_at_minimum = 0.0;
  // Crossings of the steady curve with the TACT baseline, ascending in gamma.
  std::vector<double> tact_crossings;
  double resolution = 0.0;  // bracket width at which refinement stopped
};

struct SteadySweep {
  int n_atoms = 0;
  std::vector<SteadyPoint> points;  // grid points with a unique steady state
  // Grid points where the leading decay rates tie (e.g. all Im E = -gamma N/4
  // at small gamma), so no steady state exists.
  std::vector<double> ambiguous;
  Baseline oat;
  Baseline tact;
  SweepMarkers markers;
};

// Grid points are evaluated independently; the minimum is refined by golden
// section and each sign change of (xi2 - TACT) by bisection.
SteadySweep run_steady_sweep(int n_atoms, const std::vector<double>& gamma_grid, const RunOptions& options = {});

struct QSnapshot {
  double t = 0.0;
  double alpha_min = 0.0;
  double q_axis_angle = 0.0;  // principal axis of Q in the transverse plane, from +x
  QGrid grid;
};

struct EvolutionRun {
  ModelParams params;
  EvolutionTrace trace;
  std::vector<QSnapshot> snapshots;
};

struct EvolutionRequest {
  int n_atoms = 20;
  double gamma_over_chi = 0.0;
  double duration = 5.0;
  std::vector<double> q_times;
  int q_theta_points = 181;
  int q_phi_points = 361;
};

EvolutionRun run_evolution(const EvolutionRequest& request, const RunOptions& options = {});

// Global minimum of xi2 along the trajectory from |down...down>.
struct DynamicOptimum {
  int n_atoms = 0;
  double gamma_over_chi = 0.0;
  double xi2_min = 0.0;
  double t_min = 0.0;
  double alpha_min = 0.0;
  double log_p = 0.0;  // ln P at t_min
  double raw_t = 0.0;
  double raw_xi2 = 0.0;
  double steady_xi2 = 0.0;  // 0 when gamma = 0
  // True when xi2 approaches the steady value from above without an interior
  // minimum; t_min is then the steady time.
  bool steady_limited = false;
  double run_duration = 0.0;
};

DynamicOptimum dynamic_optimum(const ModelParams& params, const RunOptions& options = {});

struct ScalingRow {
  int n_atoms = 0;
  double gamma_over_chi = 0.0;
  double xi2 = 0.0;
  double alpha_min = 0.0;
  double t = 0.0;  // t_s (steady study) or t_min (dynamic study)
  double log_p = 0.0;

  double p() const;
  double log10_p() const;
  double total_time() const;  // t / P, +inf when P underflows
  double log10_total_time() const;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  PowerLawFit xi2_fit;
  std::optional<PowerLawFit> t_fit;
};

// gamma/chi per N from `rule`; t is the steady time with options.steady_rel_tol.
ScalingStudy run_scaling_steady(const std::vector<int>& n_grid, const GammaRule& rule, const RunOptions& options = {});
ScalingStudy run_scaling_dynamic(const std::vector<int>& n_grid, double gamma_over_chi,
                                 const RunOptions& options = {});

struct DynamicSweep {
  int n_atoms = 0;
  std::vector<DynamicOptimum> rows;  // in grid order
  Baseline oat;
  Baseline tact;
  // Over the grid sorted by decreasing gamma: xi2_min never increases / t_min never decreases.
  bool squeezing_improves_as_gamma_drops = false;
  bool time_grows_as_gamma_drops = false;
};

DynamicSweep run_gamma_sweep_dynamic(int n_atoms, const std::vector<double>& gamma_grid,
                                     const RunOptions& options = {});

}  // namespace squeezenh
