#include <doctest.h>

#include <cmath>

#include "qubit_oracle.hpp"
#include "squeezenh/error.hpp"
#include "squeezenh/experiments.hpp"
#include "squeezenh/squeezing.hpp"

using namespace squeezenh;

namespace {

// Oracle xi2 minimum on [t_lo, t_hi], refined by a parabola through the best sample.
std::pair<double, double> oracle_minimum(int n, double g, double t_lo, double t_hi, int points) {
  std::vector<double> times;
  for (int i = 0; i <= points; ++i) times.push_back(t_lo + (t_hi - t_lo) * i / points);
  const auto s = oracle::trajectory(n, 1.0, g, times);
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].xi2 < s[best].xi2) best = i;
  }
  REQUIRE(best > 0);
  REQUIRE(best + 1 < s.size());
  const double h = times[1] - times[0];
  const double a = s[best - 1].xi2, b = s[best].xi2, c = s[best + 1].xi2;
  const double shift = 0.5 * h * (a - c) / (a - 2 * b + c);
  return {s[best].t + shift, b - 0.25 * (a - c) * shift / h};
}

}  // namespace

TEST_CASE("default N grid and gamma rules") {
  CHECK(default_n_grid() == std::vector<int>{100, 158, 251, 398, 631, 1000, 1585, 2512});
  CHECK(default_n_grid(10000).back() == 10000);

  const GammaRule rule = GammaRule::parse("1/(0.03N)");
  CHECK(rule.kind == GammaRule::Kind::inverse_linear);
  CHECK(rule(100) == doctest::Approx(1.0 / 3.0));
  CHECK(GammaRule::parse(" 1/(0.03 N) ")(1000) == doctest::Approx(1.0 / 30.0));
  CHECK(GammaRule::parse(rule.describe())(512) == rule(512));
  CHECK(GammaRule::parse("0.5")(7) == 0.5);
  for (const char* bad : {"abc", "1/(0N)", "-1", "1/(xN)", "0.5x", ""}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(GammaRule::parse(bad), ConfigError);
  }
}

TEST_CASE("Hermitian baselines") {
  const Baseline oat = baseline_oat(20);
  // Closed-form scan with a parabola through the best three points.
  const double h = 1e-5;
  int best = 1;
  for (int i = 2; i < 30000; ++i) {
    if (oracle::oat_xi2(20, i * h) < oracle::oat_xi2(20, best * h)) best = i;
  }
  const double a = oracle::oat_xi2(20, (best - 1) * h), b = oracle::oat_xi2(20, best * h),
               c = oracle::oat_xi2(20, (best + 1) * h);
  const double shift = 0.5 * h * (a - c) / (a - 2 * b + c);
  CHECK(oat.xi2_min == doctest::Approx(b - 0.25 * (a - c) * shift / h).epsilon(1e-8));
  CHECK(oat.t_min == doctest::Approx(best * h + shift).epsilon(1e-4));
  CHECK(oat.xi2_asymptotic == doctest::Approx(1.15 * std::pow(20.0, -2.0 / 3.0)));

  // Bit-identical with the optimum of a plain gamma = 0 evolution.
  EvolutionRequest req;
  req.n_atoms = 20;
  req.duration = 0.5;
  const TMinResult m = detect_t_min(run_evolution(req).trace);
  CHECK(m.xi2_min == oat.xi2_min);
  CHECK(m.t_min == oat.t_min);

  const Baseline tact = baseline_tact(1000);
  CHECK(std::abs(tact.xi2_min / (4.0 / 1000) - 1.0) < 0.2);
  CHECK(tact.t_asymptotic == doctest::Approx(std::log(4000.0) / 2000.0));
  CHECK_THROWS_AS(baseline_oat(3), ConfigError);
  CHECK_THROWS_WITH_AS(baseline_tact(2), "N ≥ 4 required", ConfigError);
}

TEST_CASE("dynamic optimum against the qubit oracle") {
  for (double g : {0.5, 1.19, 5.0, 10.0}) {
    CAPTURE(g);
    const DynamicOptimum d = dynamic_optimum(ModelParams{12, 1.0, g});
    CHECK_FALSE(d.steady_limited);
    // Coarse scan of the whole run for a lower point, then a fine local scan.
    const auto coarse = oracle::trajectory(12, 1.0, g, [&] {
      std::vector<double> t;
      for (double x = 0.01; x < d.run_duration; x += 0.01) t.push_back(x);
      return t;
    }());
    for (const auto& c : coarse) CHECK(c.xi2 >= d.xi2_min * (1.0 - 1e-6));
    auto [t_ref, xi2_ref] = oracle_minimum(12, g, d.t_min - 0.02, d.t_min + 0.02, 400);
    CHECK(d.xi2_min == doctest::Approx(xi2_ref).epsilon(1e-6));
    CHECK(d.t_min == doctest::Approx(t_ref).epsilon(1e-3));
    CHECK(d.log_p < 0.0);
  }
  // Strong decay does not recover the Hermitian optimum: it freezes the
  // twisting, so the optimum worsens monotonically past gamma/chi ~ 1.
  const double oat = baseline_oat(12).xi2_min;
  const double at5 = dynamic_optimum(ModelParams{12, 1.0, 5.0}).xi2_min;
  const double at10 = dynamic_optimum(ModelParams{12, 1.0, 10.0}).xi2_min;
  CHECK(oat < at5);
  CHECK(at5 < at10);
}

TEST_CASE("steady sweep markers at N = 20") {
  std::vector<double> grid;
  for (int i = 0; i <= 36; ++i) grid.push_back(0.05 + 0.05 * i);
  const SteadySweep sweep = run_steady_sweep(20, grid);
  CHECK(sweep.ambiguous == std::vector<double>{grid[0], grid[1]});
  CHECK(sweep.points.size() == grid.size() - 2);
  CHECK(sweep.markers.gamma_at_minimum == doctest::Approx(0.4664).epsilon(2e-3));
  CHECK(sweep.markers.resolution <= 1e-6);
  REQUIRE(!sweep.markers.tact_crossings.empty());
  CHECK(sweep.markers.tact_crossings.back() == doctest::Approx(1.1794).epsilon(2e-3));
  for (double c : sweep.markers.tact_crossings) {
    CHECK(steady_point(ModelParams{20, 1.0, c}).xi2 == doctest::Approx(sweep.tact.xi2_min).epsilon(1e-5));
  }
  auto xi2 = [](double g) { return steady_point(ModelParams{20, 1.0, g}).xi2; };
  CHECK(xi2(0.4673) < xi2(1.19));
  CHECK(xi2(1.19) < xi2(1.6393));
  CHECK(xi2(1.6393) < sweep.oat.xi2_min);
  CHECK(xi2(1.6393) > sweep.tact.xi2_min);
  CHECK_THROWS_AS(run_steady_sweep(20, {0.01, 0.02, 0.03}), NumericalError);
  CHECK_THROWS_AS(run_steady_sweep(20, {0.5, 1.0}), ConfigError);
}

TEST_CASE("evolution runs and Q snapshots") {
  EvolutionRequest req;
  req.n_atoms = 20;
  req.gamma_over_chi = 1.19;
  req.duration = 3.0;
  req.q_times = {0.2, 1.0, 3.0};
  req.q_theta_points = 91;
  req.q_phi_points = 181;
  const EvolutionRun run = run_evolution(req);
  REQUIRE(run.snapshots.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(run.snapshots[i].t == req.q_times[i]);
    CHECK(q_normalization(run.snapshots[i].grid) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(run.snapshots[i].grid.values.size() == 91u * 181u);
  }
  // Early on the decaying run follows the Hermitian one.
  EvolutionRequest herm = req;
  herm.gamma_over_chi = 0.0;
  herm.q_times = {0.2};
  herm.duration = 0.5;
  const EvolutionRun h = run_evolution(herm);
  for (std::size_t i = 1; i + 1 < h.trace.samples.size(); ++i) {
    const auto& a = run.trace.samples[i];
    const auto& b = h.trace.samples[i];
    REQUIRE(a.t == b.t);
    if (a.t < 1e-3) CHECK(std::abs(a.xi2 / b.xi2 - 1.0) < 1e-4);
  }
  CHECK(std::abs(run.trace.samples[900].xi2 / h.trace.samples[900].xi2 - 1.0) > 1e-3);
  for (const auto& s : h.trace.samples) CHECK(s.p == doctest::Approx(1.0).epsilon(1e-9));

  req.q_times = {4.0};
  CHECK_THROWS_AS(run_evolution(req), ConfigError);
}

TEST_CASE("scaling studies are deterministic and independent of worker count") {
  RunOptions serial;
  RunOptions pool;
  pool.workers = 3;
  const std::vector<int> ns{20, 30, 45, 60};
  const ScalingStudy a = run_scaling_dynamic(ns, 0.5, serial);
  const ScalingStudy b = run_scaling_dynamic(ns, 0.5, pool);
  const ScalingStudy c = run_scaling_dynamic(ns, 0.5, serial);
  REQUIRE(a.rows.size() == ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(a.rows[i].n_atoms == ns[i]);
    CHECK(a.rows[i].xi2 == b.rows[i].xi2);
    CHECK(a.rows[i].t == b.rows[i].t);
    CHECK(a.rows[i].log_p == b.rows[i].log_p);
    CHECK(a.rows[i].xi2 == c.rows[i].xi2);
    CHECK(a.rows[i].total_time() >= a.rows[i].t);
    CHECK(a.rows[i].p() > 0.0);
    CHECK(a.rows[i].p() <= 1.0);
  }
  CHECK(a.xi2_fit.exponent == b.xi2_fit.exponent);
  REQUIRE(a.t_fit);

  const ScalingStudy herm = run_scaling_dynamic({20, 40, 80}, 0.0);
  for (const auto& r : herm.rows) {
    CHECK(r.total_time() == r.t);
    CHECK(r.log_p == 0.0);
  }
  CHECK_THROWS_AS(run_scaling_dynamic({40, 20, 80}, 0.5), ConfigError);

  const ScalingStudy steady = run_scaling_steady({100, 158, 251}, GammaRule::parse("1/(0.03N)"));
  for (const auto& r : steady.rows) {
    CHECK(r.gamma_over_chi == doctest::Approx(1.0 / (0.03 * r.n_atoms)));
    CHECK(std::abs(r.alpha_min) < 0.05);
    CHECK(r.t > 0.0);
    CHECK(r.total_time() > r.t);
  }
}

TEST_CASE("dynamic gamma sweep at fixed N") {
  const DynamicSweep sweep = run_gamma_sweep_dynamic(100, {2.0, 1.0, 0.5, 0.25});
  REQUIRE(sweep.rows.size() == 4);
  CHECK(sweep.rows[0].gamma_over_chi == 2.0);
  CHECK(sweep.squeezing_improves_as_gamma_drops);
  CHECK(sweep.time_grows_as_gamma_drops);
  for (const auto& r : sweep.rows) CHECK(r.xi2_min < sweep.oat.xi2_min);
  CHECK_THROWS_AS(run_gamma_sweep_dynamic(100, {0.5, 0.0}), ConfigError);
}
