#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "squeezenh/error.hpp"
#include "squeezenh/evolution.hpp"
#include "squeezenh/frame.hpp"
#include "squeezenh/propagator.hpp"
#include "squeezenh/spin_operators.hpp"
#include "squeezenh/steady_state.hpp"

using namespace squeezenh;

namespace {

// Distance after removing global phase and norm.
double aligned_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const Eigen::VectorXcd ua = a.normalized(), ub = b.normalized();
  const Complex ov = ub.dot(ua);
  return (ua - (ov / std::abs(ov)) * ub).norm();
}

Eigen::VectorXcd dense_evolution(const BandedOperator& h, const Eigen::VectorXcd& psi, double t) {
  const Eigen::MatrixXcd u = (Complex(0, -t) * h.to_dense()).exp();
  return u * psi;
}

EvolutionTrace fine_trace(const ModelParams& p, double duration, Frame frame = Frame::lab) {
  EvolveOptions ev;
  ev.propagation.tol = 1e-12;
  ev.frame = frame;
  return evolve(build_h_eff(p, frame), all_down(p.sector(), frame), TimeGrid{duration, 1e-4, 1e-2, 400}, ev);
}

}  // namespace

TEST_CASE("Hermitian propagation keeps unit norm") {
  const SpinSector s(40);
  SpinState state = SpinState::all_down(s);
  Propagator prop(build_h_oat(s));
  for (int i = 0; i < 10; ++i) {
    prop.advance(state, 0.37);
    CHECK(std::abs(state.log_norm()) < 1e-9);
    CHECK(std::abs(state.amplitudes().norm() - 1.0) < 1e-9);
  }
  const SpinState before = state;
  prop.advance(state, 0.0);
  CHECK(state.amplitudes() == before.amplitudes());
  CHECK(state.log_norm() == before.log_norm());
  CHECK_THROWS_AS(prop.advance(state, -1.0), std::invalid_argument);
}

TEST_CASE("two-atom decay against the dense exponential") {
  const ModelParams p{2, 1.0, 1.0};
  const BandedOperator h = build_h_eff(p);
  Eigen::VectorXcd down = Eigen::VectorXcd::Zero(3);
  down[0] = 1.0;
  const BandedOperator n_up = build_n_up(p.sector());
  for (double t : {0.01, 0.1, 0.5, 2.0}) {
    const SpinState s = propagate(SpinState::all_down(p.sector()), h, t, {1e-12});
    const Eigen::VectorXcd ref = dense_evolution(h, down, t);
    CHECK(s.survival_probability() == doctest::Approx(ref.squaredNorm()).epsilon(1e-10));
    CHECK(aligned_distance(s.amplitudes(), ref) < 1e-9);
    // dP/dt = -gamma <N_up> P by central differences of the exact solution.
    const double dt = 1e-5;
    const double dp = (dense_evolution(h, down, t + dt).squaredNorm() - dense_evolution(h, down, t - dt).squaredNorm()) /
                      (2 * dt);
    const double rhs = -p.gamma() * expectation(n_up, ref).real() * ref.squaredNorm();
    CHECK(dp == doctest::Approx(rhs).epsilon(1e-7));
    CHECK(s.survival_probability() < 1.0);
  }
}

TEST_CASE("Krylov propagation matches the dense exponential up to dim 256") {
  for (int n : {5, 40, 120, 255}) {
    for (double g : {0.0, 0.3, 2.0}) {
      CAPTURE(n);
      CAPTURE(g);
      const ModelParams p{n, 1.0, g};
      const BandedOperator h = build_h_eff(p);
      const double t = 6.0 / n;
      const SpinState start = SpinState::coherent(p.sector(), 2.1, 0.4);
      const SpinState s = propagate(start, h, t, {1e-11});
      const Eigen::VectorXcd ref = dense_evolution(h, start.amplitudes(), t);
      CHECK(aligned_distance(s.amplitudes(), ref) < 1e-8);
      CHECK(s.log_survival_probability() == doctest::Approx(std::log(ref.squaredNorm())).epsilon(1e-8));

      PropagationOptions dense;
      dense.method = PropagatorMethod::dense;
      const SpinState d = propagate(start, h, t, dense);
      CHECK(aligned_distance(d.amplitudes(), ref) < 1e-8);
    }
  }
}

TEST_CASE("windowed and full-vector Krylov steps agree") {
  const ModelParams p{600, 1.0, 0.5};
  for (Frame f : {Frame::lab, Frame::twist}) {
    const BandedOperator h = build_h_eff(p, f);
    PropagationOptions windowed{1e-11};
    PropagationOptions full{1e-11};
    full.support_threshold = 0.0;
    SpinState a = all_down(p.sector(), f), b = a;
    Propagator pa(h, windowed), pb(h, full);
    for (int i = 0; i < 5; ++i) {
      pa.advance(a, 0.004);
      pb.advance(b, 0.004);
      CHECK(aligned_distance(a.amplitudes(), b.amplitudes()) < 1e-9);
      CHECK(a.log_norm() == doctest::Approx(b.log_norm()).epsilon(1e-9));
    }
    CHECK(pa.stats().widest_window <= p.sector().dim());
  }
}

TEST_CASE("twist and lab frames give the same trajectory") {
  const ModelParams p{30, 1.0, 0.7};
  const EvolutionTrace lab = fine_trace(p, 1.5, Frame::lab);
  const EvolutionTrace twist = fine_trace(p, 1.5, Frame::twist);
  REQUIRE(lab.samples.size() == twist.samples.size());
  for (std::size_t i = 0; i < lab.samples.size(); i += 97) {
    const auto &a = lab.samples[i], &b = twist.samples[i];
    CHECK(a.t == b.t);
    CHECK(a.xi2 == doctest::Approx(b.xi2).epsilon(1e-8));
    CHECK(a.log_p == doctest::Approx(b.log_p).epsilon(1e-8));
    CHECK(a.jz_mean == doctest::Approx(b.jz_mean).epsilon(1e-8));
  }
  const SpinState down = all_down(p.sector(), Frame::twist);
  const SpinState coherent = SpinState::coherent(p.sector(), std::numbers::pi / 2, -std::numbers::pi / 2);
  CHECK(std::abs(std::abs(down.amplitudes().dot(coherent.amplitudes())) - 1.0) < 1e-12);
}

TEST_CASE("trace invariants along decaying trajectories") {
  for (double g : {0.0, 0.1, 1.19}) {
    CAPTURE(g);
    const ModelParams p{20, 1.0, g};
    // <J> = (N/2) cos^(N-1)(chi t) all but vanishes well before chi t = pi/2.
    const EvolutionTrace trace = fine_trace(p, g == 0.0 ? 0.8 : 2.0);
    const auto& s = trace.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(s[i].jx_mean) < 1e-10);
      CHECK(std::abs(s[i].jy_mean) < 1e-10);
      if (i > 0) {
        CHECK(s[i].t > s[i - 1].t);
        if (g > 0.0) CHECK(s[i].p <= s[i - 1].p);
      }
      if (g == 0.0) CHECK(std::abs(s[i].p - 1.0) < 1e-9);
    }
    // d(ln P)/dt = -gamma <N_up>.
    if (g > 0.0) {
      double worst = 0.0;
      for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        // <N_up> grows like t^2 at first, so the stencil error is ~(h/t)^2/3.
        if (s[i].t < 0.05) continue;
        // Three-point derivative, second order on non-uniform spacing.
        const double h1 = s[i].t - s[i - 1].t, h2 = s[i + 1].t - s[i].t;
        const double rate = (h1 * h1 * s[i + 1].log_p - h2 * h2 * s[i - 1].log_p + (h2 * h2 - h1 * h1) * s[i].log_p) /
                            (h1 * h2 * (h1 + h2));
        const double expected = -p.gamma() * (s[i].jz_mean + p.n_atoms / 2.0);
        worst = std::max(worst, std::abs(rate - expected) / std::abs(expected));
      }
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("steady state of two atoms in closed form") {
  // Even block {k=0, k=2}: [[1/2, 1/2], [1/2, 1/2 - i g]] with eigenvalues
  // 1/2 - i g/2 +- sqrt(1/4 - g^2/4); the odd level k=1 has 1 - i g/2.
  for (double g : {2.5, 3.0, 6.0}) {
    const BandedOperator h = build_h_eff(ModelParams{2, 1.0, g});
    SteadyStateOptions full;
    full.sector = ParitySector::full;
    const EigenPair pair = steady_state(h, full);
    const double top = -g / 2 + std::sqrt(g * g / 4 - 0.25);
    CHECK(pair.eigenvalue.real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pair.eigenvalue.imag() == doctest::Approx(top).epsilon(1e-12));
    CHECK(pair.scaled_residual() < 1e-8);
  }
  // At gamma = chi the even block sits on an exceptional point with the double
  // eigenvalue 1/2 - i/2, which a dense solver resolves only to ~sqrt(eps).
  const EigenPair ep = steady_state(build_h_eff(ModelParams{2, 1.0, 1.0}));
  CHECK(std::abs(ep.eigenvalue - Complex(0.5, -0.5)) < 1e-6);
}

TEST_CASE("steady state eigensolve and long-time propagation agree") {
  for (auto [n, g] : {std::pair{20, 1.19}, {20, 0.4673}, {200, 0.5}, {333, 1.0 / (0.03 * 333)}}) {
    CAPTURE(n);
    const BandedOperator h = build_h_eff(ModelParams{n, 1.0, g});
    SteadyStateOptions dense;
    dense.method = SteadyStateMethod::dense;
    SteadyStateOptions prop;
    prop.method = SteadyStateMethod::propagation;
    const EigenPair a = steady_state(h, dense);
    const EigenPair b = steady_state(h, prop);
    const double overlap = std::abs(a.right_eigenvector.amplitudes().dot(b.right_eigenvector.amplitudes()));
    CHECK(overlap > 1.0 - 1e-8);
    CHECK(std::abs(a.eigenvalue - b.eigenvalue) < 1e-8 * h.norm_inf());
    CHECK(a.scaled_residual() < 1e-8);
    CHECK(b.scaled_residual() < 1e-8);
    CHECK(a.eigenvalue.imag() <= 0.0);
    CHECK(a.eigenvalue.imag() >= -g * n / 2.0);
    CHECK(std::abs(a.right_eigenvector.log_norm()) < 1e-12);
  }
}

TEST_CASE("small decay rates leave the steady state ambiguous") {
  // Below a threshold every eigenvalue shares Im E = -gamma N / 4.
  const BandedOperator h = build_h_eff(ModelParams{20, 1.0, 0.05});
  for (const Complex& e : sector_eigenvalues(h, ParitySector::even)) {
    CHECK(e.imag() == doctest::Approx(-0.05 * 20 / 4).epsilon(1e-9));
  }
  CHECK_THROWS_WITH_AS(steady_state(h), "ambiguous steady state", AmbiguousSteadyStateError);
}

TEST_CASE("steady time detection") {
  EvolutionTrace flat;
  for (double t : {0.0, 0.5, 1.0, 1.5}) {
    SqueezingSnapshot s;
    s.t = t;
    s.xi2 = 0.3;
    flat.samples.push_back(s);
  }
  CHECK(detect_steady_time(flat, 0.3, 0.01) == 0.0);
  CHECK(detect_steady_time_from_tail(flat) == 0.0);
  flat.samples[1].xi2 = 0.4;
  CHECK(detect_steady_time(flat, 0.3, 0.01) == 1.0);
  CHECK_THROWS_WITH_AS(detect_steady_time(flat, 0.2, 0.01), "not yet steady", NumericalError);

  const ModelParams p{20, 1.0, 1.6393};
  EvolveOptions ev;
  const EvolutionTrace trace = evolve(build_h_eff(p), SpinState::all_down(p.sector()), TimeGrid{8.0}, ev);
  const double ts = detect_steady_time_from_tail(trace, 0.01);
  CHECK(ts > 0.3);
  CHECK(ts < 8.0);
}
