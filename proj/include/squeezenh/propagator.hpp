#pragma once

#include <Eigen/Core>

#include "squeezenh/banded_operator.hpp"
#include "squeezenh/spin_state.hpp"

namespace squeezenh {

enum class PropagatorMethod {
  krylov,  // adaptive Arnoldi exponential on the banded operator
  dense,   // cached dense matrix exponential, dim <= BandedOperator::kMaxDenseDim
};

struct PropagationOptions {
  // Bound on the local error per unit chi*t, relative to the state norm.
  double tol = 1e-10;
  int max_krylov_dim = 30;
  // Krylov steps act only on the index window where |amplitude| exceeds this
  // fraction of the largest one, padded by the reach of one Arnoldi cycle.
  // Amplitudes outside the window are dropped. Zero disables windowing.
  double support_threshold = 1e-15;
  PropagatorMethod method = PropagatorMethod::krylov;
};

struct PropagationStats {
  long matvecs = 0;
  long steps = 0;
  long rejected = 0;
  Index widest_window = 0;
};

// Integrates i d|psi>/dt = H |psi> for a possibly non-Hermitian H. After every
// step the amplitudes are renormalized and the norm is accumulated in the
// state's log_norm. Throws NumericalError("propagation diverged") on non-finite
// amplitudes.
class Propagator {
 public:
  explicit Propagator(BandedOperator h, PropagationOptions options = {});

  const BandedOperator& hamiltonian() const { return h_; }
  const PropagationOptions& options() const { return options_; }
  const PropagationStats& stats() const { return stats_; }

  void advance(SpinState& state, double duration);

 private:
  void advance_krylov(SpinState& state, double duration);
  void advance_dense(SpinState& state, double duration);

  BandedOperator h_;
  PropagationOptions options_;
  PropagationStats stats_;
  double norm_;
  bool unitary_;  // Hermitian H: P stays exactly 1
  double step_hint_ = 0.0;

  Eigen::MatrixXcd basis_;
  Eigen::MatrixXcd hessenberg_;

  Eigen::MatrixXcd dense_h_;
  double cached_dt_ = -1.0;
  Eigen::MatrixXcd cached_u_;
};

SpinState propagate(const SpinState& state, const BandedOperator& h, double duration,
                    const PropagationOptions& options = {});

}  // namespace squeezenh
