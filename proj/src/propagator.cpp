#include "squeezenh/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "squeezenh/error.hpp"

namespace squeezenh {

namespace {

constexpr Complex kMinusI(0.0, -1.0);

bool all_finite(const Eigen::VectorXcd& v) { return v.allFinite(); }

struct KrylovExp {
  Eigen::VectorXcd coeffs;  // exp(-i h H_m) e1
  double error = 0.0;       // a posteriori local error estimate
};

// exp of the augmented matrix [[-i h H_m, e1], [0, 0]] yields exp(-i h H_m) e1 in
// its first column and phi_1(-i h H_m) e1 in its last column.
KrylovExp krylov_exp(const Eigen::MatrixXcd& hess, int m, double h, bool breakdown) {
  Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(m + 1, m + 1);
  aug.topLeftCorner(m, m) = (kMinusI * h) * hess.topLeftCorner(m, m);
  aug(0, m) = 1.0;
  const Eigen::MatrixXcd e = aug.exp();
  KrylovExp out;
  out.coeffs = e.col(0).head(m);
  out.error = breakdown ? 0.0 : h * std::abs(hess(m, m - 1)) * std::abs(e(m - 1, m));
  return out;
}

}  // namespace

Propagator::Propagator(BandedOperator h, PropagationOptions options)
    : h_(std::move(h)), options_(options), norm_(std::max(h_.norm_inf(), 1e-300)), unitary_(h_.is_hermitian()) {
  if (!(options_.tol > 0.0)) throw std::invalid_argument("propagation tolerance must be positive");
  if (options_.max_krylov_dim < 2) throw std::invalid_argument("Krylov dimension must be at least 2");
  if (options_.method == PropagatorMethod::dense) dense_h_ = h_.to_dense();
}

void Propagator::advance(SpinState& state, double duration) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw std::invalid_argument("duration must be non-negative");
  if (!(state.sector() == h_.sector())) throw std::invalid_argument("state and Hamiltonian live on different sectors");
  if (duration == 0.0) return;
  if (options_.method == PropagatorMethod::dense) {
    advance_dense(state, duration);
  } else {
    advance_krylov(state, duration);
  }
}

void Propagator::advance_dense(SpinState& state, double duration) {
  if (cached_dt_ != duration) {
    cached_u_ = ((kMinusI * duration) * dense_h_).exp();
    cached_dt_ = duration;
  }
  Eigen::VectorXcd next = cached_u_ * state.amplitudes();
  if (!all_finite(next)) throw NumericalError("propagation diverged");
  ++stats_.steps;
  state.absorb(std::move(next), unitary_);
}

void Propagator::advance_krylov(SpinState& state, double duration) {
  const Index n = h_.dim();
  const int m_cap = static_cast<int>(std::min<Index>(options_.max_krylov_dim, n));
  const Index reach = static_cast<Index>(h_.bandwidth()) * (m_cap + 1);

  Eigen::VectorXcd w;
  Eigen::VectorXcd proj;
  double remaining = duration;
  while (remaining > 0.0) {
    Index first = 0;
    Index len = n;
    double block_norm = norm_;
    if (options_.support_threshold > 0.0) {
      const Eigen::ArrayXd mag = state.amplitudes().array().abs();
      const double cut = options_.support_threshold * mag.maxCoeff();
      Index lo = 0;
      Index hi = n - 1;
      while (mag[lo] <= cut) ++lo;
      while (mag[hi] <= cut) --hi;
      first = std::max<Index>(0, lo - reach);
      len = std::min<Index>(n, hi + reach + 1) - first;
      if (len < n) block_norm = std::max(h_.norm_inf_block(first, len), 1e-300);
    }
    stats_.widest_window = std::max(stats_.widest_window, len);
    const double breakdown_tol = 1e-13 * block_norm;

    basis_.resize(len, m_cap + 1);
    hessenberg_.setZero(m_cap + 1, m_cap);
    double h = step_hint_ > 0.0 ? std::min(step_hint_, remaining) : std::min(remaining, 4.0 / block_norm);

    // Arnoldi with classical Gram-Schmidt applied twice; stops early once the
    // error estimate for the trial step is already met.
    basis_.col(0) = state.amplitudes().segment(first, len);
    basis_.col(0) /= basis_.col(0).norm();
    int m = 0;
    bool breakdown = false;
    KrylovExp trial;
    bool have_trial = false;
    for (int j = 0; j < m_cap; ++j) {
      h_.apply_block(first, basis_.col(j), w);
      ++stats_.matvecs;
      for (int pass = 0; pass < 2; ++pass) {
        proj.noalias() = basis_.leftCols(j + 1).adjoint() * w;
        w.noalias() -= basis_.leftCols(j + 1) * proj;
        hessenberg_.col(j).head(j + 1) += proj;
      }
      const double beta = w.norm();
      hessenberg_(j + 1, j) = beta;
      m = j + 1;
      if (beta < breakdown_tol) {
        breakdown = true;
        break;
      }
      basis_.col(j + 1) = w / beta;
      if (m == m_cap || (m >= 4 && m % 4 == 0)) {
        trial = krylov_exp(hessenberg_, m, h, false);
        have_trial = true;
        if (trial.error <= options_.tol * h * std::max(trial.coeffs.norm(), 1e-300)) break;
      }
    }

    if (breakdown) {
      // Invariant subspace: the projected exponential is exact for any step.
      h = remaining;
      trial = krylov_exp(hessenberg_, m, h, true);
    } else {
      if (!have_trial) trial = krylov_exp(hessenberg_, m, h, false);
      while (trial.error > options_.tol * h * std::max(trial.coeffs.norm(), 1e-300)) {
        ++stats_.rejected;
        const double ratio = options_.tol * h * std::max(trial.coeffs.norm(), 1e-300) / trial.error;
        h *= std::clamp(0.9 * std::pow(ratio, 1.0 / m), 0.1, 0.9);
        if (!(h > 1e-15 * duration) || !std::isfinite(h)) throw NumericalError("propagation diverged");
        trial = krylov_exp(hessenberg_, m, h, false);
      }
    }

    Eigen::VectorXcd next;
    if (len == n) {
      next = basis_.leftCols(m) * trial.coeffs;
    } else {
      next = Eigen::VectorXcd::Zero(n);
      next.segment(first, len) = basis_.leftCols(m) * trial.coeffs;
    }
    if (!all_finite(next)) throw NumericalError("propagation diverged");
    state.absorb(std::move(next), unitary_);
    ++stats_.steps;
    const bool truncated = h >= remaining;
    remaining = truncated ? 0.0 : remaining - h;

    if (!breakdown) {
      const double ratio = trial.error > 0.0
                               ? options_.tol * h * std::max(trial.coeffs.norm(), 1e-300) / trial.error
                               : 1e6;
      const double next_hint = h * std::clamp(0.9 * std::pow(ratio, 1.0 / m), 0.5, 3.0);
      // A step cut short by the interval end says little about the natural step size.
      step_hint_ = truncated ? std::max(step_hint_, next_hint) : next_hint;
    }
  }
}

SpinState propagate(const SpinState& state, const BandedOperator& h, double duration,
                    const PropagationOptions& options) {
  Propagator prop(h, options);
  SpinState out = state;
  prop.advance(out, duration);
  return out;
}

}  // namespace squeezenh
