#pragma once

#include <complex>

#include <Eigen/Core>

#include "squeezenh/banded_operator.hpp"
#include "squeezenh/spin_sector.hpp"

namespace squeezenh {

// A possibly unnormalized state over a SpinSector. The amplitudes are kept at
// unit 2-norm and the true norm is carried as log_norm, so the physical vector
// is exp(log_norm) * amplitudes. This keeps the no-decay probability
// P = exp(2 log_norm) representable long after it underflows a double.
class SpinState {
 public:
  // Normalizes `amplitudes`, folding the norm into log_norm. Throws
  // NumericalError("degenerate state") on a zero or non-finite vector.
  SpinState(SpinSector sector, Eigen::VectorXcd amplitudes, double log_norm = 0.0);

  static SpinState all_down(const SpinSector& sector);
  static SpinState dicke(const SpinSector& sector, Index k);
  // (cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>)^{(x) N}
  static SpinState coherent(const SpinSector& sector, double theta, double phi);

  const SpinSector& sector() const { return sector_; }
  Index dim() const { return sector_.dim(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  double log_norm() const { return log_norm_; }

  double survival_probability() const;
  double log_survival_probability() const { return 2.0 * log_norm_; }

  // exp(log_norm) * amplitudes; may underflow.
  Eigen::VectorXcd physical_amplitudes() const;

  // Multiplies the physical vector by `factor` (nonzero).
  SpinState scaled(Complex factor) const;

  // Replaces the amplitudes with `next`, normalizing it and adding its log-norm.
  // With `unitary` the norm change is rounding only and is discarded.
  void absorb(Eigen::VectorXcd next, bool unitary = false);

 private:
  SpinSector sector_;
  Eigen::VectorXcd amplitudes_;
  double log_norm_;
};

// Coherent-state amplitudes <k|theta, phi> with binomials taken in log space.
Eigen::VectorXcd coherent_amplitudes(const SpinSector& sector, double theta, double phi);

// <psi|O|psi> / <psi|psi>. For a Hermitian O the imaginary part is checked to
// be below 1e-10 * ||O|| and then dropped.
Complex expectation(const BandedOperator& op, const Eigen::VectorXcd& psi);
Complex expectation(const BandedOperator& op, const SpinState& state);

}  // namespace squeezenh
