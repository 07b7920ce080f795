#include "squeezenh/spin_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "squeezenh/error.hpp"

namespace squeezenh {

namespace {

double checked_norm(const Eigen::VectorXcd& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("degenerate state");
  return norm;
}

}  // namespace

SpinState::SpinState(SpinSector sector, Eigen::VectorXcd amplitudes, double log_norm)
    : sector_(sector), amplitudes_(std::move(amplitudes)), log_norm_(log_norm) {
  if (amplitudes_.size() != sector_.dim()) {
    throw std::invalid_argument("amplitude vector has length " + std::to_string(amplitudes_.size()) +
                                ", sector dimension is " + std::to_string(sector_.dim()));
  }
  const double norm = checked_norm(amplitudes_);
  amplitudes_ /= norm;
  log_norm_ += std::log(norm);
}

SpinState SpinState::all_down(const SpinSector& sector) { return dicke(sector, 0); }

SpinState SpinState::dicke(const SpinSector& sector, Index k) {
  if (k < 0 || k >= sector.dim()) throw std::out_of_range("Dicke index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(sector.dim());
  v[k] = 1.0;
  return SpinState(sector, std::move(v));
}

SpinState SpinState::coherent(const SpinSector& sector, double theta, double phi) {
  // Normalized by construction; drop the rounding in the computed norm.
  SpinState s(sector, coherent_amplitudes(sector, theta, phi));
  s.log_norm_ = 0.0;
  return s;
}

double SpinState::survival_probability() const { return std::exp(2.0 * log_norm_); }

Eigen::VectorXcd SpinState::physical_amplitudes() const { return amplitudes_ * std::exp(log_norm_); }

SpinState SpinState::scaled(Complex factor) const {
  if (factor == Complex{}) throw NumericalError("degenerate state");
  const double mag = std::abs(factor);
  return SpinState(sector_, amplitudes_ * (factor / mag), log_norm_ + std::log(mag));
}

void SpinState::absorb(Eigen::VectorXcd next, bool unitary) {
  if (next.size() != sector_.dim()) throw std::invalid_argument("amplitude vector length mismatch");
  const double norm = checked_norm(next);
  amplitudes_ = std::move(next) / norm;
  if (!unitary) log_norm_ += std::log(norm);
}

Eigen::VectorXcd coherent_amplitudes(const SpinSector& sector, double theta, double phi) {
  const int n = sector.n_atoms();
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const double log_c = std::log(std::abs(c));
  const double log_s = std::log(std::abs(s));
  const double lg_n = std::lgamma(n + 1.0);
  Eigen::VectorXcd out(sector.dim());
  for (int k = 0; k < static_cast<int>(sector.dim()); ++k) {
    const int downs = n - k;
    // 0^0 = 1 for the extreme basis states at the poles.
    double log_mag = 0.5 * (lg_n - std::lgamma(k + 1.0) - std::lgamma(downs + 1.0));
    double sign = 1.0;
    if (k > 0) {
      log_mag += k * log_c;
      if (c < 0.0 && (k % 2 == 1)) sign = -sign;
    }
    if (downs > 0) {
      log_mag += downs * log_s;
      if (s < 0.0 && (downs % 2 == 1)) sign = -sign;
    }
    const double mag = std::isfinite(log_mag) ? sign * std::exp(log_mag) : 0.0;
    out[k] = std::polar(mag, phi * downs);
  }
  return out;
}

Complex expectation(const BandedOperator& op, const Eigen::VectorXcd& psi) {
  if (psi.size() != op.dim()) throw std::invalid_argument("state and operator live on different sectors");
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw NumericalError("degenerate state");
  const Complex value = psi.dot(op * psi) / norm2;  // Eigen's dot conjugates the left operand
  if (op.is_hermitian()) {
    if (std::abs(value.imag()) > 1e-10 * std::max(1.0, op.norm_inf())) {
      throw NumericalError("Hermitian expectation value has imaginary residual " + std::to_string(value.imag()));
    }
    return {value.real(), 0.0};
  }
  return value;
}

Complex expectation(const BandedOperator& op, const SpinState& state) {
  if (!(op.sector() == state.sector())) throw std::invalid_argument("state and operator live on different sectors");
  return expectation(op, state.amplitudes());
}

}  // namespace squeezenh
