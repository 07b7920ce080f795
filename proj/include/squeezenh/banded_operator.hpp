#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "squeezenh/spin_sector.hpp"

namespace squeezenh {

using Complex = std::complex<double>;

// Complex matrix over a SpinSector whose nonzero entries lie within
// |row - col| <= bandwidth <= 2. Band `offset` (= col - row) is stored as a
// vector of length dim - |offset| indexed by min(row, col).
class BandedOperator {
 public:
  static constexpr int kMaxBandwidth = 2;
  static constexpr Index kMaxDenseDim = 2048;

  BandedOperator(SpinSector sector, int bandwidth);

  const SpinSector& sector() const { return sector_; }
  Index dim() const { return sector_.dim(); }
  int bandwidth() const { return bandwidth_; }

  Complex operator()(Index row, Index col) const;
  void set(Index row, Index col, Complex value);

  std::span<const Complex> band(int offset) const;
  std::span<Complex> band(int offset);

  // y = A x. `y` is resized; it must not alias `x`.
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
  Eigen::VectorXcd operator*(const Eigen::VectorXcd& x) const;
  // Principal block on indices [first, first + x.size()): y = A[blk, blk] x.
  void apply_block(Index first, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

  BandedOperator adjoint() const;
  BandedOperator transpose() const;

  bool is_hermitian(double rel_tol = 1e-12) const;
  // All odd bands vanish: the operator does not mix even and odd k.
  bool conserves_parity() const;

  // Max absolute row sum; an upper bound on the spectral norm.
  double norm_inf() const;
  double norm_inf_block(Index first, Index len) const;
  double max_abs() const;

  Eigen::MatrixXcd to_dense() const;

  BandedOperator& operator+=(const BandedOperator& other);
  BandedOperator& operator-=(const BandedOperator& other);
  BandedOperator& operator*=(Complex scale);

  friend BandedOperator operator+(BandedOperator a, const BandedOperator& b) { return a += b; }
  friend BandedOperator operator-(BandedOperator a, const BandedOperator& b) { return a -= b; }
  friend BandedOperator operator*(BandedOperator a, Complex s) { return a *= s; }
  friend BandedOperator operator*(Complex s, BandedOperator a) { return a *= s; }
  // Matrix product; throws std::invalid_argument if the result would exceed kMaxBandwidth.
  friend BandedOperator operator*(const BandedOperator& a, const BandedOperator& b);

 private:
  std::vector<Complex>& band_storage(int offset) { return bands_[offset + kMaxBandwidth]; }
  const std::vector<Complex>& band_storage(int offset) const { return bands_[offset + kMaxBandwidth]; }
  void check_same_sector(const BandedOperator& other) const;
  BandedOperator widened(int bandwidth) const;

  SpinSector sector_;
  int bandwidth_;
  std::array<std::vector<Complex>, 2 * kMaxBandwidth + 1> bands_;
};

// Commutator AB - BA.
BandedOperator commutator(const BandedOperator& a, const BandedOperator& b);

}  // namespace squeezenh
