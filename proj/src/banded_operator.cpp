#include "squeezenh/banded_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace squeezenh {

BandedOperator::BandedOperator(SpinSector sector, int bandwidth) : sector_(sector), bandwidth_(bandwidth) {
  if (bandwidth < 0 || bandwidth > kMaxBandwidth) {
    throw std::invalid_argument("bandwidth must lie in [0, 2], got " + std::to_string(bandwidth));
  }
  for (int d = -bandwidth; d <= bandwidth; ++d) {
    const Index len = std::max<Index>(0, dim() - std::abs(d));
    band_storage(d).assign(static_cast<std::size_t>(len), Complex{});
  }
}

Complex BandedOperator::operator()(Index row, Index col) const {
  if (row < 0 || col < 0 || row >= dim() || col >= dim()) {
    throw std::out_of_range("banded operator index out of range");
  }
  const Index d = col - row;
  if (std::abs(d) > bandwidth_) return {};
  return band_storage(static_cast<int>(d))[static_cast<std::size_t>(std::min(row, col))];
}

void BandedOperator::set(Index row, Index col, Complex value) {
  if (row < 0 || col < 0 || row >= dim() || col >= dim()) {
    throw std::out_of_range("banded operator index out of range");
  }
  const Index d = col - row;
  if (std::abs(d) > bandwidth_) {
    throw std::out_of_range("entry (" + std::to_string(row) + ", " + std::to_string(col) + ") lies outside bandwidth " +
                            std::to_string(bandwidth_));
  }
  band_storage(static_cast<int>(d))[static_cast<std::size_t>(std::min(row, col))] = value;
}

std::span<const Complex> BandedOperator::band(int offset) const {
  if (std::abs(offset) > bandwidth_) return {};
  return band_storage(offset);
}

std::span<Complex> BandedOperator::band(int offset) {
  if (std::abs(offset) > bandwidth_) return {};
  return band_storage(offset);
}

void BandedOperator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  if (x.size() != dim()) throw std::invalid_argument("vector length does not match operator dimension");
  const Index n = dim();
  y.setZero(n);
  const Complex* xs = x.data();
  Complex* ys = y.data();
  for (int d = -bandwidth_; d <= bandwidth_; ++d) {
    const auto& b = band_storage(d);
    const Index len = static_cast<Index>(b.size());
    if (d >= 0) {
      for (Index i = 0; i < len; ++i) ys[i] += b[i] * xs[i + d];
    } else {
      for (Index i = 0; i < len; ++i) ys[i - d] += b[i] * xs[i];
    }
  }
}

void BandedOperator::apply_block(Index first, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  const Index len = x.size();
  if (first < 0 || first + len > dim()) throw std::out_of_range("block outside operator");
  y.setZero(len);
  const Complex* xs = x.data();
  Complex* ys = y.data();
  for (int d = -bandwidth_; d <= bandwidth_; ++d) {
    const Complex* b = band_storage(d).data();
    if (d >= 0) {
      for (Index i = 0; i + d < len; ++i) ys[i] += b[first + i] * xs[i + d];
    } else {
      for (Index i = 0; i - d < len; ++i) ys[i - d] += b[first + i] * xs[i];
    }
  }
}

Eigen::VectorXcd BandedOperator::operator*(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y;
  apply(x, y);
  return y;
}

BandedOperator BandedOperator::adjoint() const {
  BandedOperator out(sector_, bandwidth_);
  for (int d = -bandwidth_; d <= bandwidth_; ++d) {
    const auto& src = band_storage(d);
    auto& dst = out.band_storage(-d);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::conj(src[i]);
  }
  return out;
}

BandedOperator BandedOperator::transpose() const {
  BandedOperator out(sector_, bandwidth_);
  for (int d = -bandwidth_; d <= bandwidth_; ++d) out.band_storage(-d) = band_storage(d);
  return out;
}

bool BandedOperator::is_hermitian(double rel_tol) const {
  const double scale = std::max(1.0, max_abs());
  for (int d = 0; d <= bandwidth_; ++d) {
    const auto& upper = band_storage(d);
    const auto& lower = band_storage(-d);
    for (std::size_t i = 0; i < upper.size(); ++i) {
      if (std::abs(upper[i] - std::conj(lower[i])) > rel_tol * scale) return false;
    }
  }
  return true;
}

bool BandedOperator::conserves_parity() const {
  for (int d = -bandwidth_; d <= bandwidth_; ++d) {
    if (d % 2 == 0) continue;
    for (const Complex& v : band_storage(d)) {
      if (v != Complex{}) return false;
    }
  }
  return true;
}

double BandedOperator::norm_inf() const {
  const Index n = dim();
  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
  for (int d = -bandwidth_; d <= bandwidth_; ++d) {
    const auto& b = band_storage(d);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::size_t row = d >= 0 ? i : i - static_cast<std::size_t>(d);
      row_sum[row] += std::abs(b[i]);
    }
  }
  return *std::max_element(row_sum.begin(), row_sum.end());
}

double BandedOperator::norm_inf_block(Index first, Index len) const {
  double best = 0.0;
  for (Index row = first; row < first + len; ++row) {
    double sum = 0.0;
    for (int d = -bandwidth_; d <= bandwidth_; ++d) {
      const Index col = row + d;
      if (col >= first && col < first + len) sum += std::abs((*this)(row, col));
    }
    best = std::max(best, sum);
  }
  return best;
}

double BandedOperator::max_abs() const {
  double m = 0.0;
  for (int d = -bandwidth_; d <= bandwidth_; ++d) {
    for (const Complex& v : band_storage(d)) m = std::max(m, std::abs(v));
  }
  return m;
}

Eigen::MatrixXcd BandedOperator::to_dense() const {
  if (dim() > kMaxDenseDim) {
    throw std::length_error("dense conversion limited to dim <= " + std::to_string(kMaxDenseDim));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
  for (int d = -bandwidth_; d <= bandwidth_; ++d) {
    const auto& b = band_storage(d);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Index row = d >= 0 ? static_cast<Index>(i) : static_cast<Index>(i) - d;
      m(row, row + d) = b[i];
    }
  }
  return m;
}

void BandedOperator::check_same_sector(const BandedOperator& other) const {
  if (!(sector_ == other.sector_)) throw std::invalid_argument("operators live on different spin sectors");
}

BandedOperator BandedOperator::widened(int bandwidth) const {
  if (bandwidth <= bandwidth_) return *this;
  BandedOperator out(sector_, bandwidth);
  for (int d = -bandwidth_; d <= bandwidth_; ++d) out.band_storage(d) = band_storage(d);
  return out;
}

BandedOperator& BandedOperator::operator+=(const BandedOperator& other) {
  check_same_sector(other);
  if (other.bandwidth_ > bandwidth_) *this = widened(other.bandwidth_);
  for (int d = -other.bandwidth_; d <= other.bandwidth_; ++d) {
    auto& dst = band_storage(d);
    const auto& src = other.band_storage(d);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
  }
  return *this;
}

BandedOperator& BandedOperator::operator-=(const BandedOperator& other) {
  check_same_sector(other);
  if (other.bandwidth_ > bandwidth_) *this = widened(other.bandwidth_);
  for (int d = -other.bandwidth_; d <= other.bandwidth_; ++d) {
    auto& dst = band_storage(d);
    const auto& src = other.band_storage(d);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] -= src[i];
  }
  return *this;
}

BandedOperator& BandedOperator::operator*=(Complex scale) {
  for (auto& b : bands_) {
    for (Complex& v : b) v *= scale;
  }
  return *this;
}

BandedOperator operator*(const BandedOperator& a, const BandedOperator& b) {
  a.check_same_sector(b);
  const int bw = a.bandwidth_ + b.bandwidth_;
  if (bw > BandedOperator::kMaxBandwidth) {
    throw std::invalid_argument("product bandwidth " + std::to_string(bw) + " exceeds the supported maximum");
  }
  BandedOperator out(a.sector_, bw);
  const Index n = a.dim();
  for (Index row = 0; row < n; ++row) {
    const Index lo = std::max<Index>(0, row - bw);
    const Index hi = std::min<Index>(n - 1, row + bw);
    for (Index col = lo; col <= hi; ++col) {
      Complex acc{};
      const Index k_lo = std::max({Index{0}, row - a.bandwidth_, col - b.bandwidth_});
      const Index k_hi = std::min({n - 1, row + a.bandwidth_, col + b.bandwidth_});
      for (Index k = k_lo; k <= k_hi; ++k) acc += a(row, k) * b(k, col);
      out.set(row, col, acc);
    }
  }
  return out;
}

BandedOperator commutator(const BandedOperator& a, const BandedOperator& b) { return a * b - b * a; }

}  // namespace squeezenh
