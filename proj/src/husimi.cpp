#include "squeezenh/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace squeezenh {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

QGrid husimi_q(const SpinState& state, const std::vector<double>& theta_grid, const std::vector<double>& phi_grid) {
  if (theta_grid.empty() || phi_grid.empty()) throw std::invalid_argument("Q grid axes must be non-empty");
  const SpinSector& sector = state.sector();
  const int n = sector.n_atoms();
  const Eigen::VectorXcd& psi = state.amplitudes();

  QGrid out;
  out.n_atoms = n;
  out.theta = theta_grid;
  out.phi = phi_grid;
  out.values.resize(theta_grid.size() * phi_grid.size());

  // <theta,phi|k> = sqrt(C(N,k)) cos^k(theta/2) sin^{N-k}(theta/2) e^{-i phi (N-k)}
  Eigen::VectorXcd weighted(sector.dim());
  std::vector<std::complex<double>> phase_step(phi_grid.size());
  for (std::size_t j = 0; j < phi_grid.size(); ++j) phase_step[j] = std::polar(1.0, -phi_grid[j]);

  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    // Real coherent magnitudes at phi = 0 (the bra of a real vector is itself).
    const Eigen::VectorXcd ket = coherent_amplitudes(sector, theta_grid[i], 0.0);
    for (Index k = 0; k < sector.dim(); ++k) weighted[k] = ket[k].real() * psi[k];
    for (std::size_t j = 0; j < phi_grid.size(); ++j) {
      // Horner in z = e^{-i phi} over the power (N - k), from k = 0 (highest power) down.
      std::complex<double> acc{};
      for (Index k = 0; k <= n; ++k) acc = acc * phase_step[j] + weighted[k];
      out.values[i * phi_grid.size() + j] = std::norm(acc);
    }
  }
  return out;
}

QGrid husimi_q(const SpinState& state, const std::vector<double>& theta_grid, const std::vector<double>& phi_grid,
               Frame frame) {
  if (frame == Frame::lab) return husimi_q(state, theta_grid, phi_grid);
  if (theta_grid.empty() || phi_grid.empty()) throw std::invalid_argument("Q grid axes must be non-empty");
  const Eigen::Matrix3d to_frame = frame_rotation(frame).transpose();
  QGrid out;
  out.n_atoms = state.sector().n_atoms();
  out.theta = theta_grid;
  out.phi = phi_grid;
  out.values.resize(theta_grid.size() * phi_grid.size());
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    const double st = std::sin(theta_grid[i]);
    const double ct = std::cos(theta_grid[i]);
    for (std::size_t j = 0; j < phi_grid.size(); ++j) {
      const Eigen::Vector3d n = to_frame * Eigen::Vector3d(st * std::cos(phi_grid[j]), st * std::sin(phi_grid[j]), ct);
      const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
      const double phi = std::atan2(n.y(), n.x());
      const Eigen::VectorXcd ket = coherent_amplitudes(state.sector(), theta, phi);
      out.values[i * phi_grid.size() + j] = std::norm(ket.dot(state.amplitudes()));
    }
  }
  return out;
}

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = 0.5 * (x[i + 1] - x[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

}  // namespace

double q_normalization(const QGrid& grid) {
  const auto wt = trapezoid_weights(grid.theta);
  const auto wp = trapezoid_weights(grid.phi);
  double total = 0.0;
  for (std::size_t i = 0; i < grid.theta.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < grid.phi.size(); ++j) row += wp[j] * grid.at(i, j);
    total += wt[i] * std::sin(grid.theta[i]) * row;
  }
  return (grid.n_atoms + 1) / (4.0 * std::numbers::pi) * total;
}

double q_principal_angle(const QGrid& grid, const Eigen::Vector3d& e1, const Eigen::Vector3d& e2) {
  const auto wt = trapezoid_weights(grid.theta);
  const auto wp = trapezoid_weights(grid.phi);
  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  for (std::size_t i = 0; i < grid.theta.size(); ++i) {
    const double st = std::sin(grid.theta[i]);
    const double ct = std::cos(grid.theta[i]);
    for (std::size_t j = 0; j < grid.phi.size(); ++j) {
      const Eigen::Vector3d n(st * std::cos(grid.phi[j]), st * std::sin(grid.phi[j]), ct);
      const double w = wt[i] * wp[j] * st * grid.at(i, j);
      const double u = n.dot(e1);
      const double v = n.dot(e2);
      s11 += w * u * u;
      s22 += w * v * v;
      s12 += w * u * v;
    }
  }
  double angle = 0.5 * std::atan2(2.0 * s12, s11 - s22);
  if (angle <= -0.5 * std::numbers::pi) angle += std::numbers::pi;
  return angle;
}

}  // namespace squeezenh
