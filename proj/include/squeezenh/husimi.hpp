#pragma once

#include <vector>

#include <Eigen/Core>

#include "squeezenh/frame.hpp"
#include "squeezenh/spin_state.hpp"

namespace squeezenh {

// Q(theta, phi) = |<theta, phi|psi>|^2 sampled on a tensor grid, theta-major.
struct QGrid {
  int n_atoms = 0;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> values;

  double at(std::size_t i_theta, std::size_t i_phi) const { return values[i_theta * phi.size() + i_phi]; }
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

QGrid husimi_q(const SpinState& state, const std::vector<double>& theta_grid, const std::vector<double>& phi_grid);
// Same Q on lab angles for a state stored in `frame` (Q is rotation covariant).
QGrid husimi_q(const SpinState& state, const std::vector<double>& theta_grid, const std::vector<double>& phi_grid,
               Frame frame);

// (N+1)/(4 pi) * integral of Q sin(theta) dtheta dphi, trapezoidal in both angles.
double q_normalization(const QGrid& grid);

// Direction of largest Q-weighted second moment of the unit vector, projected on
// the plane spanned by (e1, e2), as an angle from e1 folded into (-pi/2, pi/2].
double q_principal_angle(const QGrid& grid, const Eigen::Vector3d& e1, const Eigen::Vector3d& e2);

}  // namespace squeezenh
