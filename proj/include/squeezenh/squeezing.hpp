#pragma once

#include <Eigen/Core>

#include "squeezenh/collective_moments.hpp"
#include "squeezenh/spin_state.hpp"
#include "squeezenh/trace.hpp"

namespace squeezenh {

struct SqueezingResult {
  double xi2 = 1.0;
  double alpha_min = 0.0;
  bool alpha_degenerate = false;
  double variance_min = 0.0;
  double variance_max = 0.0;
  Eigen::Vector3d mean_spin = Eigen::Vector3d::Zero();
  // Orthonormal transverse basis; e1 = +x, e2 = +y whenever the mean spin is along +-z.
  Eigen::Vector3d e1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d e2 = Eigen::Vector3d::UnitY();
};

// Transverse basis orthogonal to `direction`: x projected first, then y.
void transverse_basis(const Eigen::Vector3d& direction, Eigen::Vector3d& e1, Eigen::Vector3d& e2);

// xi^2 = N * lambda_min(C) / |<J>|^2 with C the transverse covariance matrix.
// Throws NumericalError("mean spin vanishes") when |<J>| <= 1e-8 N/2.
SqueezingResult squeezing_parameter(const SpinMoments& moments, int n_atoms);
SqueezingResult squeezing_parameter(const SpinState& state);

// Var(Jx cos(alpha) + Jy sin(alpha)); requires the mean spin along +-z.
double variance_along(const SpinMoments& moments, double alpha);
double variance_along(const SpinState& state, double alpha);

double to_db(double xi2);
double from_db(double db);

struct TMinResult {
  double t_min = 0.0;
  double xi2_min = 0.0;
  double raw_t = 0.0;  // grid sample with the smallest xi^2
  double raw_xi2 = 0.0;
  std::size_t index = 0;
};

// Global minimum of xi^2(t), refined by a parabola through the bracketing samples.
// Throws NumericalError("minimum not bracketed; extend duration") at a trace boundary.
TMinResult detect_t_min(const EvolutionTrace& trace);

}  // namespace squeezenh
