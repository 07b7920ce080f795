#pragma once

#include <vector>

#include <Eigen/Core>

#include "squeezenh/spin_sector.hpp"

namespace squeezenh {

// First and symmetrized second moments of (Jx, Jy, Jz):
// mean_a = <J_a>, second_ab = <{J_a, J_b}>/2.
struct SpinMoments {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();

  Eigen::Matrix3d covariance() const { return second - mean * mean.transpose(); }
};

// Evaluates SpinMoments directly from ladder coefficients in O(N), without
// materializing banded operators. Reused across many states of one sector.
class CollectiveMoments {
 public:
  explicit CollectiveMoments(const SpinSector& sector);

  const SpinSector& sector() const { return sector_; }

  // The state need not be normalized. Throws NumericalError("degenerate state") on zero norm.
  SpinMoments operator()(const Eigen::VectorXcd& psi) const;

 private:
  SpinSector sector_;
  std::vector<double> ladder_;  // <k+1|J+|k>
};

}  // namespace squeezenh
