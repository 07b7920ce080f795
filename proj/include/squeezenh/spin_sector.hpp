#pragma once

#include <Eigen/Core>

namespace squeezenh {

using Index = Eigen::Index;

// Symmetric (Dicke) subspace of N spin-1/2 particles, j = N/2.
// Basis index k = 0..N counts up-atoms, so m = k - N/2 and k = 0 is |down...down>.
class SpinSector {
 public:
  explicit SpinSector(int n_atoms);

  int n_atoms() const { return n_atoms_; }
  double j() const { return 0.5 * n_atoms_; }
  Index dim() const { return n_atoms_ + 1; }

  double m(Index k) const { return static_cast<double>(k) - j(); }
  Index index_of_m(double m) const;

  friend bool operator==(const SpinSector&, const SpinSector&) = default;

 private:
  int n_atoms_;
};

}  // namespace squeezenh
