#include "squeezenh/spin_sector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace squeezenh {

SpinSector::SpinSector(int n_atoms) : n_atoms_(n_atoms) {
  if (n_atoms < 1) {
    throw std::invalid_argument("spin sector needs at least one atom, got " + std::to_string(n_atoms));
  }
}

Index SpinSector::index_of_m(double m) const {
  const double k = m + j();
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 || rounded < 0 || rounded > n_atoms_) {
    throw std::out_of_range("m = " + std::to_string(m) + " is not in the j = " + std::to_string(j()) + " multiplet");
  }
  return static_cast<Index>(rounded);
}

}  // namespace squeezenh
