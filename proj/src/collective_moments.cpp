#include "squeezenh/collective_moments.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "squeezenh/error.hpp"

namespace squeezenh {

CollectiveMoments::CollectiveMoments(const SpinSector& sector) : sector_(sector) {
  const Index n = sector.n_atoms();
  ladder_.resize(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) ladder_[k] = std::sqrt(static_cast<double>((n - k) * (k + 1)));
}

SpinMoments CollectiveMoments::operator()(const Eigen::VectorXcd& psi_in) const {
  const Index dim = sector_.dim();
  if (psi_in.size() != dim) throw std::invalid_argument("state length does not match sector");
  const double norm = psi_in.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("degenerate state");
  const Eigen::VectorXcd psi = psi_in / norm;

  using C = std::complex<double>;
  const C minus_half_i(0.0, -0.5);
  Eigen::VectorXcd jx(dim), jy(dim), jz(dim);
  for (Index k = 0; k < dim; ++k) {
    // (J+ psi)_k = a_{k-1} psi_{k-1}; (J- psi)_k = a_k psi_{k+1}
    const C up = k > 0 ? ladder_[k - 1] * psi[k - 1] : C{};
    const C down = k + 1 < dim ? ladder_[k] * psi[k + 1] : C{};
    jx[k] = 0.5 * (up + down);
    jy[k] = minus_half_i * (up - down);
    jz[k] = sector_.m(k) * psi[k];
  }

  SpinMoments out;
  const Eigen::VectorXcd* applied[3] = {&jx, &jy, &jz};
  for (int a = 0; a < 3; ++a) {
    out.mean[a] = psi.dot(*applied[a]).real();
    for (int b = a; b < 3; ++b) {
      const double s = applied[a]->dot(*applied[b]).real();
      out.second(a, b) = s;
      out.second(b, a) = s;
    }
  }
  return out;
}

}  // namespace squeezenh
