#include "squeezenh/spin_operators.hpp"

#include <cmath>
#include <stdexcept>

namespace squeezenh {

void ModelParams::validate() const {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be positive");
  if (!(chi > 0.0) || !std::isfinite(chi)) throw std::invalid_argument("chi must be positive and finite");
  if (!(gamma_over_chi >= 0.0) || !std::isfinite(gamma_over_chi)) {
    throw std::invalid_argument("gamma_over_chi must be non-negative and finite");
  }
}

BandedOperator build_ladder(const SpinSector& sector, Ladder which) {
  BandedOperator op(sector, 1);
  const Index n = sector.n_atoms();
  for (Index k = 0; k < n; ++k) {
    const double element = std::sqrt(static_cast<double>((n - k) * (k + 1)));
    if (which == Ladder::raising) {
      op.set(k + 1, k, element);
    } else {
      op.set(k, k + 1, element);
    }
  }
  return op;
}

BandedOperator build_jx(const SpinSector& sector) {
  return (build_ladder(sector, Ladder::raising) + build_ladder(sector, Ladder::lowering)) * Complex(0.5, 0.0);
}

BandedOperator build_jy(const SpinSector& sector) {
  // (J+ - J-) / (2i)
  return (build_ladder(sector, Ladder::raising) - build_ladder(sector, Ladder::lowering)) * Complex(0.0, -0.5);
}

BandedOperator build_jz(const SpinSector& sector) {
  BandedOperator op(sector, 0);
  for (Index k = 0; k < sector.dim(); ++k) op.set(k, k, sector.m(k));
  return op;
}

BandedOperator build_n_up(const SpinSector& sector) {
  BandedOperator op(sector, 0);
  for (Index k = 0; k < sector.dim(); ++k) op.set(k, k, static_cast<double>(k));
  return op;
}

BandedOperator build_jx_squared(const SpinSector& sector) {
  const BandedOperator jx = build_jx(sector);
  return jx * jx;
}

BandedOperator build_jy_squared(const SpinSector& sector) {
  const BandedOperator jy = build_jy(sector);
  return jy * jy;
}

BandedOperator build_h_oat(const SpinSector& sector, double chi) { return build_jx_squared(sector) * Complex(chi, 0.0); }

BandedOperator build_h_eff(const ModelParams& params) {
  params.validate();
  const SpinSector sector = params.sector();
  BandedOperator h = build_h_oat(sector, params.chi);
  if (params.gamma_over_chi > 0.0) h -= build_n_up(sector) * Complex(0.0, 0.5 * params.gamma());
  return h;
}

BandedOperator build_h_tact(const SpinSector& sector, double chi) {
  BandedOperator h = build_jx_squared(sector) - build_jy_squared(sector);
  // Jx^2 and Jy^2 share their diagonal; clear the rounding residue so the band is exactly zero.
  for (Complex& v : h.band(0)) v = Complex{};
  return h * Complex(chi, 0.0);
}

}  // namespace squeezenh
