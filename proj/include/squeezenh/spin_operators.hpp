#pragma once

#include "squeezenh/banded_operator.hpp"
#include "squeezenh/spin_sector.hpp"

namespace squeezenh {

enum class Ladder { raising, lowering };

// Model of N atoms under chi*Jx^2 with conditional decay of |up> at rate gamma.
// Times are measured in units of 1/chi.
struct ModelParams {
  int n_atoms = 2;
  double chi = 1.0;
  double gamma_over_chi = 0.0;

  double gamma() const { return gamma_over_chi * chi; }
  SpinSector sector() const { return SpinSector(n_atoms); }
  // Throws std::invalid_argument on chi <= 0, gamma_over_chi < 0 or n_atoms < 1.
  void validate() const;
};

// <j, m+1| J+ |j, m> = sqrt((j - m)(j + m + 1)) = sqrt((N - k)(k + 1)).
BandedOperator build_ladder(const SpinSector& sector, Ladder which);
BandedOperator build_jx(const SpinSector& sector);
BandedOperator build_jy(const SpinSector& sector);
BandedOperator build_jz(const SpinSector& sector);
// N_up = Jz + N/2, diagonal with entries k.
BandedOperator build_n_up(const SpinSector& sector);
BandedOperator build_jx_squared(const SpinSector& sector);
BandedOperator build_jy_squared(const SpinSector& sector);

BandedOperator build_h_oat(const SpinSector& sector, double chi = 1.0);
// H_eff = chi Jx^2 - i (gamma / 2) N_up.
BandedOperator build_h_eff(const ModelParams& params);
// chi (Jx^2 - Jy^2).
BandedOperator build_h_tact(const SpinSector& sector, double chi = 1.0);

}  // namespace squeezenh
