#pragma once

#include <Eigen/Core>

#include "squeezenh/banded_operator.hpp"
#include "squeezenh/collective_moments.hpp"
#include "squeezenh/spin_operators.hpp"
#include "squeezenh/spin_state.hpp"

namespace squeezenh {

// Basis in which a state is stored. `lab` quantizes along z. `twist` quantizes
// along the twisting axis x via the cyclic relabeling
//   (Jx, Jy, Jz)_lab = (J'z, J'x, J'y),
// which makes chi Jx^2 diagonal. Twisted states stay narrow in m', so the
// windowed Krylov propagator takes far longer steps there at large N.
enum class Frame { lab, twist };

// R with (lab vector) = R * (frame vector).
Eigen::Matrix3d frame_rotation(Frame frame);

SpinMoments to_lab(const SpinMoments& moments, Frame frame);

// Collective operators J_a (a = 0, 1, 2 for x, y, z of the lab) written in `frame`.
BandedOperator build_lab_component(const SpinSector& sector, int axis, Frame frame);

// H_eff = chi Jx^2 - i (gamma/2) N_up with N_up = Jz + N/2, expressed in `frame`.
BandedOperator build_h_eff(const ModelParams& params, Frame frame);
BandedOperator build_h_tact(const SpinSector& sector, double chi, Frame frame);

// |down...down> of the lab, expressed in `frame`.
SpinState all_down(const SpinSector& sector, Frame frame);

}  // namespace squeezenh
