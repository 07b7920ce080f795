#include "squeezenh/frame.hpp"

#include <numbers>
#include <stdexcept>

namespace squeezenh {

Eigen::Matrix3d frame_rotation(Frame frame) {
  if (frame == Frame::lab) return Eigen::Matrix3d::Identity();
  Eigen::Matrix3d r;
  r << 0, 0, 1,
       1, 0, 0,
       0, 1, 0;
  return r;
}

SpinMoments to_lab(const SpinMoments& moments, Frame frame) {
  if (frame == Frame::lab) return moments;
  const Eigen::Matrix3d r = frame_rotation(frame);
  SpinMoments out;
  out.mean = r * moments.mean;
  out.second = r * moments.second * r.transpose();
  return out;
}

BandedOperator build_lab_component(const SpinSector& sector, int axis, Frame frame) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
  static constexpr int kTwistAxis[3] = {2, 0, 1};
  switch (frame == Frame::lab ? axis : kTwistAxis[axis]) {
    case 0:
      return build_jx(sector);
    case 1:
      return build_jy(sector);
    default:
      return build_jz(sector);
  }
}

BandedOperator build_h_eff(const ModelParams& params, Frame frame) {
  if (frame == Frame::lab) return build_h_eff(params);
  params.validate();
  const SpinSector sector = params.sector();
  const BandedOperator jx = build_lab_component(sector, 0, frame);
  BandedOperator h = (jx * jx) * Complex(params.chi);
  BandedOperator n_up = build_lab_component(sector, 2, frame);
  for (Index k = 0; k < sector.dim(); ++k) n_up.set(k, k, n_up(k, k) + 0.5 * sector.n_atoms());
  h -= n_up * Complex(0.0, 0.5 * params.gamma());
  return h;
}

BandedOperator build_h_tact(const SpinSector& sector, double chi, Frame frame) {
  if (frame == Frame::lab) return build_h_tact(sector, chi);
  if (!(chi > 0.0)) throw std::invalid_argument("chi must be positive");
  const BandedOperator jx = build_lab_component(sector, 0, frame);
  const BandedOperator jy = build_lab_component(sector, 1, frame);
  return (jx * jx - jy * jy) * Complex(chi);
}

SpinState all_down(const SpinSector& sector, Frame frame) {
  if (frame == Frame::lab) return SpinState::all_down(sector);
  // Lab -z is frame -y'.
  return SpinState::coherent(sector, 0.5 * std::numbers::pi, -0.5 * std::numbers::pi);
}

}  // namespace squeezenh
