#include "squeezenh/squeezing.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

#include "squeezenh/error.hpp"

namespace squeezenh {

void transverse_basis(const Eigen::Vector3d& direction, Eigen::Vector3d& e1, Eigen::Vector3d& e2) {
  const Eigen::Vector3d n = direction.normalized();
  e1 = Eigen::Vector3d::UnitX() - n.x() * n;
  if (e1.norm() < 1e-8) e1 = Eigen::Vector3d::UnitY() - n.y() * n;
  e1.normalize();
  e2 = Eigen::Vector3d::UnitY() - n.y() * n - e1.y() * e1;
  if (e2.norm() < 1e-8) e2 = n.cross(e1);
  e2.normalize();
}

SqueezingResult squeezing_parameter(const SpinMoments& moments, int n_atoms) {
  SqueezingResult out;
  out.mean_spin = moments.mean;
  const double length = moments.mean.norm();
  if (!(length > 1e-8 * 0.5 * n_atoms)) throw NumericalError("mean spin vanishes");

  transverse_basis(moments.mean, out.e1, out.e2);
  const Eigen::Matrix3d cov = moments.covariance();
  const double a = out.e1.dot(cov * out.e1);
  const double b = out.e2.dot(cov * out.e2);
  const double c = out.e1.dot(cov * out.e2);

  const double centre = 0.5 * (a + b);
  const double half_split = std::hypot(0.5 * (a - b), c);
  out.variance_min = centre - half_split;
  out.variance_max = centre + half_split;
  out.xi2 = n_atoms * out.variance_min / (length * length);

  if (2.0 * half_split <= 1e-14 * std::abs(centre)) {
    out.alpha_min = 0.0;
    out.alpha_degenerate = true;
  } else {
    double alpha = 0.5 * std::atan2(2.0 * c, a - b) + 0.5 * std::numbers::pi;
    if (alpha > 0.5 * std::numbers::pi) alpha -= std::numbers::pi;
    out.alpha_min = alpha;
  }
  return out;
}

SqueezingResult squeezing_parameter(const SpinState& state) {
  const CollectiveMoments moments(state.sector());
  return squeezing_parameter(moments(state.amplitudes()), state.sector().n_atoms());
}

double variance_along(const SpinMoments& moments, double alpha) {
  const double length = moments.mean.norm();
  if (std::hypot(moments.mean.x(), moments.mean.y()) > 1e-8 * std::max(length, 1.0)) {
    throw NumericalError("mean spin is not along z; use squeezing_parameter for the general covariance");
  }
  const Eigen::Matrix3d cov = moments.covariance();
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  return c * c * cov(0, 0) + s * s * cov(1, 1) + 2.0 * s * c * cov(0, 1);
}

double variance_along(const SpinState& state, double alpha) {
  const CollectiveMoments moments(state.sector());
  return variance_along(moments(state.amplitudes()), alpha);
}

double to_db(double xi2) {
  if (!(xi2 > 0.0)) throw std::invalid_argument("decibel conversion needs a positive ratio");
  return 10.0 * std::log10(xi2);
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

TMinResult detect_t_min(const EvolutionTrace& trace) {
  const auto& s = trace.samples;
  if (s.size() < 3) throw NumericalError("minimum not bracketed; extend duration");
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].xi2 < s[best].xi2) best = i;
  }
  if (best == 0 || best + 1 == s.size()) throw NumericalError("minimum not bracketed; extend duration");

  TMinResult out;
  out.index = best;
  out.raw_t = s[best].t;
  out.raw_xi2 = s[best].xi2;
  out.t_min = out.raw_t;
  out.xi2_min = out.raw_xi2;

  // Parabola through three possibly unevenly spaced samples.
  const double t0 = s[best - 1].t, t1 = s[best].t, t2 = s[best + 1].t;
  const double y0 = s[best - 1].xi2, y1 = s[best].xi2, y2 = s[best + 1].xi2;
  const double d01 = (y1 - y0) / (t1 - t0);
  const double d12 = (y2 - y1) / (t2 - t1);
  const double curvature = (d12 - d01) / (t2 - t0);
  if (curvature > 0.0) {
    // y(t) = y0 + d01 (t - t0) + curvature (t - t0)(t - t1)
    const double t_star = 0.5 * (t0 + t1) - d01 / (2.0 * curvature);
    if (t_star > t0 && t_star < t2) {
      const double y_star = y0 + d01 * (t_star - t0) + curvature * (t_star - t0) * (t_star - t1);
      if (y_star <= y1) {
        out.t_min = t_star;
        out.xi2_min = y_star;
      }
    }
  }
  return out;
}

}  // namespace squeezenh
