#pragma once

#include <span>

namespace squeezenh {

// y = amplitude * x^exponent, fitted by unweighted least squares of log10 y on log10 x.
struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double rms_residual = 0.0;  // in log10 units
};

// Throws std::invalid_argument on fewer than 3 points, mismatched lengths or
// non-positive data.
PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys);

}  // namespace squeezenh
