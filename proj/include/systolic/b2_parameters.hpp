#pragma once

#include "systolic/profile.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace systolic {

/// Suspension parameters of the singular B2 metric.
struct B2Parameters {
  double alpha;
  double d;
};

/// Length of the two competing short loops for the twist r_alpha o T on the
/// singular Klein bottle: along the corner latitude, and across the central
/// spherical band between latitudes -pi/4 and pi/4.
inline double b2_corner_branch(double alpha) { return (kPi - alpha) / kSqrt2; }
inline double b2_band_branch(double alpha) {
  return std::acos(std::clamp((std::cos(alpha) - 1.0) / 2.0, -1.0, 1.0));
}
/// inf of the two branches: the displacement of r_alpha o T on (K, b).
inline double b2_displacement(double alpha) {
  return std::min(b2_corner_branch(alpha), b2_band_branch(alpha));
}

/// alpha is the root in (0, pi) where the two branches agree, found by
/// bisection on the fixed bracket; d closes the loop to length pi.
inline B2Parameters solve_b2_params() {
  auto gap = [](double alpha) { return b2_band_branch(alpha) - b2_corner_branch(alpha); };
  auto tol = [](double lo, double hi) { return hi - lo <= 4 * std::numeric_limits<double>::epsilon(); };
  auto [lo, hi] = boost::math::tools::bisect(gap, 1e-9, kPi - 1e-9, tol);
  const double alpha = 0.5 * (lo + hi);
  const double corner = b2_corner_branch(alpha);
  return {alpha, std::sqrt(kPi * kPi - corner * corner)};
}

/// Residuals of the two defining relations at (alpha, d).
struct B2Residuals {
  double twist;   // (cos a - 1)/2 - cos((pi - a)/sqrt 2)
  double closing; // displacement^2 + d^2 - pi^2
};

inline B2Residuals b2_residuals(const B2Parameters& p) {
  const double twist = (std::cos(p.alpha) - 1.0) / 2.0 - std::cos(b2_corner_branch(p.alpha));
  const double disp = b2_displacement(p.alpha);
  return {twist, disp * disp + p.d * p.d - kPi * kPi};
}

}  // namespace systolic
