#pragma once

#include "systolic/errors.hpp"
#include "systolic/profile.hpp"
#include "systolic/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace systolic {

/// h(a) = sin(2a)/(2 pi) * (cos^2 a - 1/2)^(-1/2), extended evenly to
/// (-pi/4, pi/4). Blows up integrably at the corner.
inline double h_density(double a) {
  if (!std::isfinite(a)) throw DomainError("h_density: non-finite argument");
  const double x = std::abs(a);
  if (x >= kQuarterPi) throw DomainError("h_density: |a| must be < pi/4");
  // cos^2 a - 1/2 = cos(2a)/2.
  return std::sin(2 * x) / (2 * kPi) / std::sqrt(std::cos(2 * x) / 2);
}

/// Solution y(z) = rhs / (pi sqrt z) of int_0^t (t - z)^(-1/2) y(z) dz = rhs.
struct AbelSolution {
  double rhs = 0.5;
  double operator()(double z) const {
    if (!(z > 0)) throw DomainError("Abel solution is defined for z > 0");
    return rhs / (kPi * std::sqrt(z));
  }
};

inline AbelSolution solve_abel(double rhs) {
  if (!(rhs > 0) || !std::isfinite(rhs)) throw InputError("solve_abel: rhs must be positive");
  return {rhs};
}

/// Density on the turning latitude a of the band families.
///
/// In the variable z = cos^2 a - 1/2 (so dz = -sin(2a) da) a density is the
/// Abel unknown y(z) with h(a) da = y(z) |dz|. `paper` is h itself (y from
/// solve_abel(1/2)); `uniform` is constant in a, y = c / sqrt(1 - 4 z^2).
class BandDensity {
 public:
  enum class Kind { paper, uniform };

  static BandDensity paper(double factor = 1.0) { return BandDensity(Kind::paper, factor); }
  static BandDensity uniform(double value) { return BandDensity(Kind::uniform, value); }
  /// Constant density with the same total mass as h: 2 sqrt 2 / pi^2.
  static BandDensity mass_matched_uniform() { return uniform(2 * kSqrt2 / (kPi * kPi)); }

  Kind kind() const { return kind_; }
  /// Multiplier of h (paper) or the constant value (uniform).
  double factor() const { return factor_; }
  std::string name() const {
    return kind_ == Kind::paper ? (factor_ == 1.0 ? "h" : "scaled h") : "uniform";
  }

  double operator()(double a) const {
    if (kind_ == Kind::paper) return factor_ * h_density(a);
    if (!(std::abs(a) <= kQuarterPi)) throw DomainError("band density: |a| must be <= pi/4");
    return factor_;
  }

  /// y(z), z in (0, 1/2].
  double abel_unknown(double z) const {
    if (kind_ == Kind::paper) return factor_ / (2 * kPi * std::sqrt(z));
    return factor_ / std::sqrt((1 - 2 * z) * (1 + 2 * z));
  }

  /// Weight in q = sqrt(cos 2|a|) on [0, 1]: h(a) da = weight(q) dq (one sign of a).
  double q_weight(double q) const {
    if (kind_ == Kind::paper) return factor_ / (kSqrt2 * kPi);
    return abel_unknown(q * q / 2) * q;
  }

  /// Integral over a in [-pi/4, pi/4].
  double total() const {
    if (kind_ == Kind::uniform) return factor_ * kHalfPi;
    auto w = [this](double q) { return q_weight(q); };
    return 2 * quad::adaptive(w, 0.0, 1.0, 1e-14);
  }

 private:
  BandDensity(Kind k, double f) : kind_(k), factor_(f) {
    if (!(f > 0) || !std::isfinite(f)) throw InputError("band density factor must be positive");
  }
  Kind kind_;
  double factor_;
};

/// a as a function of q = sqrt(cos 2|a|).
inline double turning_latitude_of_q(double q) { return 0.5 * std::acos(q * q); }

namespace detail {

/// int_0^t (t - z)^(-1/2) y(z) dz after z = t sin^2(phi), which absorbs
/// both endpoint singularities: int_0^{pi/2} 2 sqrt(t) sin(phi) y(t sin^2 phi) dphi.
/// t = 0 gives the one-sided limit.
inline double abel_integral_t(double t, const BandDensity& dens) {
  const double tt = std::max(t, 1e-280);
  const double rt = std::sqrt(tt);
  auto f = [&](double phi) {
    const double s = std::sin(phi);
    return 2 * rt * s * dens.abel_unknown(tt * s * s);
  };
  return quad::adaptive(f, 0.0, kHalfPi, 1e-14);
}

}  // namespace detail

/// int_{|v|}^{pi/4} (cos^2 v - cos^2 a)^(-1/2) h(a) da; equals 1/2 for h.
inline double abel_lhs(double v, const BandDensity& dens = BandDensity::paper()) {
  if (!std::isfinite(v)) throw DomainError("abel_lhs: non-finite latitude");
  if (std::abs(v) >= kQuarterPi) throw DomainError("abel_lhs: |v| must be < pi/4");
  return detail::abel_integral_t(std::cos(2 * v) / 2, dens);
}

/// Density of the pushforward of the measure on both band families against
/// the volume form, at latitude v. Each family crosses a point of its band
/// twice, so it contributes 2 * abel_lhs; on a corner line both families
/// contribute half of their one-sided limits.
inline double pushforward_density(double v, const BandDensity& dens = BandDensity::paper()) {
  if (!std::isfinite(v)) throw DomainError("pushforward_density: non-finite latitude");
  const double w = std::abs(std::remainder(v, kPi));
  const double gap = std::abs(w - kQuarterPi);
  if (gap <= 4 * std::numeric_limits<double>::epsilon()) return 2 * detail::abel_integral_t(0.0, dens);
  const double local = w < kQuarterPi ? w : kHalfPi - w;
  return 2 * detail::abel_integral_t(std::cos(2 * local) / 2, dens);
}

}  // namespace systolic
