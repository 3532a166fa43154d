#pragma once

#include "systolic/errors.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace systolic {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2;
inline constexpr double kQuarterPi = std::numbers::pi / 4;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
/// Value of the singular profile on its corner lines, cos(pi/4).
inline constexpr double kCornerWeight = std::numbers::sqrt2 / 2;

/// A point of the (u, v, z) chart on the universal cover. No range
/// restriction; 2-dimensional callers keep z = 0.
struct ChartPoint {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;

  friend bool operator==(const ChartPoint&, const ChartPoint&) = default;
};

/// Reduce a latitude into [-pi/4, pi/4] modulo pi/2. Ties at band edges go
/// either way; both neighbours give the same profile value.
inline double wrap_latitude(double v) { return std::remainder(v, kHalfPi); }

/// Index k of the band |v - k pi/2| <= pi/4 containing v.
inline long band_index(double v) { return std::lround((v - wrap_latitude(v)) / kHalfPi); }

/// The warping function psi of the metric dv^2 + psi(v)^2 du^2.
///
/// The singular profile is the pi/2-periodic even extension of cos from
/// [-pi/4, pi/4]: each band is a round-sphere zone and consecutive bands meet
/// along corner lines v = pi/4 (mod pi/2), where psi is continuous but psi'
/// jumps. The metric carries psi squared on du^2; the extremal computation
/// relies on the conformal factor cos^2(v) there.
class LatitudeProfile {
 public:
  enum class Kind { singular, flat };

  static LatitudeProfile singular() { return LatitudeProfile(Kind::singular, 1.0); }
  static LatitudeProfile flat(double weight = 1.0) {
    if (!(weight > 0.0) || !std::isfinite(weight))
      throw InputError("flat profile weight must be a positive finite number");
    return LatitudeProfile(Kind::flat, weight);
  }

  Kind kind() const { return kind_; }
  bool is_singular() const { return kind_ == Kind::singular; }
  /// Constant weight of a flat profile (1 for the singular one).
  double weight() const { return weight_; }

  double operator()(double v) const {
    if (!std::isfinite(v)) throw DomainError("psi: latitude must be finite");
    if (kind_ == Kind::flat) return weight_;
    return std::cos(wrap_latitude(v));
  }

  /// psi'(v) inside a band. At a corner the value of the band selected by
  /// wrap_latitude is returned; callers integrating across corners pick the
  /// side explicitly through band_derivative.
  double derivative(double v) const {
    if (kind_ == Kind::flat) return 0.0;
    return -std::sin(wrap_latitude(v));
  }

  /// Smooth continuation of the band with index k: cos(v - k pi/2).
  double band_value(double v, long k) const {
    if (kind_ == Kind::flat) return weight_;
    return std::cos(v - static_cast<double>(k) * kHalfPi);
  }
  double band_derivative(double v, long k) const {
    if (kind_ == Kind::flat) return 0.0;
    return -std::sin(v - static_cast<double>(k) * kHalfPi);
  }

  /// Global bounds of psi over all latitudes.
  double min_value() const { return kind_ == Kind::flat ? weight_ : kCornerWeight; }
  double max_value() const { return kind_ == Kind::flat ? weight_ : 1.0; }

  friend bool operator==(const LatitudeProfile&, const LatitudeProfile&) = default;

 private:
  LatitudeProfile(Kind kind, double weight) : kind_(kind), weight_(weight) {}
  Kind kind_;
  double weight_;
};

inline double psi(const LatitudeProfile& profile, double v) { return profile(v); }

/// psi^2 du^2 + dv^2 (dimension 2) or psi^2 du^2 + dv^2 + dz^2 (dimension 3),
/// multiplied by scale^2.
struct MetricSpec {
  LatitudeProfile profile = LatitudeProfile::singular();
  int dimension = 3;
  double scale = 1.0;

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

/// Diagonal entries of the metric tensor at p: (psi^2, 1[, 1]) times scale^2.
inline std::vector<double> metric_tensor(const MetricSpec& spec, const ChartPoint& p) {
  if (!std::isfinite(p.u) || !std::isfinite(p.v) || !std::isfinite(p.z))
    throw DomainError("metric_tensor: chart point must be finite");
  const double s2 = spec.scale * spec.scale;
  const double w = spec.profile(p.v);
  std::vector<double> diag{s2 * w * w, s2};
  if (spec.dimension == 3) diag.push_back(s2);
  return diag;
}

}  // namespace systolic
