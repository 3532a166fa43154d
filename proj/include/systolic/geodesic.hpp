#pragma once

#include "systolic/errors.hpp"
#include "systolic/profile.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <variant>
#include <vector>

namespace systolic {

/// Slope dv/dt of the band geodesic with turning latitude a, at latitude v:
/// f^2 = cos^2 v / cos^2 a * (cos^2 v - cos^2 a). Non-negative root.
inline double clairaut_f(double v, double a) {
  if (!std::isfinite(v) || !std::isfinite(a)) throw DomainError("clairaut_f: non-finite input");
  if (std::abs(a) > kQuarterPi + 1e-15)
    throw DomainError("clairaut_f: turning latitude must satisfy |a| <= pi/4");
  if (std::abs(v) > std::abs(a) + 1e-15)
    throw DomainError("clairaut_f: latitude beyond the turning latitude");
  const double cv = std::cos(v), ca = std::cos(a);
  // cos^2 v - cos^2 a = sin(a - v) sin(a + v), free of cancellation.
  const double gap = std::sin(std::abs(a) - std::abs(v)) * std::sin(std::abs(a) + std::abs(v));
  return cv / ca * std::sqrt(std::max(0.0, gap));
}

/// A curve in the chart.
class GeodesicArc {
 public:
  /// t -> (t + theta, centre + orientation * atan(tan a cos t), phi),
  /// t in [-pi/2, pi/2]: half a great circle of the spherical band centred on
  /// latitude `centre`, closed on the Klein bottle by the screw motion.
  struct BandGreatCircle {
    double a;
    double theta;
    double phi;
    double centre = 0.0;
    int orientation = 1;
  };
  struct Straight {
    ChartPoint p, q;
  };
  struct Polyline {
    std::vector<ChartPoint> samples;
  };

  GeodesicArc(BandGreatCircle c) : shape_(c) {}
  GeodesicArc(Straight s) : shape_(s) {}
  GeodesicArc(Polyline p) : shape_(std::move(p)) {}

  const auto& shape() const { return shape_; }
  bool is_band() const { return std::holds_alternative<BandGreatCircle>(shape_); }
  const BandGreatCircle& band() const { return std::get<BandGreatCircle>(shape_); }

  /// Parameter interval.
  double t_begin() const { return is_band() ? -kHalfPi : 0.0; }
  double t_end() const {
    if (is_band()) return kHalfPi;
    if (auto* p = std::get_if<Polyline>(&shape_)) return p->samples.empty() ? 0.0 : double(p->samples.size() - 1);
    return 1.0;
  }

  ChartPoint at(double t) const {
    return std::visit(
        [t](const auto& s) -> ChartPoint {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, BandGreatCircle>) {
            return {t + s.theta, s.centre + s.orientation * std::atan(std::tan(s.a) * std::cos(t)), s.phi};
          } else if constexpr (std::is_same_v<S, Straight>) {
            return {s.p.u + t * (s.q.u - s.p.u), s.p.v + t * (s.q.v - s.p.v), s.p.z + t * (s.q.z - s.p.z)};
          } else {
            if (s.samples.empty()) return {};
            if (s.samples.size() == 1) return s.samples[0];
            const double c = std::clamp(t, 0.0, double(s.samples.size() - 1));
            const std::size_t i = std::min<std::size_t>(std::size_t(c), s.samples.size() - 2);
            const double f = c - double(i);
            const auto& p = s.samples[i];
            const auto& q = s.samples[i + 1];
            return {p.u + f * (q.u - p.u), p.v + f * (q.v - p.v), p.z + f * (q.z - p.z)};
          }
        },
        shape_);
  }

  /// Chart velocity d/dt of a band great circle.
  ChartPoint band_velocity(double t) const {
    const auto& s = band();
    const double ta = std::tan(s.a);
    const double c = std::cos(t);
    return {1.0, -s.orientation * ta * std::sin(t) / (1.0 + ta * ta * c * c), 0.0};
  }

 private:
  std::variant<BandGreatCircle, Straight, Polyline> shape_;
};

/// Member gamma^a_{theta,phi} of the central family: through (theta - pi/2, 0),
/// (theta, a) and (theta + pi/2, 0) in the slice z = phi.
inline GeodesicArc band_geodesic(double a, double theta, double phi) {
  if (!std::isfinite(a) || !std::isfinite(theta) || !std::isfinite(phi))
    throw DomainError("band_geodesic: non-finite parameters");
  if (std::abs(a) > kQuarterPi + 1e-15) throw DomainError("band_geodesic: |a| must be <= pi/4");
  return GeodesicArc(GeodesicArc::BandGreatCircle{a, theta, phi, 0.0, 1});
}

/// Image of band_geodesic under the reflection v -> pi/2 - v in the corner
/// line: the covering family of the band centred on v = pi/2.
inline GeodesicArc mirrored_band_geodesic(double a, double theta, double phi) {
  band_geodesic(a, theta, phi);  // validates
  return GeodesicArc(GeodesicArc::BandGreatCircle{a, theta, phi, kHalfPi, -1});
}

/// Clairaut constant psi^2 du/ds of a band great circle: cos a.
inline double band_clairaut_constant(const GeodesicArc& arc, double t) {
  const auto& s = arc.band();
  const ChartPoint p = arc.at(t);
  const ChartPoint dp = arc.band_velocity(t);
  const double w = std::cos(p.v - s.centre);
  const double speed = std::sqrt(w * w * dp.u * dp.u + dp.v * dp.v);
  return w * w * dp.u / speed;
}

}  // namespace systolic
