#pragma once

#include "systolic/geodesic.hpp"
#include "systolic/manifold.hpp"
#include "systolic/profile.hpp"
#include "systolic/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace systolic {

namespace detail {

/// Parameters in (0, 1) where the straight chart segment p -> q crosses a
/// corner line of the singular profile.
inline std::vector<double> corner_crossings(const ChartPoint& p, const ChartPoint& q) {
  std::vector<double> out;
  const double dv = q.v - p.v;
  if (dv == 0.0) return out;
  const double lo = std::min(p.v, q.v), hi = std::max(p.v, q.v);
  for (double k = std::ceil((lo - kQuarterPi) / kHalfPi); kQuarterPi + k * kHalfPi < hi; k += 1.0) {
    const double vc = kQuarterPi + k * kHalfPi;
    if (vc > lo) out.push_back((vc - p.v) / dv);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline double segment_length(const MetricSpec& spec, const ChartPoint& p, const ChartPoint& q,
                             double tol) {
  const double du = q.u - p.u, dv = q.v - p.v, dz = spec.dimension == 3 ? q.z - p.z : 0.0;
  if (!spec.profile.is_singular() || du == 0.0) {
    const double w = spec.profile(p.v);
    return spec.scale * std::sqrt(w * w * du * du + dv * dv + dz * dz);
  }
  auto f = [&](double s) {
    const double w = spec.profile(p.v + s * dv);
    return std::sqrt(w * w * du * du + dv * dv + dz * dz);
  };
  return spec.scale * quad::adaptive_split(f, 0.0, 1.0, corner_crossings(p, q), tol);
}

}  // namespace detail

/// Length of a curve in the metric. Straight chart segments and polylines
/// are integrated exactly per segment (split at corner lines); band great
/// circles by adaptive quadrature of the speed.
inline double curve_length(const MetricSpec& spec, const GeodesicArc& arc, double tol = 1e-12) {
  if (const auto* s = std::get_if<GeodesicArc::Straight>(&arc.shape()))
    return detail::segment_length(spec, s->p, s->q, tol);
  if (const auto* pl = std::get_if<GeodesicArc::Polyline>(&arc.shape())) {
    double sum = 0.0;
    for (std::size_t i = 1; i < pl->samples.size(); ++i)
      sum += detail::segment_length(spec, pl->samples[i - 1], pl->samples[i], tol);
    return sum;
  }
  auto speed = [&](double t) {
    const ChartPoint p = arc.at(t);
    const ChartPoint dp = arc.band_velocity(t);
    const double w = spec.profile(p.v);
    return std::sqrt(w * w * dp.u * dp.u + dp.v * dp.v);
  };
  return spec.scale * quad::adaptive(speed, arc.t_begin(), arc.t_end(), tol);
}

inline double curve_length(const MetricSpec& spec, const std::vector<ChartPoint>& polyline,
                           double tol = 1e-12) {
  return curve_length(spec, GeodesicArc(GeodesicArc::Polyline{polyline}), tol);
}

/// Integral of psi over [v0, v1], split at corner lines.
inline double profile_integral(const LatitudeProfile& profile, double v0, double v1,
                               double tol = 1e-13) {
  if (!profile.is_singular()) return profile.weight() * (v1 - v0);
  const ChartPoint p{0, v0, 0}, q{0, v1, 0};
  std::vector<double> breaks;
  for (double s : detail::corner_crossings(p, q)) breaks.push_back(v0 + s * (v1 - v0));
  return quad::adaptive_split([&](double v) { return profile(v); }, v0, v1, breaks, tol);
}

/// Volume (area for surfaces) of a fundamental domain: the integral of dg.
inline double volume(const ManifoldSpec& m) {
  const MetricSpec spec = m.metric();
  const Moduli& mod = m.moduli();
  const double sn = std::pow(spec.scale, spec.dimension);
  if (m.is_torus()) {
    if (m.geometry() == Geometry::flat) return sn * std::abs(m.lattice_determinant());
    double v = mod.lattice[0][0] * profile_integral(spec.profile, 0.0, mod.lattice[1][1]);
    if (mod.lattice.size() == 3) v *= mod.lattice[2][2];
    return sn * v;
  }
  // Klein bottle: u in [0, a/2), v in [0, b).
  double area = (mod.a / 2) * profile_integral(spec.profile, 0.0, mod.b);
  if (m.dimension() == 3) area *= m.z_extent();
  return sn * area;
}

}  // namespace systolic
