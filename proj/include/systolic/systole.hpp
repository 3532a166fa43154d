#pragma once

#include "systolic/covering.hpp"
#include "systolic/distance.hpp"
#include "systolic/errors.hpp"
#include "systolic/geodesic.hpp"
#include "systolic/manifold.hpp"
#include "systolic/metric.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace systolic {

struct SystoleResult {
  double value = 0.0;
  SignedAffineIsometry witness;
  ChartPoint base_point;
  double bound = 0.0;
  bool certified = false;
  double accuracy = 0.0;
  /// Elements whose displacement was actually evaluated in the final pass.
  std::size_t evaluated = 0;
};

struct SystoleOptions {
  EnumerationOptions enumeration;
  int max_passes = 8;
};

/// Least displacement over the deck group. The bound starts at the smallest
/// generator displacement and is raised to twice the current minimum so that
/// the result is certified.
inline SystoleResult systole(const ManifoldSpec& m, const SystoleOptions& opt = {}) {
  const MetricSpec spec = m.metric();
  const DeckGroup g = deck_group(m);
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& s : g.generators) bound = std::min(bound, cover_displacement(s, spec).value);
  if (!(bound > 0)) throw InputError("deck group has a generator with a fixed point");
  SystoleResult best;
  for (int pass = 0; pass < opt.max_passes; ++pass) {
    SystoleResult r;
    r.value = std::numeric_limits<double>::infinity();
    r.bound = bound;
    std::vector<SignedAffineIsometry> elems;
    try {
      elems = enumerate_elements(g, spec, bound, opt.enumeration);
    } catch (const ResourceError& e) {
      throw ResourceError(std::string(e.what()) + " (systole bound " + std::to_string(bound) + ")",
                          std::isfinite(best.value) && best.value > 0 ? best.value : bound);
    }
    for (const auto& f : elems) {
      if (displacement_lower_bound(f, spec) > r.value) continue;
      const DisplacementResult d = cover_displacement(f, spec);
      ++r.evaluated;
      // Strict improvement beyond roundoff; ties keep the earlier element.
      if (!std::isfinite(r.value) || d.value < r.value - 1e-12 * std::max(1.0, r.value)) {
        r.value = d.value;
        r.witness = f;
        r.base_point = d.argmin;
        r.accuracy = d.accuracy;
      }
    }
    best = r;
    if (bound >= 2 * r.value) {
      best.certified = true;
      return best;
    }
    bound = 2 * r.value;
  }
  return best;
}

/// Sys^n / Vol.
inline double systolic_ratio(const ManifoldSpec& m, const SystoleOptions& opt = {}) {
  const double s = systole(m, opt).value;
  return std::pow(s, m.dimension()) / volume(m);
}

enum class FamilyKind {
  /// Band great circles gamma^a_{theta,phi} closed by the screw motion.
  band,
  /// Their mirror images about the corner line, closed by the screw about v = pi/2.
  mirrored_band,
  /// Straight helices at a fixed latitude closed by `closing`.
  latitude_helix,
  /// Shortest loop through each sampled base point in the class of
  /// `closing` (same sign pattern and z-shift); optional fixed u or v slice.
  point_class,
  /// Shortest loop through each sampled base point, over all classes.
  point_any,
};

struct FamilyDescriptor {
  std::string name;
  FamilyKind kind = FamilyKind::band;
  SignedAffineIsometry closing;
  std::optional<double> fixed_u;
  std::optional<double> fixed_v;
  double expected_length = kPi;
  /// False for readings reported without a pass/fail claim.
  bool asserted = true;
};

struct FamilySample {
  ChartPoint parameter;  // (a, theta, phi) for band kinds, base point otherwise
  double length = 0.0;
  double deviation = 0.0;
  double closure_error = 0.0;
};

struct FamilyReport {
  FamilyDescriptor family;
  double systole = 0.0;
  std::vector<FamilySample> samples;
  double max_deviation = 0.0;
  double max_closure_error = 0.0;
  double min_length = 0.0;
  double max_length = 0.0;
};

/// Families of closed curves of length pi carried by the singular metrics.
inline std::vector<FamilyDescriptor> systolic_families(const ManifoldSpec& m) {
  std::vector<FamilyDescriptor> out;
  if (m.geometry() != Geometry::singular || m.is_torus()) return out;
  const Moduli& mod = m.moduli();
  const auto sigma = klein_screw(mod);
  const auto tau = klein_translation(mod);
  out.push_back({"band geodesics", FamilyKind::band, sigma, std::nullopt, std::nullopt});
  out.push_back({"mirrored band geodesics", FamilyKind::mirrored_band, compose(sigma, inverse(tau)),
                 std::nullopt, std::nullopt});
  if (!is_bieberbach(m.topology())) return out;
  const DeckGroup g = deck_group(m);
  const auto phi = g.generators[2];
  switch (m.topology()) {
    case Topology::b1:
      out.push_back({"helices at latitude 0", FamilyKind::latitude_helix, compose(phi, inverse(sigma)),
                     std::nullopt, 0.0});
      out.push_back({"helices at latitude pi/4", FamilyKind::latitude_helix, phi, std::nullopt, kQuarterPi});
      out.push_back({"helices at latitude -pi/4", FamilyKind::latitude_helix, phi, std::nullopt, -kQuarterPi});
      break;
    case Topology::b2:
      out.push_back({"generator class through every point", FamilyKind::point_class, phi, std::nullopt,
                     std::nullopt});
      break;
    case Topology::b3:
      out.push_back({"vertical circles in the slice u = 0", FamilyKind::point_class, phi, 0.0, std::nullopt, kPi,
                     false});
      out.push_back({"shortest loops in the latitude slice v = 0", FamilyKind::point_any, phi, std::nullopt, 0.0,
                     kPi, false});
      break;
    case Topology::b4:
      out.push_back({"vertical circles in the slice u = 0", FamilyKind::point_class, phi, 0.0, std::nullopt, kPi,
                     false});
      out.push_back({"shortest loops in the latitude slice v = pi/4", FamilyKind::point_any, phi, std::nullopt,
                     kQuarterPi, kPi, false});
      out.push_back({"shortest loops in the latitude slice v = -pi/4", FamilyKind::point_any, phi, std::nullopt,
                     -kQuarterPi, kPi, false});
      break;
    default: break;
  }
  return out;
}

namespace detail {

inline double point_distance(const ChartPoint& p, const ChartPoint& q) {
  return std::sqrt((p.u - q.u) * (p.u - q.u) + (p.v - q.v) * (p.v - q.v) + (p.z - q.z) * (p.z - q.z));
}

/// Shortest loop through p among the given elements.
inline double shortest_loop_through(const ChartPoint& p, const std::vector<SignedAffineIsometry>& elems,
                                    const MetricSpec& spec) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : elems) {
    const ChartPoint q = e(p);
    const double lb = displacement_lower_bound(SignedAffineIsometry::translation(q.u - p.u, q.v - p.v, q.z - p.z), spec);
    if (lb >= best) continue;
    best = std::min(best, distance(p, q, spec).value);
  }
  return best;
}

}  // namespace detail

/// Samples family members, closes each by its deck element and measures the length.
/// `samples` is the number of values per free parameter.
inline FamilyReport verify_systolic_family(const ManifoldSpec& m, const FamilyDescriptor& fam, int samples,
                                           std::optional<double> sys = std::nullopt) {
  if (samples < 1) throw InputError("verify_systolic_family: samples must be positive");
  const MetricSpec spec = m.metric();
  FamilyReport rep;
  rep.family = fam;
  rep.systole = sys ? *sys : systole(m).value;
  const double zext = m.dimension() == 3 ? m.z_extent() : 0.0;
  auto frac = [samples](int i) { return (double(i) + 0.5) / samples; };
  const double ref = fam.expected_length * spec.scale;
  auto add = [&](const ChartPoint& par, double len, double closure) {
    rep.samples.push_back({par, len, std::abs(len - ref), closure});
  };

  switch (fam.kind) {
    case FamilyKind::band:
    case FamilyKind::mirrored_band:
      for (int i = 0; i <= samples; ++i)
        for (int j = 0; j < samples; ++j) {
          const double a = -kQuarterPi + kHalfPi * double(i) / samples;
          const double th = kPi * frac(j);
          const double ph = zext * frac(j);
          const GeodesicArc arc = fam.kind == FamilyKind::band ? band_geodesic(a, th, ph)
                                                               : mirrored_band_geodesic(a, th, ph);
          const ChartPoint closed = fam.closing(arc.at(arc.t_begin()));
          add({a, th, ph}, curve_length(spec, arc), detail::point_distance(closed, arc.at(arc.t_end())));
        }
      break;
    case FamilyKind::latitude_helix:
      for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
          const ChartPoint p{kPi * frac(i), *fam.fixed_v, zext * frac(j)};
          const ChartPoint q = fam.closing(p);
          const GeodesicArc arc(GeodesicArc::Straight{p, q});
          add(p, curve_length(spec, arc), detail::point_distance(q, arc.at(arc.t_end())));
        }
      break;
    case FamilyKind::point_class:
    case FamilyKind::point_any: {
      const DeckGroup g = deck_group(m);
      std::vector<SignedAffineIsometry> elems;
      for (const auto& e : enumerate_elements(g, spec, 2 * std::max(rep.systole, ref))) {
        if (fam.kind == FamilyKind::point_class &&
            (e.sign != fam.closing.sign || std::abs(e.shift[2] - fam.closing.shift[2]) > 1e-9))
          continue;
        elems.push_back(e);
      }
      // The reversed-axis window spans four generator steps, enough for
      // loops based anywhere in [0, pi)^2.
      for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
          ChartPoint p{kPi * frac(i), kPi * frac(j), zext / 2};
          if (fam.fixed_u) p = {*fam.fixed_u, kPi * frac(j), zext * frac(i)};
          if (fam.fixed_v) p = {kPi * frac(i), *fam.fixed_v, zext * frac(j)};
          add(p, detail::shortest_loop_through(p, elems, spec), 0.0);
        }
      break;
    }
  }
  rep.min_length = std::numeric_limits<double>::infinity();
  rep.max_length = 0.0;
  for (const auto& s : rep.samples) {
    rep.max_deviation = std::max(rep.max_deviation, s.deviation);
    rep.max_closure_error = std::max(rep.max_closure_error, s.closure_error);
    rep.min_length = std::min(rep.min_length, s.length);
    rep.max_length = std::max(rep.max_length, s.length);
  }
  return rep;
}

}  // namespace systolic
