#pragma once

#include "systolic/covering.hpp"
#include "systolic/distance.hpp"
#include "systolic/manifold.hpp"
#include "systolic/systole.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace systolic {

struct CoverageOptions {
  int n_u = 64;
  int n_v = 64;
  int n_z = 1;
  double epsilon = 0.01;
  /// Sampling of the band families: a over [-pi/4, pi/4] inclusive, theta over [0, pi).
  int n_a = 64;
  int n_theta = 128;
  /// Relative tolerance deciding that a loop through a point is systolic.
  double length_tol = 1e-9;
};

struct CoverageResult {
  std::string method;
  std::size_t points = 0;
  double covered_fraction = 0.0;
  /// count -> number of grid points with that many systolic geodesics.
  std::map<int, std::size_t> histogram;
  int min_count = 0;
  int max_count = 0;
  double epsilon = 0.0;
  double systole = 0.0;
  /// Fraction of points on a loop of length Sys in the class of the
  /// suspension generator (singular Bieberbach types).
  std::optional<double> generator_class_fraction;
};

namespace detail {

/// Members of the sampled band family whose great circle passes within eps
/// of the band-local point (u, w). The member (a, theta) is the great circle
/// with normal (-sin a cos theta, -sin a sin theta, cos a); its spherical
/// distance to P is |asin(P . n)|.
inline int band_members_near(double u, double w, const CoverageOptions& o) {
  const double px = std::cos(w) * std::cos(u), py = std::cos(w) * std::sin(u), pz = std::sin(w);
  const double se = std::sin(o.epsilon);
  int count = 0;
  for (int i = 0; i < o.n_a; ++i) {
    const double a = o.n_a == 1 ? 0.0 : -kQuarterPi + kHalfPi * double(i) / (o.n_a - 1);
    const double sa = std::sin(a), ca = std::cos(a);
    for (int j = 0; j < o.n_theta; ++j) {
      const double th = kPi * double(j) / o.n_theta;
      const double dot = -sa * std::cos(th) * px - sa * std::sin(th) * py + ca * pz;
      if (std::abs(dot) <= se) ++count;
    }
  }
  return count;
}

inline void finish(CoverageResult& r, const std::vector<int>& counts) {
  r.points = counts.size();
  std::size_t covered = 0;
  r.min_count = counts.empty() ? 0 : counts.front();
  for (int c : counts) {
    ++r.histogram[c];
    covered += c > 0;
    r.min_count = std::min(r.min_count, c);
    r.max_count = std::max(r.max_count, c);
  }
  r.covered_fraction = counts.empty() ? 0.0 : double(covered) / double(counts.size());
}

}  // namespace detail

/// Systolic geodesics through the points of a grid on a fundamental domain.
///
/// Singular Klein-based quotients: members of the two sampled band families
/// passing within epsilon (the central family covers |v| <= pi/4 mod pi, the
/// mirrored family the other bands; corner points see both). Other
/// quotients: the number of loops of length Sys based at the point, each
/// closed geodesic counted once (e and e^-1 give the same curve).
inline CoverageResult coverage_stats(const ManifoldSpec& m, const CoverageOptions& o = {}) {
  if (o.n_u < 1 || o.n_v < 1 || o.n_z < 1 || o.n_a < 1 || o.n_theta < 1 || !(o.epsilon > 0))
    throw InputError("coverage grid sizes and epsilon must be positive");
  CoverageResult r;
  r.epsilon = o.epsilon;
  const SystoleResult sys = systole(m);
  r.systole = sys.value;
  const MetricSpec spec = m.metric();
  std::vector<int> counts;

  if (m.geometry() == Geometry::singular && !m.is_torus()) {
    r.method = "band-family sampling";
    const double uext = m.moduli().a / 2, vext = m.moduli().b;
    for (int j = 0; j < o.n_v; ++j)
      for (int i = 0; i < o.n_u; ++i) {
        const double u = uext * (double(i) + 0.5) / o.n_u;
        const double v = vext * (double(j) + 0.5) / o.n_v;
        const double v0 = std::remainder(v, kPi);
        int c = 0;
        if (std::abs(v0) <= kQuarterPi) c += detail::band_members_near(u, v0, o);
        const double vm = kHalfPi - (v0 < 0 ? v0 + kPi : v0);
        if (std::abs(vm) <= kQuarterPi) c += detail::band_members_near(u, vm, o);
        counts.push_back(c);
      }
    detail::finish(r, counts);
    if (m.topology() == Topology::b2) {
      const DeckGroup g = deck_group(m);
      const auto phi = g.generators[2];
      std::vector<SignedAffineIsometry> cls;
      for (const auto& e : enumerate_elements(g, spec, 2 * sys.value))
        if (e.sign == phi.sign && std::abs(e.shift[2] - phi.shift[2]) < 1e-9) cls.push_back(e);
      std::size_t on = 0, total = 0;
      for (int k = 0; k < o.n_z; ++k)
        for (int j = 0; j < o.n_v; ++j)
          for (int i = 0; i < o.n_u; ++i) {
            const ChartPoint p{uext * (double(i) + 0.5) / o.n_u, vext * (double(j) + 0.5) / o.n_v,
                               m.z_extent() * (double(k) + 0.5) / o.n_z};
            ++total;
            if (detail::shortest_loop_through(p, cls, spec) <= sys.value * (1 + 1e-6) + 1e-9) ++on;
          }
      r.generator_class_fraction = double(on) / double(total);
    }
    return r;
  }

  r.method = "loops of systolic length through each point";
  const DeckGroup g = deck_group(m);
  const auto elems = enumerate_elements(g, spec, sys.value * (1 + 1e-6));
  // Fundamental-domain box spanned by the generators.
  std::array<double, 3> ext{0, 0, 0};
  for (const auto& s : g.generators)
    for (int i = 0; i < 3; ++i) ext[i] = std::max(ext[i], std::abs(s.shift[i]));
  const int nz = m.dimension() == 3 ? o.n_z : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < o.n_v; ++j)
      for (int i = 0; i < o.n_u; ++i) {
        const ChartPoint p{ext[0] * (double(i) + 0.5) / o.n_u, ext[1] * (double(j) + 0.5) / o.n_v,
                           ext[2] * (double(k) + 0.5) / nz};
        int c = 0;
        for (const auto& e : elems) {
          const double d = distance(p, e(p), spec).value;
          if (d <= sys.value * (1 + o.length_tol) + 1e-12) ++c;
        }
        counts.push_back(c / 2);
      }
  detail::finish(r, counts);
  return r;
}

}  // namespace systolic
