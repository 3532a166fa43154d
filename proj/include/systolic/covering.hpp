#pragma once

#include "systolic/distance.hpp"
#include "systolic/errors.hpp"
#include "systolic/isometry.hpp"
#include "systolic/manifold.hpp"
#include "systolic/profile.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace systolic {

struct EnumerationOptions {
  std::size_t cap = 1'000'000;
};

struct DisplacementResult {
  double value = 0.0;
  /// Base point p realising dist(p, f(p)) = value (for a normalizer element,
  /// for the coset member in `element`).
  ChartPoint argmin;
  /// The element whose displacement was measured.
  SignedAffineIsometry element;
  double accuracy = 0.0;
};

namespace detail {

/// Per-axis weights w with dist >= |diag(w) t| on the chart.
inline std::array<double, 3> lower_weights(const MetricSpec& spec) {
  return {spec.scale * spec.profile.min_value(), spec.scale, spec.scale};
}

inline std::array<double, 3> generator_extent(const DeckGroup& g) {
  std::array<double, 3> m{0, 0, 0};
  for (const auto& s : g.generators)
    for (int i = 0; i < 3; ++i) m[i] = std::max(m[i], std::abs(s.shift[i]));
  return m;
}

/// All group elements whose translation part lies in the box
/// |t_i - centre_i| <= radius_i, by breadth-first right multiplication.
inline std::vector<SignedAffineIsometry> elements_in_box(const DeckGroup& g, const std::array<double, 3>& centre,
                                                         const std::array<double, 3>& radius, std::size_t cap,
                                                         double best_bound = 0.0) {
  std::vector<SignedAffineIsometry> steps;
  for (const auto& s : g.generators) {
    steps.push_back(s);
    steps.push_back(inverse(s));
  }
  auto inside = [&](const SignedAffineIsometry& f) {
    for (int i = 0; i < 3; ++i)
      if (std::abs(f.shift[i] - centre[i]) > radius[i] + 1e-9) return false;
    return true;
  };
  std::unordered_map<IsometryKey, std::size_t, IsometryKeyHash> seen;
  std::vector<SignedAffineIsometry> out;
  std::deque<std::size_t> queue;
  const auto id = SignedAffineIsometry::identity();
  seen.emplace(key_of(id), 0);
  out.push_back(id);
  queue.push_back(0);
  while (!queue.empty()) {
    const SignedAffineIsometry h = out[queue.front()];
    queue.pop_front();
    for (const auto& s : steps) {
      const SignedAffineIsometry n = compose(h, s);
      if (!inside(n)) continue;
      if (seen.emplace(key_of(n), out.size()).second) {
        if (out.size() >= cap)
          throw ResourceError("group enumeration exceeded the cap of " + std::to_string(cap) + " candidates",
                              best_bound);
        out.push_back(n);
        queue.push_back(out.size() - 1);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Lower bound on the displacement of f: the flat displacement for the
/// smallest value of psi. Reversed axes contribute nothing (fixed coordinate).
inline double displacement_lower_bound(const SignedAffineIsometry& f, const MetricSpec& spec) {
  const auto w = detail::lower_weights(spec);
  double s = 0.0;
  for (int i = 0; i < spec.dimension; ++i)
    if (f.sign[i] > 0) s += (w[i] * f.shift[i]) * (w[i] * f.shift[i]);
  return std::sqrt(s);
}

/// Non-identity elements with displacement lower bound <= bound, one
/// representative per translation of each reversed axis inside a window of
/// four generator steps (conjugation by translations sweeps every class
/// through it). Sorted lexicographically; closed under inversion.
inline std::vector<SignedAffineIsometry> enumerate_elements(const DeckGroup& g, const MetricSpec& spec, double bound,
                                                            const EnumerationOptions& opt = {}) {
  if (!(bound > 0) || !std::isfinite(bound)) throw InputError("enumeration bound must be positive and finite");
  const auto ext = detail::generator_extent(g);
  const auto w = detail::lower_weights(spec);
  std::array<double, 3> window{}, radius{};
  for (int i = 0; i < 3; ++i) {
    window[i] = 4 * ext[i];
    radius[i] = ext[i] == 0 ? 0.0 : std::max(bound / w[i], window[i]) + 2 * ext[i];
  }
  auto all = detail::elements_in_box(g, {0, 0, 0}, radius, opt.cap, bound);
  std::vector<SignedAffineIsometry> out;
  for (const auto& f : all) {
    if (f.is_identity(1e-9)) continue;
    bool keep = displacement_lower_bound(f, spec) <= bound * (1 + 1e-12);
    for (int i = 0; i < 3 && keep; ++i)
      if (f.sign[i] < 0 && std::abs(f.shift[i]) > window[i] + 1e-9) keep = false;
    if (keep) out.push_back(f);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return lexicographic_less(a, b); });
  return out;
}

/// Whether f is an element of the group (translation parts compared to 1e-9).
inline bool contains(const DeckGroup& g, const SignedAffineIsometry& f, const EnumerationOptions& opt = {}) {
  if (f.is_identity(1e-9)) return true;
  const auto ext = detail::generator_extent(g);
  std::array<double, 3> radius{};
  for (int i = 0; i < 3; ++i) {
    if (ext[i] == 0) {
      if (std::abs(f.shift[i]) > 1e-9) return false;
      continue;
    }
    radius[i] = std::abs(f.shift[i]) + 4 * ext[i];
  }
  const auto box = detail::elements_in_box(g, {0, 0, 0}, radius, opt.cap);
  return std::any_of(box.begin(), box.end(), [&](const auto& h) { return h.approx_equal(f, 1e-9); });
}

/// Whether the isometry f normalizes g, i.e. descends to the quotient.
inline bool descends(const SignedAffineIsometry& f, const DeckGroup& g, const MetricSpec& spec) {
  if (!is_isometry_of(f, spec)) return false;
  for (const auto& s : g.generators)
    if (!contains(g, conjugate(f, s))) return false;
  return true;
}

namespace detail {

/// Minimum of F on [lo, hi]: uniform grid plus the given extra points, then
/// Brent refinement around the best grid cells.
inline std::pair<double, double> minimize_1d(const std::function<double(double)>& F, double lo, double hi,
                                             const std::vector<double>& extra, int n = 64) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * double(i) / n;
    pts.push_back({F(x), x});
  }
  for (double x : extra)
    if (x >= lo && x <= hi) pts.push_back({F(x), x});
  std::sort(pts.begin(), pts.end());
  std::pair<double, double> best = pts.front();
  const double h = (hi - lo) / n;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, pts.size()); ++k) {
    const double a = std::max(lo, pts[k].second - h), b = std::min(hi, pts[k].second + h);
    if (!(b > a)) continue;
    const auto r = boost::math::tools::brent_find_minima(F, a, b, 40);
    if (r.second < best.first) best = {r.second, r.first};
  }
  return best;
}

}  // namespace detail

/// Displacement inf_p dist(p, f(p)) of f acting on the universal cover.
///
/// Flat metrics: closed form. Singular metric: reversed u admits the fixed
/// meridian u = t_u/2; otherwise dist((0, v), f(0, v)) depends on v only and
/// is minimised on one period (sign +1 in v, period pi/2) or on the
/// symmetric half-range around the fixed latitude t_v/2 (sign -1 in v).
inline DisplacementResult cover_displacement(const SignedAffineIsometry& f, const MetricSpec& spec) {
  DisplacementResult r;
  r.element = f;
  const double tz = (spec.dimension == 3 && f.sign[2] > 0) ? f.shift[2] : 0.0;
  const double z0 = (spec.dimension == 3 && f.sign[2] < 0) ? f.shift[2] / 2 : 0.0;
  if (!spec.profile.is_singular()) {
    const double w = spec.profile.weight();
    const double du = f.sign[0] > 0 ? w * f.shift[0] : 0.0;
    const double dv = f.sign[1] > 0 ? f.shift[1] : 0.0;
    r.value = spec.scale * std::sqrt(du * du + dv * dv + tz * tz);
    r.argmin = {f.sign[0] < 0 ? f.shift[0] / 2 : 0.0, f.sign[1] < 0 ? f.shift[1] / 2 : 0.0, z0};
    return r;
  }
  if (!is_isometry_of(f, spec)) throw InputError("displacement: map is not an isometry of the singular metric");
  double surf = 0.0;
  ChartPoint arg{0.0, 0.0, z0};
  if (f.sign[0] < 0) {
    arg.u = f.shift[0] / 2;
    if (f.sign[1] < 0) {
      arg.v = f.shift[1] / 2;
    } else {
      surf = std::abs(f.shift[1]);
    }
  } else {
    const double tu = f.shift[0], tv = f.shift[1];
    if (f.sign[1] > 0) {
      auto F = [&](double v) { return singular_surface_distance_exact(0.0, v, tu, v + tv); };
      const auto m = detail::minimize_1d(F, 0.0, kHalfPi, {kQuarterPi});
      surf = m.first;
      arg.v = m.second;
    } else {
      const double c = tv / 2;
      auto F = [&](double s) { return singular_surface_distance_exact(0.0, c + s, tu, c - s); };
      const double S = std::min(F(0.0) / 2, kPi);
      std::vector<double> corners;
      for (int k = 0; k <= 8; ++k) {
        const double s = std::abs(std::remainder(kQuarterPi - c, kHalfPi)) + k * kHalfPi;
        corners.push_back(s);
      }
      const auto m = S > 0 ? detail::minimize_1d(F, 0.0, S, corners) : std::pair<double, double>{F(0.0), 0.0};
      surf = m.first;
      arg.v = c + m.second;
    }
  }
  r.value = spec.scale * std::hypot(surf, tz);
  r.argmin = arg;
  // The minimisation is resolved to roughly sqrt(eps) in the base point and
  // the distance is exact to roundoff, so the value error is second order.
  r.accuracy = 1e-10 * std::max(1.0, r.value);
  return r;
}

/// Displacement of f on the quotient by g: the cover displacement for
/// elements of g; for a normalizer element, the least displacement over the
/// coset g.f (shortest loop in the quotient joining p to the image of p).
inline DisplacementResult displacement(const SignedAffineIsometry& f, const MetricSpec& spec, const ManifoldSpec& m,
                                       const EnumerationOptions& opt = {}) {
  const DeckGroup g = deck_group(m);
  if (f.is_identity(1e-12)) return {0.0, {}, f, 0.0};
  if (contains(g, f, opt)) return cover_displacement(f, spec);
  DisplacementResult best = cover_displacement(f, spec);
  const auto ext = detail::generator_extent(g);
  const auto w = detail::lower_weights(spec);
  std::array<double, 3> centre{}, radius{};
  for (int i = 0; i < 3; ++i) {
    centre[i] = 0.0;
    radius[i] = ext[i] == 0 ? 0.0 : std::max(best.value / w[i], 4 * ext[i]) + std::abs(f.shift[i]) + 2 * ext[i];
  }
  for (const auto& k : detail::elements_in_box(g, centre, radius, opt.cap, best.value)) {
    const SignedAffineIsometry h = compose(k, f);
    if (displacement_lower_bound(h, spec) >= best.value) continue;
    const DisplacementResult d = cover_displacement(h, spec);
    if (d.value < best.value) best = d;
  }
  return best;
}

}  // namespace systolic
