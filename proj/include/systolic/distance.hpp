#pragma once

#include "systolic/errors.hpp"
#include "systolic/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace systolic {

struct DistanceResult {
  double value = 0.0;
  /// Estimated absolute error.
  double accuracy = 0.0;
  /// False when the exact solver found no candidate and the grid value is returned.
  bool converged = true;
  std::string method;
};

namespace detail {

/// arcsin(x) given an accurate value of 1 - |x|.
inline double asin_near_one(double x, double one_minus_abs) {
  const double ax = std::min(1.0, std::abs(x));
  if (ax < 0.5) return std::asin(x);
  const double r = std::atan2(ax, std::sqrt(std::max(0.0, one_minus_abs) * (1.0 + ax)));
  return x < 0 ? -r : r;
}

/// Great circle of a unit sphere with top latitude wm, measured from its
/// ascending node: longitude and arclength at latitude w, |w| <= wm.
inline double node_longitude(double w, double wm) {
  if (wm >= kHalfPi) return 0.0;
  const double aw = std::abs(w);
  const double x = std::tan(w) / std::tan(wm);
  const double omx = std::sin(wm - aw) / (std::sin(wm) * std::cos(aw));
  return asin_near_one(x, omx);
}

inline double node_arclength(double w, double wm) {
  const double aw = std::abs(w);
  const double x = std::sin(w) / std::sin(wm);
  const double omx = 2.0 * std::cos(0.5 * (wm + aw)) * std::sin(0.5 * (wm - aw)) / std::sin(wm);
  return asin_near_one(x, omx);
}

/// Local latitude interval of a path inside one band.
struct BandPiece {
  double w1, w2;
};

/// Split the latitude range [lo, hi] into band-local pieces. Ends lying on a
/// corner line get local latitude exactly +-pi/4.
inline std::vector<BandPiece> band_pieces(double lo, double hi) {
  std::vector<BandPiece> out;
  const long k0 = band_index(lo), k1 = band_index(hi);
  for (long k = std::min(k0, k1) - 1; k <= std::max(k0, k1) + 1; ++k) {
    const double c = static_cast<double>(k) * kHalfPi;
    const double a = std::max(lo, c - kQuarterPi), b = std::min(hi, c + kQuarterPi);
    if (!(b > a)) continue;
    const double w1 = (a == lo) ? std::clamp(lo - c, -kQuarterPi, kQuarterPi) : -kQuarterPi;
    const double w2 = (b == hi) ? std::clamp(hi - c, -kQuarterPi, kQuarterPi) : kQuarterPi;
    if (w2 > w1) out.push_back({w1, w2});
  }
  return out;
}

inline double pieces_top(const std::vector<BandPiece>& ps) {
  double m = 0.0;
  for (const auto& p : ps) m = std::max({m, std::abs(p.w1), std::abs(p.w2)});
  return m;
}

inline double pieces_du(const std::vector<BandPiece>& ps, double wm) {
  double s = 0.0;
  for (const auto& p : ps) s += node_longitude(p.w2, wm) - node_longitude(p.w1, wm);
  return s;
}

inline double pieces_len(const std::vector<BandPiece>& ps, double wm) {
  double s = 0.0;
  for (const auto& p : ps) s += node_arclength(p.w2, wm) - node_arclength(p.w1, wm);
  return s;
}

inline double sphere_distance(double w1, double w2, double du) {
  const double x1 = std::cos(w1), z1 = std::sin(w1);
  const double x2 = std::cos(w2) * std::cos(du), y2 = std::cos(w2) * std::sin(du), z2 = std::sin(w2);
  const double cx = -z1 * y2, cy = z1 * x2 - x1 * z2, cz = x1 * y2;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), x1 * x2 + z1 * z2);
}

/// Minor great-circle arc inside one band: admissible when the arc never
/// leaves |w| <= pi/4.
inline double same_band_candidate(double w1, double w2, double du) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (std::abs(du) > kPi) return inf;
  const double x1 = std::cos(w1), z1 = std::sin(w1);
  const double x2 = std::cos(w2) * std::cos(du), y2 = std::cos(w2) * std::sin(du), z2 = std::sin(w2);
  const double nx = -z1 * y2, ny = z1 * x2 - x1 * z2, nz = x1 * y2;
  const double nn = std::sqrt(nx * nx + ny * ny + nz * nz);
  const double d = std::atan2(nn, x1 * x2 + z1 * z2);
  if (nn < 1e-14) return d;  // coincident, or antipodal with a turning point at the ends
  const double top = std::acos(std::min(1.0, std::abs(nz) / nn));
  if (top <= kQuarterPi + 1e-15) return d;
  // Highest and lowest points of the circle: +-(e_z - (e_z.n)n).
  const double h = nz / nn;
  const double vx = -h * nx / nn, vy = -h * ny / nn, vz = 1.0 - h * nz / nn;
  auto on_arc = [&](double sx, double sy, double sz) {
    // P x X and X x Q both along n.
    const double a = (0.0 * sz - z1 * sy) * nx + (z1 * sx - x1 * sz) * ny + (x1 * sy - 0.0 * sx) * nz;
    const double b = (sy * z2 - sz * y2) * nx + (sz * x2 - sx * z2) * ny + (sx * y2 - sy * x2) * nz;
    return a >= 0.0 && b >= 0.0;
  };
  if (on_arc(vx, vy, vz) || on_arc(-vx, -vy, -vz)) return inf;
  return d;
}

/// Path monotone in latitude, Clairaut constant cos wm in [0, cos pi/4].
inline double monotone_candidate(double lo, double hi, double du) {
  const auto ps = band_pieces(lo, hi);
  const double wmin = pieces_top(ps);
  if (ps.empty()) return std::abs(du) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  const double target = std::abs(du);
  if (target > pieces_du(ps, wmin)) return std::numeric_limits<double>::infinity();
  double a = wmin, b = kHalfPi;
  for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
    const double m = 0.5 * (a + b);
    if (pieces_du(ps, m) > target) a = m; else b = m;
  }
  const double wm = 0.5 * (a + b);
  // First-order correction for the residual longitude: dL/d(du) = Clairaut constant.
  return pieces_len(ps, wm) + std::cos(wm) * (target - pieces_du(ps, wm));
}

/// Path running along the corner line vc for part of its course.
inline double corner_candidate(double v1, double v2, double du, double vc) {
  const auto p1 = band_pieces(std::min(v1, vc), std::max(v1, vc));
  const auto p2 = band_pieces(std::min(v2, vc), std::max(v2, vc));
  const double run = std::abs(du) - pieces_du(p1, kQuarterPi) - pieces_du(p2, kQuarterPi);
  if (run < -1e-13) return std::numeric_limits<double>::infinity();
  return pieces_len(p1, kQuarterPi) + pieces_len(p2, kQuarterPi) + std::max(0.0, run) * kCornerWeight;
}

}  // namespace detail

/// Distance on the universal cover of the singular surface, unit scale.
///
/// Minimising geodesics are piecewise great circles; by Clairaut they are
/// either a minor arc inside one band, monotone in latitude with constant
/// c <= cos(pi/4), or contain a stretch along a corner line with c = cos(pi/4).
/// The candidate of each kind is solved in closed form (bisection on the
/// turning latitude) and the shortest is returned.
inline double singular_surface_distance_exact(double u1, double v1, double u2, double v2) {
  const double du = u2 - u1;
  double best = std::numeric_limits<double>::infinity();
  for (long k : {band_index(v1), band_index(v2)}) {
    const double c = static_cast<double>(k) * kHalfPi;
    const double w1 = v1 - c, w2 = v2 - c;
    if (std::abs(w1) <= kQuarterPi + 1e-15 && std::abs(w2) <= kQuarterPi + 1e-15)
      best = std::min(best, detail::same_band_candidate(std::clamp(w1, -kQuarterPi, kQuarterPi),
                                                        std::clamp(w2, -kQuarterPi, kQuarterPi), du));
  }
  best = std::min(best, detail::monotone_candidate(std::min(v1, v2), std::max(v1, v2), du));
  const double lo = std::min(v1, v2) - kHalfPi, hi = std::max(v1, v2) + kHalfPi;
  for (double k = std::ceil((lo - kQuarterPi) / kHalfPi); kQuarterPi + k * kHalfPi <= hi; k += 1.0)
    best = std::min(best, detail::corner_candidate(v1, v2, du, kQuarterPi + k * kHalfPi));
  return best;
}

/// First-order fast marching for psi^2 du^2 + dv^2 on a window around p and
/// q, grid spacing h in both chart directions. Value at q by bilinear
/// interpolation.
inline double fast_marching_distance(const LatitudeProfile& profile, const ChartPoint& p,
                                     const ChartPoint& q, double h) {
  if (!(h > 0)) throw InputError("fast marching spacing must be positive");
  const double mu = 0.25 + 4 * h, mv = kHalfPi + 4 * h;
  const double u0 = std::min(p.u, q.u) - mu, u1 = std::max(p.u, q.u) + mu;
  const double v0 = std::min(p.v, q.v) - mv, v1 = std::max(p.v, q.v) + mv;
  const std::size_t nu = static_cast<std::size_t>(std::ceil((u1 - u0) / h)) + 1;
  const std::size_t nv = static_cast<std::size_t>(std::ceil((v1 - v0) / h)) + 1;
  if (nu * nv > 60'000'000) throw ResourceError("fast marching grid exceeds 6e7 nodes", 0.0);
  const double hu = (u1 - u0) / double(nu - 1), hv = (v1 - v0) / double(nv - 1);
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> T(nu * nv, inf);
  std::vector<char> done(nu * nv, 0);
  std::vector<double> w(nv);
  for (std::size_t j = 0; j < nv; ++j) w[j] = profile(v0 + double(j) * hv);
  auto idx = [nu](std::size_t i, std::size_t j) { return j * nu + i; };
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;

  // Seed a disk of a few cells with the locally flat distance.
  const double r0 = 3.0 * h;
  const double wp = profile(p.v);
  const long ic = std::lround((p.u - u0) / hu), jc = std::lround((p.v - v0) / hv);
  for (long j = jc - 4; j <= jc + 4; ++j)
    for (long i = ic - 4; i <= ic + 4; ++i) {
      if (i < 0 || j < 0 || i >= long(nu) || j >= long(nv)) continue;
      const double uu = u0 + double(i) * hu, vv = v0 + double(j) * hv;
      const double wm = 0.5 * (wp + w[std::size_t(j)]);
      const double d = std::hypot(wm * (uu - p.u), vv - p.v);
      if (d <= r0) {
        T[idx(i, j)] = d;
        heap.push({d, idx(i, j)});
      }
    }

  while (!heap.empty()) {
    auto [t, k] = heap.top();
    heap.pop();
    if (done[k] || t > T[k]) continue;
    done[k] = 1;
    const std::size_t i = k % nu, j = k / nu;
    const std::size_t nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (const auto& n : nb) {
      const std::size_t a = n[0], b = n[1];
      if (a >= nu || b >= nv) continue;
      const std::size_t kk = idx(a, b);
      if (done[kk]) continue;
      const double tu = std::min(a > 0 ? T[idx(a - 1, b)] : inf, a + 1 < nu ? T[idx(a + 1, b)] : inf);
      const double tv = std::min(b > 0 ? T[idx(a, b - 1)] : inf, b + 1 < nv ? T[idx(a, b + 1)] : inf);
      const double A = w[b] * hu, B = hv;
      double cand = std::min(tu + A, tv + B);
      if (std::isfinite(tu) && std::isfinite(tv)) {
        const double ia = 1 / (A * A), ib = 1 / (B * B);
        const double qa = ia + ib, qb = -2 * (tu * ia + tv * ib), qc = tu * tu * ia + tv * tv * ib - 1;
        const double disc = qb * qb - 4 * qa * qc;
        if (disc >= 0) {
          const double r = (-qb + std::sqrt(disc)) / (2 * qa);
          if (r >= std::max(tu, tv)) cand = std::min(cand, r);
        }
      }
      if (cand < T[kk]) {
        T[kk] = cand;
        heap.push({cand, kk});
      }
    }
  }

  const double fu = (q.u - u0) / hu, fv = (q.v - v0) / hv;
  const std::size_t i = std::min<std::size_t>(std::size_t(fu), nu - 2);
  const std::size_t j = std::min<std::size_t>(std::size_t(fv), nv - 2);
  const double s = fu - double(i), r = fv - double(j);
  return (1 - s) * (1 - r) * T[idx(i, j)] + s * (1 - r) * T[idx(i + 1, j)] +
         (1 - s) * r * T[idx(i, j + 1)] + s * r * T[idx(i + 1, j + 1)];
}

/// Fast marching at h and h/2 with one Richardson step.
inline DistanceResult fast_marching_refined(const LatitudeProfile& profile, const ChartPoint& p,
                                            const ChartPoint& q, double h = kPi / 512) {
  const double coarse = fast_marching_distance(profile, p, q, h);
  const double fine = fast_marching_distance(profile, p, q, h / 2);
  return {2 * fine - coarse, std::abs(fine - coarse), true, "fast-marching"};
}

struct DistanceOptions {
  /// Also run fast marching and report its deviation as the accuracy field.
  bool cross_check = false;
  double spacing = kPi / 512;
};

/// Geodesic distance on the universal cover of the surface psi^2 du^2 + dv^2
/// (the z coordinates are ignored), multiplied by the metric scale.
inline DistanceResult surface_distance(const ChartPoint& p, const ChartPoint& q, const MetricSpec& spec,
                                       const DistanceOptions& opt = {}) {
  for (double x : {p.u, p.v, q.u, q.v})
    if (!std::isfinite(x)) throw DomainError("surface_distance: chart points must be finite");
  if (!spec.profile.is_singular()) {
    const double w = spec.profile.weight();
    return {spec.scale * std::hypot(w * (q.u - p.u), q.v - p.v), 0.0, true, "closed-form"};
  }
  DistanceResult r;
  const double exact = singular_surface_distance_exact(p.u, p.v, q.u, q.v);
  if (std::isfinite(exact)) {
    r = {exact, 1e-12 * std::max(1.0, exact), true, "clairaut-shooting"};
    if (opt.cross_check && exact > 0) {
      const DistanceResult g = fast_marching_refined(spec.profile, p, q, opt.spacing);
      r.accuracy = std::max(r.accuracy, std::abs(g.value - exact));
    }
  } else {
    r = fast_marching_refined(spec.profile, p, q, opt.spacing);
    r.converged = false;
  }
  r.value *= spec.scale;
  r.accuracy *= spec.scale;
  return r;
}

/// Distance on the universal cover of the metric; for 3-metrics the product
/// splitting d^2 = d_surface^2 + dz^2.
inline DistanceResult distance(const ChartPoint& p, const ChartPoint& q, const MetricSpec& spec,
                               const DistanceOptions& opt = {}) {
  DistanceResult r = surface_distance(p, q, spec, opt);
  if (spec.dimension == 3) {
    const double dz = spec.scale * (q.z - p.z);
    const double d = std::hypot(r.value, dz);
    if (d > 0) r.accuracy *= r.value / d;
    r.value = d;
  }
  return r;
}

}  // namespace systolic
