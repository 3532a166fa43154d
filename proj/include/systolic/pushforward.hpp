#pragma once

#include "systolic/density.hpp"
#include "systolic/errors.hpp"
#include "systolic/geodesic.hpp"
#include "systolic/isometry.hpp"
#include "systolic/manifold.hpp"
#include "systolic/metric.hpp"
#include "systolic/quadrature.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace systolic {

using TestFunction = std::function<double(const ChartPoint&)>;

/// Quotients carrying the two band families: the singular Klein bottle
/// times a circle and the singular Bieberbach types.
inline bool carries_band_families(const ManifoldSpec& m) {
  return m.geometry() == Geometry::singular &&
         (m.topology() == Topology::klein_cross_circle || is_bieberbach(m.topology()));
}

/// Length of one z-period of the family parameter phi.
inline double family_height(const ManifoldSpec& m) { return m.z_extent(); }

/// 2 x (integral of the density over a) x pi x L: the total mass of the
/// measure on both families.
inline double measure_mass(const ManifoldSpec& m, const BandDensity& dens = BandDensity::paper()) {
  if (!carries_band_families(m)) throw InputError("measure_mass: needs K x S^1 or a Bieberbach type with g0");
  return 2 * dens.total() * kPi * family_height(m);
}

/// Deck-invariant smooth bump: a von Mises product
///   exp(k_u (cos(u - s z - u0) - 1) + k_v (cos(2 (v - v0)) - 1) + k_z (cos(2 pi (z - z0) / P) - 1))
/// summed over coset representatives of the subgroup leaving it invariant.
struct InvariantBump {
  double u0 = 0, v0 = 0, z0 = 0;
  double ku = 1, kv = 1, kz = 1;
  double shear = 0;     // s
  double z_period = 1;  // P
  std::vector<SignedAffineIsometry> cosets;
  double weight = 1;

  double base(const ChartPoint& p) const {
    const double ut = p.u - shear * p.z;
    return std::exp(ku * (std::cos(ut - u0) - 1) + kv * (std::cos(2 * (p.v - v0)) - 1) +
                    kz * (std::cos(2 * kPi * (p.z - z0) / z_period) - 1));
  }
  double operator()(const ChartPoint& p) const {
    double s = 0;
    for (const auto& c : cosets) s += base(c(p));
    return weight * s;
  }
};

/// Invariance structure of the bump for each quotient: the base function is
/// invariant under sigma^2, tau and a power of the z generator; the listed
/// representatives complete it to the whole group.
inline InvariantBump bump_template(const ManifoldSpec& m) {
  if (!carries_band_families(m)) throw InputError("test functions are defined for K x S^1 and B1..B4 with g0");
  InvariantBump b;
  const Moduli& mod = m.moduli();
  const auto sigma = klein_screw(mod);
  const auto phi = deck_group(m).generators[2];
  const auto id = SignedAffineIsometry::identity();
  switch (m.topology()) {
    case Topology::klein_cross_circle:
      b.z_period = mod.circle_length;
      b.cosets = {id, sigma};
      break;
    case Topology::b1:
      b.shear = mod.alpha / mod.d;
      b.z_period = mod.d;
      b.cosets = {id, sigma};
      break;
    case Topology::b2:
      b.shear = mod.alpha / mod.d;
      b.z_period = 2 * mod.d;
      b.cosets = {id, sigma, phi, compose(phi, sigma)};
      break;
    default:  // B3, B4: phi^2 is the translation z + 2 pi
      b.z_period = 2 * mod.d;
      b.cosets = {id, sigma, phi, compose(phi, sigma)};
      break;
  }
  return b;
}

/// Seeded random bumps; centres uniform on the fundamental domain,
/// concentrations in [1, 4].
inline std::vector<InvariantBump> random_bumps(const ManifoldSpec& m, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<InvariantBump> out;
  for (int i = 0; i < count; ++i) {
    InvariantBump b = bump_template(m);
    b.u0 = 2 * kPi * unit(rng);
    b.v0 = kPi * unit(rng);
    b.z0 = b.z_period * unit(rng);
    b.ku = 1 + 3 * unit(rng);
    b.kv = 1 + 3 * unit(rng);
    b.kz = 1 + 3 * unit(rng);
    out.push_back(std::move(b));
  }
  return out;
}

/// Throws InputError unless phi(g p) = phi(p) for the generators g on a
/// fixed set of sample points.
inline void check_deck_invariance(const TestFunction& phi, const ManifoldSpec& m, double tol = 1e-9) {
  const DeckGroup g = deck_group(m);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-2 * kPi, 2 * kPi);
  for (int k = 0; k < 32; ++k) {
    const ChartPoint p{U(rng), U(rng), U(rng)};
    const double f0 = phi(p);
    for (const auto& s : g.generators)
      for (const auto& e : {s, inverse(s)}) {
        const double f1 = phi(e(p));
        if (std::abs(f1 - f0) > tol * (1 + std::abs(f0)))
          throw InputError("test function is not invariant under the deck group");
      }
  }
}

struct PushforwardOptions {
  int n_a = 12;      // Gauss nodes per a-subinterval
  int n_theta = 24;  // trapezoid
  int n_phi = 12;    // trapezoid
  int n_t = 20;      // Gauss nodes along each arc
  int n_u = 64;      // volume side: trapezoid in u
  int n_v = 24;      // Gauss nodes per half band
  int n_z = 16;      // trapezoid in z
  bool check_invariance = true;
};

struct PushforwardPair {
  /// <mu, phi_bar> with phi_bar(gamma) = integral of phi along gamma.
  double pushforward = 0.0;
  /// integral of phi dg over a fundamental domain.
  double volume_integral = 0.0;
  double relative_error = 0.0;
  /// Same comparison with the measure normalised to mass 1 and dg weighted
  /// by Sys/Vol, Sys being the family length pi.
  double normalized_pushforward = 0.0;
  double normalized_volume = 0.0;
};

/// Both sides of *mu = dg tested against phi.
///
/// Left side: the families are parametrised by (a, theta, phi) in
/// [-pi/4, pi/4] x [0, pi) x [0, L). The a-integral is split at pi/8; the
/// outer part uses q = sqrt(cos 2a), in which h da is a bounded weight.
/// Right side: u in [0, 2 pi), v in [0, pi/2] (split at the corner) and
/// z in [0, L) form a fundamental domain.
inline PushforwardPair pushforward_pair(const TestFunction& phi, const ManifoldSpec& m,
                                        const BandDensity& dens = BandDensity::paper(),
                                        const PushforwardOptions& o = {}) {
  if (!carries_band_families(m)) throw InputError("pushforward_pair: needs K x S^1 or a Bieberbach type with g0");
  if (o.check_invariance) check_deck_invariance(phi, m);
  const MetricSpec spec = m.metric();
  if (spec.scale != 1.0) throw InputError("pushforward_pair: the families are parametrised at unit scale");
  const double L = family_height(m);

  // Nodes (|a|, weight) of the a-integral over [0, pi/4].
  std::vector<std::pair<double, double>> anodes;
  const auto gl = quad::gauss_legendre(o.n_a);
  const double split = kPi / 8, qs = std::sqrt(std::cos(2 * split));
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double a = split * (gl.nodes[i] + 1) / 2;
    anodes.push_back({a, split / 2 * gl.weights[i] * dens(a)});
    const double q = qs * (gl.nodes[i] + 1) / 2;
    anodes.push_back({turning_latitude_of_q(q), qs / 2 * gl.weights[i] * dens.q_weight(q)});
  }
  const auto glt = quad::gauss_legendre(o.n_t);

  double lhs = 0;
  for (int fam = 0; fam < 2; ++fam)
    for (const auto& [a_abs, wa] : anodes)
      for (double sgn : {1.0, -1.0})
        for (int j = 0; j < o.n_theta; ++j)
          for (int k = 0; k < o.n_phi; ++k) {
            const double a = sgn * a_abs, th = kPi * j / o.n_theta, ph = L * k / o.n_phi;
            const GeodesicArc arc = fam == 0 ? band_geodesic(a, th, ph) : mirrored_band_geodesic(a, th, ph);
            double line = 0;
            for (std::size_t i = 0; i < glt.nodes.size(); ++i) {
              const double t = kHalfPi * glt.nodes[i];
              const ChartPoint p = arc.at(t);
              const ChartPoint dp = arc.band_velocity(t);
              const double w = spec.profile(p.v);
              line += kHalfPi * glt.weights[i] * phi(p) * std::sqrt(w * w * dp.u * dp.u + dp.v * dp.v);
            }
            lhs += wa * (kPi / o.n_theta) * (L / o.n_phi) * line;
          }

  const auto glv = quad::gauss_legendre(o.n_v);
  double rhs = 0;
  for (int half = 0; half < 2; ++half)
    for (std::size_t jv = 0; jv < glv.nodes.size(); ++jv) {
      const double v = kQuarterPi * (half + (glv.nodes[jv] + 1) / 2);
      const double wv = kQuarterPi / 2 * glv.weights[jv] * spec.profile(v);
      for (int iu = 0; iu < o.n_u; ++iu)
        for (int iz = 0; iz < o.n_z; ++iz) {
          const ChartPoint p{2 * kPi * iu / o.n_u, v, L * iz / o.n_z};
          rhs += wv * (2 * kPi / o.n_u) * (L / o.n_z) * phi(p);
        }
    }

  PushforwardPair r;
  r.pushforward = lhs;
  r.volume_integral = rhs;
  r.relative_error = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
  r.normalized_pushforward = lhs / measure_mass(m, dens);
  r.normalized_volume = rhs * kPi / volume(m);
  return r;
}

}  // namespace systolic
