#pragma once

#include "systolic/density.hpp"
#include "systolic/errors.hpp"
#include "systolic/manifold.hpp"
#include "systolic/metric.hpp"
#include "systolic/pushforward.hpp"
#include "systolic/systole.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace systolic {

struct CertificateCheck {
  std::string name;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CertificateReport {
  std::string manifold;
  std::string density;
  double systole = 0.0;
  double volume = 0.0;
  double mass = 0.0;
  std::vector<CertificateCheck> checks;
  /// Worst pushforward-pair relative errors in both normalizations.
  double worst_pair_error = 0.0;
  double worst_normalized_pair_error = 0.0;
  bool pass = false;
};

struct CertificateOptions {
  BandDensity density = BandDensity::paper();
  int bumps = 20;
  std::uint64_t seed = 0;
  int density_grid = 1024;
  int family_samples = 6;
  double family_tol = 1e-8;
  double mass_tol = 1e-9;
  double density_tol = 1e-5;
  double pair_tol = 1e-3;
  PushforwardOptions quadrature;
};

/// Numerical certificate that the band-family measure pushes forward to dg:
/// (i) the asserted families have length Sys, (ii) the mass equals Vol/Sys,
/// (iii) the pushforward density is 1 on a latitude grid, (iv) the two
/// sides agree on seeded deck-invariant bumps. Failures are reported.
inline CertificateReport extremality_certificate(const ManifoldSpec& m, const CertificateOptions& o = {}) {
  if (!carries_band_families(m))
    throw InputError("extremality certificate applies to K x S^1 and B1..B4 with the singular metric");
  if (m.topology() == Topology::klein_cross_circle && m.moduli().circle_length < kPi)
    throw InputError("extremality certificate for K x S^1 needs a circle of length L >= pi");
  if (m.scale() != 1.0) throw InputError("extremality certificate is stated at unit scale");

  CertificateReport r;
  r.manifold = m.name();
  r.density = o.density.name();
  const SystoleResult sys = systole(m);
  r.systole = sys.value;
  r.volume = volume(m);
  auto add = [&r](std::string name, double expected, double computed, double tol, bool relative) {
    const double err = std::abs(computed - expected) / (relative ? std::max(std::abs(expected), 1e-300) : 1.0);
    r.checks.push_back({std::move(name), expected, computed, tol, err <= tol});
  };

  add("systole certified", 1.0, sys.certified ? 1.0 : 0.0, 0.0, false);
  for (const auto& fam : systolic_families(m)) {
    if (!fam.asserted) continue;
    const FamilyReport fr = verify_systolic_family(m, fam, o.family_samples, sys.value);
    double worst = 0.0;
    for (const auto& s : fr.samples) worst = std::max(worst, std::abs(s.length - sys.value));
    add("family length = Sys: " + fam.name, 0.0, worst, o.family_tol, false);
    add("family closes: " + fam.name, 0.0, fr.max_closure_error, 1e-10, false);
  }

  r.mass = measure_mass(m, o.density);
  add("mass = Vol/Sys", r.volume / sys.value, r.mass, o.mass_tol, true);

  double worst = 0.0;
  for (int i = 0; i < o.density_grid; ++i) {
    const double v = kPi * double(i) / o.density_grid;
    worst = std::max(worst, std::abs(pushforward_density(v, o.density) - 1.0));
  }
  add("pushforward density = 1 (max deviation)", 0.0, worst, o.density_tol, false);

  const auto bumps = random_bumps(m, o.bumps, o.seed);
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    const PushforwardPair p = pushforward_pair(bumps[i], m, o.density, o.quadrature);
    r.worst_pair_error = std::max(r.worst_pair_error, p.relative_error);
    r.worst_normalized_pair_error = std::max(
        r.worst_normalized_pair_error,
        std::abs(p.normalized_pushforward - p.normalized_volume) / std::abs(p.normalized_volume));
    add("pushforward pair, bump " + std::to_string(i), p.volume_integral, p.pushforward, o.pair_tol, true);
  }

  r.pass = true;
  for (const auto& c : r.checks) r.pass = r.pass && c.pass;
  return r;
}

}  // namespace systolic
