// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "systolic/systolic.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace systolic;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s [%.1fs] %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ManifoldSpec> band_carriers() {
  return {ManifoldSpec::klein_cross_circle(kPi, Geometry::singular), ManifoldSpec::singular_bieberbach(Topology::b1),
          ManifoldSpec::singular_bieberbach(Topology::b2), ManifoldSpec::singular_bieberbach(Topology::b3),
          ManifoldSpec::singular_bieberbach(Topology::b4)};
}

int certificate_exit_code(const std::string& extra) {
  std::ostringstream out, err;
  return run(parse_config("command=verify-extremality topology=B3 " + extra), out, err);
}

}  // namespace

int main() {
  criterion(1, "Abel identity on 512 latitudes", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0, worst_oracle = 0;
    for (int i = 0; i < 512; ++i) {
      const double v = -kQuarterPi + kHalfPi * (i + 0.5) / 512;
      worst = std::max(worst, std::abs(abel_lhs(v) - 0.5));
      if (i % 32 == 0)
        worst_oracle = std::max(worst_oracle, std::abs(oracle::abel_lhs(v, [](double a) { return oracle::h(a); }) - 0.5));
    }
    const double secs = seconds_since(t0);
    o.require(worst <= 1e-6, "max |lhs - 1/2| = " + num(worst) + " <= 1e-6");
    o.require(worst_oracle <= 1e-6, "independent quadrature " + num(worst_oracle));
    o.require(secs < 10, "runtime " + num(secs) + " s < 10 s");
  });

  criterion(2, "pushforward uniformity", [](Outcome& o) {
    double worst = 0;
    for (int i = 0; i < 1024; ++i) worst = std::max(worst, std::abs(pushforward_density(kPi * i / 1024) - 1));
    o.require(worst <= 1e-5, "density 1024-grid max |rho - 1| = " + num(worst) + " <= 1e-5");
    for (const auto& m : band_carriers()) {
      double err = 0;
      for (const auto& b : random_bumps(m, 20, 0)) err = std::max(err, pushforward_pair(b, m).relative_error);
      o.require(err <= 1e-3, m.name() + " worst pair error " + num(err) + " <= 1e-3");
    }
  });

  criterion(3, "mass = Vol/Sys", [](Outcome& o) {
    for (const auto& m : band_carriers()) {
      // Closed forms: Vol = 2 sqrt 2 pi H over the family height H, Sys = pi.
      const double H = m.z_extent();
      const double closed = 2 * std::sqrt(2.0) * kPi * H / kPi;
      const double mass = measure_mass(m);
      const double err = std::abs(mass - closed) / closed;
      const double err_num = std::abs(mass - volume(m) / systole(m).value) / closed;
      o.require(err <= 1e-9 && err_num <= 1e-9, m.name() + " rel " + num(std::max(err, err_num)));
    }
  });

  criterion(4, "systoles", [](Outcome& o) {
    const ManifoldSpec k = ManifoldSpec::singular_klein();
    const SystoleResult s = systole(k);
    o.require(std::abs(s.value - kPi) <= 1e-2, "Sys(K) = " + num(s.value));
    o.require(s.certified, "certified");
    // Witness class: a glide by pi about a latitude where psi = 1; the band
    // geodesics moved to that latitude close up under it with length Sys.
    const SignedAffineIsometry& w = s.witness;
    const double vc = w.shift[1] / 2;
    o.require(w.sign[0] == 1 && w.sign[1] == -1 && std::abs(std::abs(w.shift[0]) - kPi) <= 1e-12 &&
                  std::abs(std::remainder(vc, kHalfPi)) <= 1e-12,
              "witness is a glide by pi about v = " + num(vc));
    double closure = 0, length = 0;
    for (int i = 0; i <= 10; ++i) {
      const double a = -kQuarterPi + kHalfPi * i / 10;
      const GeodesicArc arc = band_geodesic(a, 0.7, 0.0);
      ChartPoint p = arc.at(arc.t_begin()), q = arc.at(arc.t_end());
      p.v += vc;
      q.v += vc;
      const ChartPoint wp = w(w.shift[0] > 0 ? p : q), target = w.shift[0] > 0 ? q : p;
      closure = std::max(closure, std::hypot(wp.u - target.u, wp.v - target.v));
      length = std::max(length, std::abs(curve_length(k.metric(), arc) - s.value));
    }
    o.require(closure <= 1e-10 && length <= 1e-10,
              "band geodesics: closure " + num(closure) + ", |length - Sys| " + num(length));
    const ChartPoint p = s.base_point, q = w(p);
    const DistanceResult fm = fast_marching_refined(k.metric().profile, p, q);
    o.require(std::abs(fm.value - kPi) <= 1e-2, "fast marching " + num(fm.value));
    const double unit = systole(ManifoldSpec::flat_torus({{1, 0, 0}, {0, 1, 0}})).value;
    o.require(unit == 1.0, "Sys(unit torus) = " + num(unit));
  });

  criterion(5, "systolic ratios", [](Outcome& o) {
    const double rk = systolic_ratio(ManifoldSpec::singular_klein());
    o.require(std::abs(rk - kPi / (2 * std::sqrt(2.0))) <= 1e-9, "K ratio " + num(rk - kPi / (2 * std::sqrt(2.0))));
    const FlatOptimumResult t2 = flat_ratio_optimum(Topology::torus2, {});
    o.require(std::abs(t2.ratio - 2 / std::sqrt(3.0)) <= 1e-4, "T2 optimum - 2/sqrt 3 = " + num(t2.ratio - 2 / std::sqrt(3.0)));
    const FlatOptimumResult t3 = flat_ratio_optimum(Topology::torus3, {});
    o.require(std::abs(t3.ratio - std::sqrt(2.0)) <= 1e-3, "T3 optimum - sqrt 2 = " + num(t3.ratio - std::sqrt(2.0)));
    // FCC: twelve shortest vectors.
    const auto& L = t3.moduli.lattice;
    const ManifoldSpec m = ManifoldSpec::flat_torus(L);
    const double sys = systole(m).value;
    int shortest = 0;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j)
        for (int l = -2; l <= 2; ++l) {
          if (!i && !j && !l) continue;
          double x[3];
          for (int c = 0; c < 3; ++c) x[c] = i * L[0][c] + j * L[1][c] + l * L[2][c];
          if (std::abs(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / sys - 1) <= 1e-2) ++shortest;
        }
    o.require(shortest == 12, "shortest vectors at the optimum: " + std::to_string(shortest));
  });

  criterion(6, "B1 identities", [](Outcome& o) {
    const ManifoldSpec m = ManifoldSpec::singular_bieberbach(Topology::b1);
    const Moduli& mo = m.moduli();
    const double alpha = kPi * (2 - std::sqrt(2.0)), d = kPi * std::sqrt(2 * std::sqrt(2.0) - 2);
    o.require(std::abs(mo.alpha - alpha) <= 1e-15 && std::abs(mo.d - d) <= 1e-15,
              "configured parameters within 1e-15 of the closed forms");
    const double e1 = std::abs(std::sqrt((kPi - alpha) * (kPi - alpha) + d * d) - kPi);
    const double e2 = std::abs(std::sqrt(alpha * alpha / 2 + d * d) - kPi);
    o.require(e1 <= 1e-12, "|sqrt((pi-a)^2+d^2) - pi| = " + num(e1));
    o.require(e2 <= 1e-12, "|sqrt(a^2/2+d^2) - pi| = " + num(e2));
  });

  criterion(7, "B2 parameters", [](Outcome& o) {
    const B2Parameters p = solve_b2_params();
    const B2Residuals r = b2_residuals(p);
    o.require(std::abs(r.twist) <= 1e-10 && std::abs(r.closing) <= 1e-10,
              "residuals " + num(r.twist) + ", " + num(r.closing));
    const double disp = b2_displacement(p.alpha);
    const double closing = std::abs(disp * disp + p.d * p.d - kPi * kPi);
    o.require(closing <= 1e-6, "disp^2 + d^2 - pi^2 = " + num(closing));
    o.require(std::abs(disp - oracle::b2_displacement(p.alpha)) <= 1e-12, "formula");
    // Scan of surface distances from (0, v) to its image under r_alpha o T.
    const MetricSpec surf{LatitudeProfile::singular(), 2, 1.0};
    double best = INFINITY;
    for (int j = 0; j < 2000; ++j) {
      const double v = kHalfPi * j / 2000;
      best = std::min(best, surface_distance({0, v, 0}, {p.alpha, v + kHalfPi, 0}, surf).value);
    }
    o.require(std::abs(best - disp) <= 1e-3, "surface_distance scan " + num(best - disp));
    const double cover = cover_displacement(compose(klein_r(p.alpha), klein_t(Moduli{})), surf).value;
    o.require(std::abs(cover - disp) <= 1e-3, "cover displacement " + num(cover - disp));
  });

  criterion(8, "singular Bi beat flat Bi", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    for (Topology t : {Topology::b1, Topology::b2, Topology::b3, Topology::b4}) {
      FlatOptimumOptions fo;
      fo.budget = 10'000;
      const FlatOptimumResult f = flat_ratio_optimum(t, fo);
      const double s = systolic_ratio(ManifoldSpec::singular_bieberbach(t));
      o.require(f.ratio < s, std::string(to_string(t)) + " flat " + num(f.ratio) + " < " + num(s) + ", margin " +
                                 num(s - f.ratio));
    }
    const double secs = seconds_since(t0);
    o.require(secs < 300, "runtime " + num(secs) + " s < 300 s");
  });

  criterion(9, "geodesic engine", [](Outcome& o) {
    const MetricSpec spec{LatitudeProfile::singular(), 3, 1.0};
    double dev = 0;
    for (int i = 1; i <= 15; ++i) {
      const double a = (kQuarterPi - 0.01) * i / 15;
      const GeodesicArc arc = band_geodesic(a, 0.0, 0.0);
      const ChartPoint d = arc.band_velocity(-kHalfPi);
      const double n = std::hypot(d.u, d.v);
      const GeodesicTrace tr = integrate_geodesic(spec, {-kHalfPi, 0, 0}, {d.u / n, d.v / n, 0}, kPi);
      for (const auto& p : tr.points) dev = std::max(dev, std::abs(p.v - std::atan(std::tan(a) * std::cos(p.u))));
    }
    o.require(dev <= 1e-6, "band sup deviation " + num(dev));
    double drift = 0;
    std::size_t crossings = 0;
    for (int k = 0; k < 16; ++k) {
      const ChartPoint start{0.0, -0.7 + 1.4 * k / 15, 0.2};
      const double L = 15.0;
      const GeodesicTrace tr = integrate_geodesic(spec, start, unit_direction(spec, start, 0.3 + 0.05 * k, 0.1), L);
      drift = std::max(drift, tr.clairaut_drift / L);
      crossings += tr.crossings.size();
    }
    o.require(crossings > 0, std::to_string(crossings) + " corner crossings");
    o.require(drift <= 1e-8, "Clairaut drift per length " + num(drift));
  });

  criterion(10, "negative controls", [](Outcome& o) {
    const ManifoldSpec m = ManifoldSpec::singular_bieberbach(Topology::b3);
    auto check = [](const CertificateReport& r, const std::string& prefix) {
      for (const auto& c : r.checks)
        if (c.name.rfind(prefix, 0) == 0) return c.pass;
      return true;
    };
    CertificateOptions scaled;
    scaled.density = BandDensity::paper(1.1);
    const CertificateReport a = extremality_certificate(m, scaled);
    o.require(!check(a, "mass") && !a.pass, "1.1 h fails the mass check");
    CertificateOptions uni;
    uni.density = BandDensity::mass_matched_uniform();
    const CertificateReport b = extremality_certificate(m, uni);
    o.require(!check(b, "pushforward density") && !b.pass, "uniform density fails uniformity");
    const int c1 = certificate_exit_code("perturb_density=1.1"), c2 = certificate_exit_code("uniform_density=true");
    o.require(c1 == 1 && c2 == 1, "exit codes " + std::to_string(c1) + ", " + std::to_string(c2));
    o.require(certificate_exit_code("") == 0, "unperturbed certificate exits 0");
  });

  criterion(11, "coverage", [](Outcome& o) {
    CoverageOptions c;
    c.epsilon = 0.01;
    const CoverageResult k = coverage_stats(ManifoldSpec::singular_klein(), c);
    o.require(k.covered_fraction >= 0.999, "K covered fraction " + num(k.covered_fraction));
    const double s = 1 / std::sqrt(2.0);
    CoverageOptions f;
    f.n_u = f.n_v = f.n_z = 6;
    const CoverageResult fcc = coverage_stats(ManifoldSpec::flat_torus({{s, s, 0}, {s, 0, s}, {0, s, s}}), f);
    o.require(fcc.min_count == 6 && fcc.max_count == 6,
              "FCC per-point count " + std::to_string(fcc.min_count) + ".." + std::to_string(fcc.max_count));
  });

  std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
