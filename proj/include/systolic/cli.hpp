#pragma once

#include "systolic/certificate.hpp"
#include "systolic/config.hpp"
#include "systolic/coverage.hpp"
#include "systolic/errors.hpp"
#include "systolic/flat_optimum.hpp"
#include "systolic/geodesic.hpp"
#include "systolic/integrator.hpp"
#include "systolic/metric.hpp"
#include "systolic/report.hpp"
#include "systolic/systole.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

namespace systolic {

enum ExitCode : int { kExitOk = 0, kExitFailedChecks = 1, kExitInputError = 2 };

namespace detail {

struct Report {
  Json results = Json::object();
  Json checks = Json::array();
  Json tolerances = Json::object();
  bool pass = true;

  void check(const std::string& name, double expected, double computed, double tol, bool ok) {
    checks.push_back(check_json(name, expected, computed, tol, ok));
    pass = pass && ok;
  }
};

inline Json family_json(const FamilyReport& f) {
  return Json{{"name", f.family.name},
              {"asserted", f.family.asserted},
              {"closing", to_json(f.family.closing)},
              {"expected_length", f.family.expected_length},
              {"samples", f.samples.size()},
              {"min_length", f.min_length},
              {"max_length", f.max_length},
              {"max_deviation", f.max_deviation},
              {"max_closure_error", f.max_closure_error}};
}

inline Json systole_json(const SystoleResult& s) {
  return Json{{"systole", s.value},
              {"witness", to_json(s.witness)},
              {"base_point", to_json(s.base_point)},
              {"bound", s.bound},
              {"certified", s.certified},
              {"accuracy", s.accuracy},
              {"elements_evaluated", s.evaluated}};
}

inline void run_systole(const ManifoldSpec& m, const RunConfig& c, Report& r) {
  const SystoleResult s = systole(m);
  r.results = systole_json(s);
  r.check("systole certified", 1, s.certified ? 1 : 0, 0, s.certified);
  const double tol = 1e-8;
  r.tolerances["family_length"] = tol;
  r.tolerances["family_samples"] = c.samples;
  Json fams = Json::array();
  for (const auto& fam : systolic_families(m)) {
    const FamilyReport fr = verify_systolic_family(m, fam, c.samples, s.value);
    fams.push_back(family_json(fr));
    if (!fam.asserted) continue;
    const double worst = std::max(std::abs(fr.max_length - s.value), std::abs(fr.min_length - s.value));
    r.check("family length = Sys: " + fam.name, s.value, worst <= tol ? s.value : fr.max_length, tol, worst <= tol);
  }
  r.results["families"] = fams;
}

inline void run_ratio(const ManifoldSpec& m, Report& r) {
  const SystoleResult s = systole(m);
  const double vol = volume(m);
  r.results = Json{{"systole", s.value},
                   {"volume", vol},
                   {"dimension", m.dimension()},
                   {"systolic_ratio", std::pow(s.value, m.dimension()) / vol},
                   {"certified", s.certified}};
  r.check("systole certified", 1, s.certified ? 1 : 0, 0, s.certified);
}

inline void run_flat_optimum(const RunConfig& c, Report& r) {
  const Topology t = *c.topology;
  FlatOptimumOptions o;
  o.budget = c.budget;
  o.seed = c.seed;
  const FlatOptimumResult f = flat_ratio_optimum(t, o);
  Json moduli = Json::object();
  if (!f.moduli.lattice.empty()) {
    Json basis = Json::array();
    for (const auto& e : f.moduli.lattice) basis.push_back({e[0], e[1], e[2]});
    moduli["lattice"] = basis;
  } else {
    moduli = Json{{"a", f.moduli.a}, {"b", f.moduli.b}, {"alpha", f.moduli.alpha}, {"d", f.moduli.d}};
    if (t == Topology::klein_cross_circle) moduli["L"] = f.moduli.circle_length;
  }
  r.results = Json{{"topology", to_string(t)},
                   {"flat_optimum_ratio", f.ratio},
                   {"parameters", f.parameters},
                   {"moduli", moduli},
                   {"evaluations", f.evaluations},
                   {"budget", c.budget},
                   {"certified", f.certified}};
  r.tolerances["budget"] = c.budget;
  if (is_bieberbach(t)) {
    const double sing = systolic_ratio(ManifoldSpec::singular_bieberbach(t));
    r.results["singular_ratio"] = sing;
    r.results["margin"] = sing - f.ratio;
    r.check("flat optimum < singular ratio", sing, f.ratio, 0, f.ratio < sing);
  }
}

/// Manifold of a trace-geodesic run, where key `a` is the band amplitude.
inline std::optional<ManifoldSpec> trace_manifold(const RunConfig& c) {
  if (!c.topology) return std::nullopt;
  RunConfig moduli = c;
  moduli.a.reset();
  return build_manifold(moduli);
}

inline void run_trace(const RunConfig& c, Report& r, GeodesicTrace& trace) {
  const auto m = trace_manifold(c);
  const MetricSpec spec = m ? m->metric() : MetricSpec{};
  IntegratorOptions io;
  io.sample_spacing = c.spacing;
  r.tolerances["abs_tol"] = io.abs_tol;
  r.tolerances["rel_tol"] = io.rel_tol;
  r.tolerances["sample_spacing"] = io.sample_spacing;
  const bool band_mode = c.a.has_value() || !(c.u || c.v || c.heading);
  if (band_mode) {
    if (c.u || c.v || c.heading) throw InputError("trace-geodesic: give either a (band amplitude) or u, v, heading");
    if (spec.scale != 1.0 || !spec.profile.is_singular())
      throw InputError("trace-geodesic: band geodesics live on the unit-scale singular metric");
    const double a = c.a.value_or(0.0), th = c.theta.value_or(0.0), ph = c.phi.value_or(0.0);
    const GeodesicArc arc = band_geodesic(a, th, ph);
    const ChartPoint start = arc.at(-kHalfPi);
    ChartPoint dir = arc.band_velocity(-kHalfPi);
    const double w = spec.profile(start.v);
    const double n = std::sqrt(w * w * dir.u * dir.u + dir.v * dir.v);
    dir = {dir.u / n, dir.v / n, 0.0};
    trace = integrate_geodesic(spec, start, dir, c.length, io);
    double dev = 0;
    for (const auto& p : trace.points)
      dev = std::max(dev, std::abs(p.v - std::atan(std::tan(a) * std::cos(p.u - th))));
    r.results = Json{{"mode", "band geodesic"}, {"a", a}, {"theta", th}, {"phi", ph}};
    r.results["closed_form_deviation"] = dev;
    r.check("closed form vs integrator sup deviation", 0, dev, 1e-6, dev <= 1e-6);
  } else {
    const ChartPoint start{c.u.value_or(0.0), c.v.value_or(0.0), c.z.value_or(0.0)};
    const ChartPoint dir = unit_direction(spec, start, c.heading.value_or(0.0));
    trace = integrate_geodesic(spec, start, dir, c.length, io);
    r.results = Json{{"mode", "initial value"}, {"start", to_json(start)}, {"heading", c.heading.value_or(0.0)}};
  }
  const double len = trace.cumulative_length.empty() ? 0.0 : trace.cumulative_length.back();
  const double drift_per_length = trace.clairaut_drift / std::max(c.length, 1.0);
  r.results["length"] = c.length;
  r.results["samples"] = trace.points.size();
  r.results["polyline_length"] = len;
  r.results["clairaut"] = trace.clairaut;
  r.results["clairaut_drift"] = trace.clairaut_drift;
  r.results["speed_drift"] = trace.speed_drift;
  r.results["corner_crossings"] = trace.crossings.size();
  Json cr = Json::array();
  for (const auto& p : trace.crossings) cr.push_back(to_json(p));
  r.results["crossings"] = cr;
  r.check("Clairaut drift per unit length", 0, drift_per_length, 1e-8, drift_per_length <= 1e-8);
}

inline void run_verify(const ManifoldSpec& m, const RunConfig& c, Report& r) {
  CertificateOptions o;
  if (c.uniform_density) o.density = BandDensity::mass_matched_uniform();
  else o.density = BandDensity::paper(c.perturb_density);
  o.bumps = c.bumps;
  o.seed = c.seed;
  o.family_samples = c.samples;
  const CertificateReport cert = extremality_certificate(m, o);
  r.results = Json{{"manifold", cert.manifold},
                   {"density", cert.density},
                   {"density_factor", o.density.factor()},
                   {"systole", cert.systole},
                   {"volume", cert.volume},
                   {"mass", cert.mass},
                   {"worst_pair_error", cert.worst_pair_error},
                   {"worst_normalized_pair_error", cert.worst_normalized_pair_error},
                   {"pass", cert.pass}};
  for (const auto& k : cert.checks) r.check(k.name, k.expected, k.computed, k.tolerance, k.pass);
  r.tolerances["family_length"] = o.family_tol;
  r.tolerances["mass_relative"] = o.mass_tol;
  r.tolerances["density"] = o.density_tol;
  r.tolerances["density_grid"] = o.density_grid;
  r.tolerances["pair_relative"] = o.pair_tol;
  r.tolerances["bumps"] = o.bumps;
  r.tolerances["quadrature"] = Json{{"n_a", o.quadrature.n_a},     {"n_theta", o.quadrature.n_theta},
                                    {"n_phi", o.quadrature.n_phi}, {"n_t", o.quadrature.n_t},
                                    {"n_u", o.quadrature.n_u},     {"n_v", o.quadrature.n_v},
                                    {"n_z", o.quadrature.n_z}};
}

inline void run_coverage(const ManifoldSpec& m, const RunConfig& c, Report& r) {
  CoverageOptions o;
  o.n_u = o.n_v = c.grid;
  o.n_z = c.grid_z;
  o.epsilon = c.epsilon;
  o.n_a = c.n_a;
  o.n_theta = c.n_theta;
  const CoverageResult cov = coverage_stats(m, o);
  Json hist = Json::object();
  for (const auto& [k, n] : cov.histogram) hist[std::to_string(k)] = n;
  r.results = Json{{"method", cov.method},
                   {"systole", cov.systole},
                   {"points", cov.points},
                   {"covered_fraction", cov.covered_fraction},
                   {"min_count", cov.min_count},
                   {"max_count", cov.max_count},
                   {"histogram", hist}};
  if (cov.generator_class_fraction) r.results["generator_class_fraction"] = *cov.generator_class_fraction;
  r.tolerances["epsilon"] = o.epsilon;
  r.tolerances["grid"] = Json{{"n_u", o.n_u}, {"n_v", o.n_v}, {"n_z", o.n_z}, {"n_a", o.n_a}, {"n_theta", o.n_theta}};
  r.tolerances["length_relative"] = o.length_tol;
  r.check("covered fraction", 1, cov.covered_fraction, 1e-3, cov.covered_fraction >= 1 - 1e-3);
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open output file '" + path + "'");
  f << text;
}

}  // namespace detail

/// Runs one command. The JSON report goes to `config.output` when set and
/// to `out` otherwise; trace-geodesic writes CSV to `config.csv` or `out`,
/// with JSON only on request. Diagnostics go to `err`.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    require_complete(config);
    detail::Report r;
    Json spec = Json::object();
    GeodesicTrace trace;
    const std::string& cmd = config.command;
    if (cmd == "flat-optimum") {
      spec = Json{{"topology", to_string(*config.topology)}, {"geometry", "flat"}};
      detail::run_flat_optimum(config, r);
    } else if (cmd == "trace-geodesic") {
      const auto m = detail::trace_manifold(config);
      spec = m ? to_json(*m) : Json{{"metric", "singular profile, dimension 3"}};
      detail::run_trace(config, r, trace);
    } else {
      const ManifoldSpec m = build_manifold(config);
      spec = to_json(m);
      if (cmd == "systole") detail::run_systole(m, config, r);
      else if (cmd == "ratio") detail::run_ratio(m, r);
      else if (cmd == "verify-extremality") detail::run_verify(m, config, r);
      else if (cmd == "coverage") detail::run_coverage(m, config, r);
    }
    Json given = Json::object();
    for (const auto& [k, v] : config.given)
      if (k != "output" && k != "csv") given[k] = v;
    spec["config"] = given;

    Json report{{"command", cmd},   {"spec", spec},         {"results", r.results},
                {"checks", r.checks}, {"tolerances", r.tolerances}, {"versions", versions_json()},
                {"seed", config.seed}};
    report["pass"] = r.pass;
    const std::string text = to_json_text(report);
    if (cmd == "trace-geodesic") {
      const std::string csv = trace_csv(trace);
      if (config.csv.empty()) out << csv;
      else detail::write_file(config.csv, csv);
      if (!config.output.empty()) detail::write_file(config.output, text);
    } else if (config.output.empty()) {
      out << text;
    } else {
      detail::write_file(config.output, text);
    }
    for (const auto& c : r.checks)
      if (!c["pass"].get<bool>()) err << "check failed: " << c["name"].get<std::string>() << "\n";
    return r.pass ? kExitOk : kExitFailedChecks;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const GeodesicError& e) {
    err << "geodesic error at (u, v) = (" << e.u() << ", " << e.v() << "): " << e.what() << "\n";
    return kExitFailedChecks;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitFailedChecks;
  }
}

}  // namespace systolic
