#pragma once

#include "systolic/errors.hpp"
#include "systolic/manifold.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace systolic {

/// Validated run configuration. Every key is optional except `command` and,
/// for manifold commands, `topology`.
struct RunConfig {
  std::string command;
  std::optional<Topology> topology;
  std::optional<Geometry> geometry;

  // Moduli.
  std::optional<double> a, b, alpha, d, L, scale;
  std::optional<Vector3> e1, e2, e3;
  std::optional<double> u_period, v_period, z_period;

  std::uint64_t seed = 0;
  std::size_t budget = 10'000;
  double perturb_density = 1.0;
  bool uniform_density = false;
  int bumps = 20;
  int samples = 6;
  double epsilon = 0.01;
  int grid = 64;
  int grid_z = 1;
  int n_a = 64;
  int n_theta = 128;

  // trace-geodesic: band amplitude a (reusing key `a`), or a start point and heading.
  std::optional<double> theta, phi, u, v, z, heading;
  double length = kPi;
  double spacing = 0.01;

  std::string output;
  std::string csv;

  /// Keys as given, for the report.
  std::map<std::string, std::string> given;
};

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{
      "command", "topology", "geometry", "a", "b", "alpha", "d", "L", "scale", "e1", "e2", "e3",
      "u_period", "v_period", "z_period", "seed", "budget", "perturb_density", "uniform_density", "bumps",
      "samples", "epsilon", "grid", "grid_z", "n_a", "n_theta", "theta", "phi", "u", "v", "z",
      "heading", "length", "spacing", "output", "csv"};
  return keys;
}

inline const std::set<std::string>& known_commands() {
  static const std::set<std::string> c{"systole", "ratio", "flat-optimum", "trace-geodesic",
                                       "verify-extremality", "coverage"};
  return c;
}

namespace detail {

inline double parse_number(const std::string& s, const std::string& where) {
  double x = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e || !std::isfinite(x))
    throw InputError("malformed number '" + s + "' for " + where);
  return x;
}

inline long long parse_integer(const std::string& s, const std::string& where) {
  long long x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) throw InputError("malformed integer '" + s + "' for " + where);
  return x;
}

inline Vector3 parse_vector(const std::string& s, const std::string& where) {
  Vector3 out{0, 0, 0};
  std::stringstream ss(s);
  std::string part;
  int n = 0;
  while (std::getline(ss, part, ',')) {
    if (n == 3) throw InputError("vector for " + where + " has more than 3 components");
    out[n++] = parse_number(part, where);
  }
  if (n < 2) throw InputError("vector for " + where + " needs 2 or 3 comma-separated components");
  return out;
}

inline bool parse_bool(const std::string& s, const std::string& where) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InputError("malformed boolean '" + s + "' for " + where);
}

}  // namespace detail

/// Apply one key=value setting; `where` names its origin for diagnostics.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value, const std::string& where) {
  using namespace detail;
  const std::string at = "'" + key + "' (" + where + ")";
  if (!known_config_keys().count(key)) throw InputError("unknown key '" + key + "' (" + where + ")");
  auto positive = [&](double x) {
    if (!(x > 0)) throw InputError("value of " + at + " must be positive");
    return x;
  };
  auto count = [&](long long x, long long lo) {
    if (x < lo) throw InputError("value of " + at + " must be at least " + std::to_string(lo));
    return static_cast<int>(x);
  };
  c.given[key] = value;
  if (key == "command") {
    if (!known_commands().count(value)) throw InputError("unknown command '" + value + "' (" + where + ")");
    c.command = value;
  } else if (key == "topology") {
    c.topology = parse_topology(value);
    if (!c.topology) throw InputError("unknown topology '" + value + "' (" + where + ")");
  } else if (key == "geometry") {
    if (value == "flat") c.geometry = Geometry::flat;
    else if (value == "singular") c.geometry = Geometry::singular;
    else throw InputError("geometry must be flat or singular (" + where + ")");
  } else if (key == "a") c.a = parse_number(value, at);
  else if (key == "b") c.b = positive(parse_number(value, at));
  else if (key == "alpha") c.alpha = parse_number(value, at);
  else if (key == "d") c.d = positive(parse_number(value, at));
  else if (key == "L") c.L = positive(parse_number(value, at));
  else if (key == "scale") c.scale = positive(parse_number(value, at));
  else if (key == "e1") c.e1 = parse_vector(value, at);
  else if (key == "e2") c.e2 = parse_vector(value, at);
  else if (key == "e3") c.e3 = parse_vector(value, at);
  else if (key == "u_period") c.u_period = positive(parse_number(value, at));
  else if (key == "v_period") c.v_period = positive(parse_number(value, at));
  else if (key == "z_period") c.z_period = positive(parse_number(value, at));
  else if (key == "seed") {
    const long long s = parse_integer(value, at);
    if (s < 0) throw InputError("value of " + at + " must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "budget") c.budget = static_cast<std::size_t>(count(parse_integer(value, at), 1));
  else if (key == "perturb_density") c.perturb_density = positive(parse_number(value, at));
  else if (key == "uniform_density") c.uniform_density = parse_bool(value, at);
  else if (key == "bumps") c.bumps = count(parse_integer(value, at), 0);
  else if (key == "samples") c.samples = count(parse_integer(value, at), 1);
  else if (key == "epsilon") c.epsilon = positive(parse_number(value, at));
  else if (key == "grid") c.grid = count(parse_integer(value, at), 1);
  else if (key == "grid_z") c.grid_z = count(parse_integer(value, at), 1);
  else if (key == "n_a") c.n_a = count(parse_integer(value, at), 1);
  else if (key == "n_theta") c.n_theta = count(parse_integer(value, at), 1);
  else if (key == "theta") c.theta = parse_number(value, at);
  else if (key == "phi") c.phi = parse_number(value, at);
  else if (key == "u") c.u = parse_number(value, at);
  else if (key == "v") c.v = parse_number(value, at);
  else if (key == "z") c.z = parse_number(value, at);
  else if (key == "heading") c.heading = parse_number(value, at);
  else if (key == "length") c.length = positive(parse_number(value, at));
  else if (key == "spacing") c.spacing = positive(parse_number(value, at));
  else if (key == "output") c.output = value;
  else if (key == "csv") c.csv = value;
}

/// One key=value token.
inline void apply_token(RunConfig& c, const std::string& token, const std::string& where) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InputError("expected key=value, got '" + token + "' (" + where + ")");
  apply_setting(c, token.substr(0, eq), token.substr(eq + 1), where);
}

/// Line-oriented key=value text; '#' starts a comment, several
/// whitespace-separated settings may share a line.
inline void apply_config_text(RunConfig& c, const std::string& text, const std::string& source = "config") {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) apply_token(c, tok, source + " line " + std::to_string(lineno));
  }
}

/// Keys that must be present for the configured command.
inline std::vector<std::string> missing_keys(const RunConfig& c) {
  std::vector<std::string> out;
  if (c.command.empty()) out.push_back("command");
  if (c.command != "trace-geodesic" && !c.topology) out.push_back("topology");
  return out;
}

inline void require_complete(const RunConfig& c) {
  const auto miss = missing_keys(c);
  if (miss.empty()) return;
  std::string s;
  for (const auto& k : miss) s += (s.empty() ? "" : ", ") + k;
  throw InputError("missing required keys: " + s);
}

/// Parses config text. Empty input is an error naming the required keys;
/// otherwise missing keys may still be supplied by flags, see require_complete.
inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  apply_config_text(c, text);
  if (c.given.empty()) require_complete(c);
  return c;
}

/// Build the manifold described by the configuration. Default geometry is
/// flat for tori and singular otherwise.
inline ManifoldSpec build_manifold(const RunConfig& c) {
  if (!c.topology) throw InputError("missing required keys: topology");
  const Topology t = *c.topology;
  const bool torus = t == Topology::torus2 || t == Topology::torus3;
  const Geometry g = c.geometry.value_or(torus ? Geometry::flat : Geometry::singular);
  auto forbid = [&](bool given, const char* key, const char* why) {
    if (given) throw InputError(std::string("key '") + key + "' not allowed: " + why);
  };
  std::optional<ManifoldSpec> m;
  if (torus) {
    if (g == Geometry::flat) {
      forbid(c.u_period || c.v_period || c.z_period, "u_period/v_period/z_period", "flat tori take e1, e2, e3");
      std::vector<Vector3> basis{c.e1.value_or(Vector3{1, 0, 0}), c.e2.value_or(Vector3{0, 1, 0})};
      if (t == Topology::torus3) basis.push_back(c.e3.value_or(Vector3{0, 0, 1}));
      else forbid(c.e3.has_value(), "e3", "Torus2 has two periods");
      m = ManifoldSpec::flat_torus(basis);
    } else {
      forbid(c.e1 || c.e2 || c.e3, "e1/e2/e3", "singular tori take u_period, v_period, z_period");
      std::optional<double> zp;
      if (t == Topology::torus3) zp = c.z_period.value_or(kPi);
      else forbid(c.z_period.has_value(), "z_period", "Torus2 has two periods");
      m = ManifoldSpec::singular_torus(c.u_period.value_or(2 * kPi), c.v_period.value_or(kPi), zp);
    }
  } else {
    forbid(c.e1 || c.e2 || c.e3 || c.u_period || c.v_period || c.z_period, "e1/e2/e3/periods",
           "only tori take lattice periods");
    if (g == Geometry::singular) {
      forbid(c.a || c.b, "a/b", "the singular Klein bottle has a/2 = pi, b = pi");
      if (is_bieberbach(t)) {
        if (c.alpha || c.d)
          throw InputError(std::string("singular ") + to_string(t) +
                           " parameters are fixed by the construction (alpha, d may not be given)");
        forbid(c.L.has_value(), "L", "Bieberbach types have no circle factor");
      }
    }
    const double a = c.a.value_or(2 * kPi), b = c.b.value_or(kPi);
    if (g == Geometry::flat && !(a > 0)) throw InputError("value of 'a' must be positive");
    switch (t) {
      case Topology::klein2:
        forbid(c.L || c.alpha || c.d, "L/alpha/d", "Klein2 has moduli a, b only");
        m = g == Geometry::singular ? ManifoldSpec::singular_klein() : ManifoldSpec::flat_klein(a, b);
        break;
      case Topology::klein_cross_circle:
        forbid(c.alpha || c.d, "alpha/d", "KleinCrossCircle has moduli a, b, L");
        m = ManifoldSpec::klein_cross_circle(c.L.value_or(kPi), g, a, b);
        break;
      default:
        if (g == Geometry::singular) {
          m = ManifoldSpec::singular_bieberbach(t);
        } else {
          forbid(c.L.has_value(), "L", "Bieberbach types have no circle factor");
          m = ManifoldSpec::flat_bieberbach(t, a, b, c.alpha.value_or(0.0), c.d.value_or(kPi));
        }
    }
  }
  if (c.scale) m = m->scaled(*c.scale);
  return *m;
}

}  // namespace systolic
