#pragma once

#include "systolic/b2_parameters.hpp"
#include "systolic/errors.hpp"
#include "systolic/isometry.hpp"
#include "systolic/profile.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace systolic {

enum class Topology { torus2, klein2, torus3, klein_cross_circle, b1, b2, b3, b4 };
enum class Geometry { flat, singular };

inline const char* to_string(Topology t) {
  switch (t) {
    case Topology::torus2: return "Torus2";
    case Topology::klein2: return "Klein2";
    case Topology::torus3: return "Torus3";
    case Topology::klein_cross_circle: return "KleinCrossCircle";
    case Topology::b1: return "B1";
    case Topology::b2: return "B2";
    case Topology::b3: return "B3";
    case Topology::b4: return "B4";
  }
  return "?";
}

inline const char* to_string(Geometry g) { return g == Geometry::flat ? "flat" : "singular"; }

inline std::optional<Topology> parse_topology(const std::string& s) {
  for (Topology t : {Topology::torus2, Topology::klein2, Topology::torus3,
                     Topology::klein_cross_circle, Topology::b1, Topology::b2, Topology::b3,
                     Topology::b4})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

inline bool is_bieberbach(Topology t) {
  return t == Topology::b1 || t == Topology::b2 || t == Topology::b3 || t == Topology::b4;
}

using Vector3 = std::array<double, 3>;

/// Moduli of the supported quotients.
///
/// Klein bottles are generated by the screw (u, v) -> (u + a/2, -v) and the
/// translation v -> v + b; the singular metric fixes a/2 = pi, b = pi. The
/// Bieberbach types suspend the Klein bottle by (p, z) -> (sigma(p), z + d)
/// with sigma = r_alpha, r_alpha o T, S1 or S2. Tori carry an explicit
/// translation basis.
struct Moduli {
  double a = 2 * kPi;
  double b = kPi;
  double alpha = 0.0;
  double d = kPi;
  double circle_length = kPi;
  std::vector<Vector3> lattice;
};

struct DeckGroup {
  std::string name;
  std::vector<SignedAffineIsometry> generators;
};

class ManifoldSpec {
 public:
  /// Flat torus R^n / lattice; n = 2 or 3 given by the basis size.
  static ManifoldSpec flat_torus(std::vector<Vector3> basis) {
    if (basis.size() != 2 && basis.size() != 3)
      throw InputError("flat torus needs a basis of 2 or 3 vectors");
    ManifoldSpec m(basis.size() == 2 ? Topology::torus2 : Topology::torus3, Geometry::flat);
    for (auto& e : basis) {
      if (basis.size() == 2) e[2] = 0.0;
      for (double x : e)
        if (!std::isfinite(x)) throw InputError("lattice entries must be finite");
    }
    m.moduli_.lattice = std::move(basis);
    if (!(std::abs(m.lattice_determinant()) > 1e-12))
      throw InputError("lattice basis is degenerate");
    return m;
  }

  /// Singular torus with axis-aligned periods; the v-period must be a
  /// multiple of pi/2 for the translations to be isometries.
  static ManifoldSpec singular_torus(double u_period, double v_period,
                                     std::optional<double> z_period = std::nullopt) {
    if (!(u_period > 0) || !(v_period > 0) || (z_period && !(*z_period > 0)))
      throw InputError("torus periods must be positive");
    if (!is_quarter_period_multiple(v_period))
      throw InputError("singular torus v-period must be a multiple of pi/2");
    ManifoldSpec m(z_period ? Topology::torus3 : Topology::torus2, Geometry::singular);
    m.moduli_.lattice = {{u_period, 0, 0}, {0, v_period, 0}};
    if (z_period) m.moduli_.lattice.push_back({0, 0, *z_period});
    return m;
  }

  static ManifoldSpec flat_klein(double a, double b) {
    ManifoldSpec m(Topology::klein2, Geometry::flat);
    m.set_klein(a, b);
    return m;
  }
  static ManifoldSpec singular_klein() { return ManifoldSpec(Topology::klein2, Geometry::singular); }

  static ManifoldSpec klein_cross_circle(double circle_length, Geometry g, double a = 2 * kPi,
                                         double b = kPi) {
    ManifoldSpec m(Topology::klein_cross_circle, g);
    if (g == Geometry::flat) m.set_klein(a, b);
    if (!(circle_length > 0) || !std::isfinite(circle_length))
      throw InputError("circle length L must be positive");
    m.moduli_.circle_length = circle_length;
    return m;
  }

  /// The metric g0 on B1..B4 with the parameters fixed by the construction.
  static ManifoldSpec singular_bieberbach(Topology t) {
    if (!is_bieberbach(t)) throw InputError("not a Bieberbach type B1..B4");
    ManifoldSpec m(t, Geometry::singular);
    switch (t) {
      case Topology::b1:
        m.moduli_.alpha = kPi * (2.0 - kSqrt2);
        m.moduli_.d = kPi * std::sqrt(2.0 * kSqrt2 - 2.0);
        break;
      case Topology::b2: {
        const B2Parameters p = solve_b2_params();
        m.moduli_.alpha = p.alpha;
        m.moduli_.d = p.d;
        break;
      }
      default:
        m.moduli_.alpha = 0.0;
        m.moduli_.d = kPi;
    }
    return m;
  }

  /// Flat Bieberbach manifold of type t. alpha is a real twist (meaningful
  /// modulo a/2 for B1 and B2, ignored by B3 and B4).
  static ManifoldSpec flat_bieberbach(Topology t, double a, double b, double alpha, double d) {
    if (!is_bieberbach(t)) throw InputError("not a Bieberbach type B1..B4");
    ManifoldSpec m(t, Geometry::flat);
    m.set_klein(a, b);
    if (!(d > 0) || !std::isfinite(d)) throw InputError("suspension height d must be positive");
    if (!std::isfinite(alpha)) throw InputError("twist alpha must be finite");
    m.moduli_.alpha = (t == Topology::b3 || t == Topology::b4) ? 0.0 : alpha;
    m.moduli_.d = d;
    return m;
  }

  Topology topology() const { return topology_; }
  Geometry geometry() const { return geometry_; }
  const Moduli& moduli() const { return moduli_; }
  int dimension() const {
    return (topology_ == Topology::torus2 || topology_ == Topology::klein2) ? 2 : 3;
  }
  double scale() const { return scale_; }

  /// Same quotient with the metric multiplied by c^2.
  ManifoldSpec scaled(double c) const {
    if (!(c > 0)) throw InputError("metric scale must be positive");
    ManifoldSpec m = *this;
    m.scale_ *= c;
    return m;
  }

  MetricSpec metric() const {
    return {geometry_ == Geometry::singular ? LatitudeProfile::singular() : LatitudeProfile::flat(),
            dimension(), scale_};
  }

  /// Height of one z-period of the fundamental domain (3-manifolds).
  double z_extent() const {
    switch (topology_) {
      case Topology::klein_cross_circle: return moduli_.circle_length;
      case Topology::b1:
      case Topology::b2:
      case Topology::b3:
      case Topology::b4: return moduli_.d;
      default: return 0.0;
    }
  }

  std::string name() const {
    return std::string(to_string(topology_)) + " (" + to_string(geometry_) + ")";
  }

  double lattice_determinant() const {
    const auto& L = moduli_.lattice;
    if (L.size() == 2) return L[0][0] * L[1][1] - L[0][1] * L[1][0];
    if (L.size() == 3)
      return L[0][0] * (L[1][1] * L[2][2] - L[1][2] * L[2][1]) -
             L[0][1] * (L[1][0] * L[2][2] - L[1][2] * L[2][0]) +
             L[0][2] * (L[1][0] * L[2][1] - L[1][1] * L[2][0]);
    return 0.0;
  }

  bool is_torus() const { return topology_ == Topology::torus2 || topology_ == Topology::torus3; }

 private:
  ManifoldSpec(Topology t, Geometry g) : topology_(t), geometry_(g) {}

  void set_klein(double a, double b) {
    if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b))
      throw InputError("Klein moduli a, b must be positive");
    moduli_.a = a;
    moduli_.b = b;
  }

  Topology topology_;
  Geometry geometry_;
  Moduli moduli_;
  double scale_ = 1.0;
};

/// Screw motion (u, v) -> (u + a/2, -v) of the Klein bottle.
inline SignedAffineIsometry klein_screw(const Moduli& m) {
  return SignedAffineIsometry::make(1, -1, 1, m.a / 2, 0.0);
}
/// Translation v -> v + b.
inline SignedAffineIsometry klein_translation(const Moduli& m) {
  return SignedAffineIsometry::translation(0.0, m.b);
}

/// Representatives of the Klein-bottle isometry classes.
/// S1: reflection in the vertical geodesic u = 0.
inline SignedAffineIsometry klein_s1() { return SignedAffineIsometry::make(-1, 1, 1, 0.0, 0.0); }
/// S2: point symmetry centred on the boundary latitude v = b/4.
inline SignedAffineIsometry klein_s2(const Moduli& m) {
  return SignedAffineIsometry::make(-1, -1, 1, 0.0, m.b / 2);
}
/// T: (u, v) -> (u, v + b/2), the reflection in the common boundary of the
/// two Moebius bands once passed to the quotient.
inline SignedAffineIsometry klein_t(const Moduli& m) {
  return SignedAffineIsometry::translation(0.0, m.b / 2);
}
/// r_alpha: horizontal translation.
inline SignedAffineIsometry klein_r(double alpha) {
  return SignedAffineIsometry::translation(alpha, 0.0);
}

/// Klein-bottle isometry suspended by a Bieberbach generator.
inline SignedAffineIsometry suspension_isometry(const ManifoldSpec& m) {
  const Moduli& mod = m.moduli();
  switch (m.topology()) {
    case Topology::b1: return klein_r(mod.alpha);
    case Topology::b2: return compose(klein_r(mod.alpha), klein_t(mod));
    case Topology::b3: return klein_s1();
    case Topology::b4: return klein_s2(mod);
    default: return SignedAffineIsometry::identity();
  }
}

/// Deck group of m acting on the chart. Generator order: tori list the
/// basis; Klein-based quotients list sigma, tau and then the z generator.
inline DeckGroup deck_group(const ManifoldSpec& m) {
  DeckGroup g{m.name(), {}};
  const Moduli& mod = m.moduli();
  if (m.is_torus()) {
    for (const auto& e : mod.lattice)
      g.generators.push_back(SignedAffineIsometry::translation(e[0], e[1], e[2]));
    return g;
  }
  g.generators.push_back(klein_screw(mod));
  g.generators.push_back(klein_translation(mod));
  if (m.topology() == Topology::klein_cross_circle) {
    g.generators.push_back(SignedAffineIsometry::translation(0, 0, mod.circle_length));
  } else if (is_bieberbach(m.topology())) {
    SignedAffineIsometry s = suspension_isometry(m);
    s.shift[2] = mod.d;
    g.generators.push_back(s);
  }
  return g;
}

}  // namespace systolic
