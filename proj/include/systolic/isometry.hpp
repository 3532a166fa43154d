#pragma once

#include "systolic/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

namespace systolic {

/// (u, v, z) -> (s_u u + t_u, s_v v + t_v, s_z z + t_z) with signs in {-1, +1}.
/// Closed under composition and inversion; carries every deck transformation
/// and every Klein-bottle isometry used here.
struct SignedAffineIsometry {
  std::array<int, 3> sign{1, 1, 1};
  std::array<double, 3> shift{0.0, 0.0, 0.0};

  static SignedAffineIsometry identity() { return {}; }
  static SignedAffineIsometry translation(double du, double dv, double dz = 0.0) {
    return {{1, 1, 1}, {du, dv, dz}};
  }
  static SignedAffineIsometry make(int su, int sv, int sz, double tu, double tv,
                                   double tz = 0.0) {
    return {{su, sv, sz}, {tu, tv, tz}};
  }

  ChartPoint operator()(const ChartPoint& p) const {
    return {sign[0] * p.u + shift[0], sign[1] * p.v + shift[1], sign[2] * p.z + shift[2]};
  }

  bool is_identity(double tol = 1e-12) const {
    return sign == std::array<int, 3>{1, 1, 1} && std::abs(shift[0]) <= tol &&
           std::abs(shift[1]) <= tol && std::abs(shift[2]) <= tol;
  }

  bool approx_equal(const SignedAffineIsometry& o, double tol = 1e-9) const {
    return sign == o.sign && std::abs(shift[0] - o.shift[0]) <= tol &&
           std::abs(shift[1] - o.shift[1]) <= tol && std::abs(shift[2] - o.shift[2]) <= tol;
  }

  /// Total order: sign pattern first, then translations.
  friend bool lexicographic_less(const SignedAffineIsometry& a, const SignedAffineIsometry& b) {
    if (a.sign != b.sign) return a.sign < b.sign;
    return a.shift < b.shift;
  }

  friend bool operator==(const SignedAffineIsometry&, const SignedAffineIsometry&) = default;
};

/// (f o g)(p) = f(g(p)).
inline SignedAffineIsometry compose(const SignedAffineIsometry& f, const SignedAffineIsometry& g) {
  SignedAffineIsometry h;
  for (int i = 0; i < 3; ++i) {
    h.sign[i] = f.sign[i] * g.sign[i];
    h.shift[i] = f.sign[i] * g.shift[i] + f.shift[i];
  }
  return h;
}

inline SignedAffineIsometry inverse(const SignedAffineIsometry& f) {
  SignedAffineIsometry h;
  for (int i = 0; i < 3; ++i) {
    h.sign[i] = f.sign[i];
    h.shift[i] = -f.sign[i] * f.shift[i];
  }
  return h;
}

/// g f g^-1
inline SignedAffineIsometry conjugate(const SignedAffineIsometry& g, const SignedAffineIsometry& f) {
  return compose(compose(g, f), inverse(g));
}

/// Quantized key for hashing elements of a discrete group.
struct IsometryKey {
  std::array<int, 3> sign;
  std::array<std::int64_t, 3> cell;
  friend bool operator==(const IsometryKey&, const IsometryKey&) = default;
};

inline IsometryKey key_of(const SignedAffineIsometry& f, double quantum = 1e-8) {
  IsometryKey k{f.sign, {}};
  for (int i = 0; i < 3; ++i) k.cell[i] = std::llround(f.shift[i] / quantum);
  return k;
}

struct IsometryKeyHash {
  std::size_t operator()(const IsometryKey& k) const noexcept {
    std::size_t h = 0;
    auto mix = [&h](std::uint64_t x) {
      h ^= std::hash<std::uint64_t>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    for (int i = 0; i < 3; ++i) {
      mix(static_cast<std::uint64_t>(k.sign[i] + 1));
      mix(static_cast<std::uint64_t>(k.cell[i]));
    }
    return h;
  }
};

/// True when t is an integer multiple of pi/2 up to roundoff.
inline bool is_quarter_period_multiple(double t, double tol = 1e-12) {
  const double r = std::remainder(t, kHalfPi);
  return std::abs(r) <= tol * std::max(1.0, std::abs(t));
}

/// Whether f preserves the metric: diagonal sign maps always preserve a
/// constant profile; the singular profile additionally needs t_v in (pi/2)Z
/// (psi is even and pi/2-periodic).
inline bool is_isometry_of(const SignedAffineIsometry& f, const MetricSpec& spec) {
  if (!spec.profile.is_singular()) return true;
  return is_quarter_period_multiple(f.shift[1]);
}

inline std::ostream& operator<<(std::ostream& os, const SignedAffineIsometry& f) {
  static const char* axes[3] = {"u", "v", "z"};
  os << "(";
  for (int i = 0; i < 3; ++i) {
    if (i) os << ", ";
    os << (f.sign[i] < 0 ? "-" : "") << axes[i];
    if (f.shift[i] != 0.0) os << (f.shift[i] < 0 ? " - " : " + ") << std::abs(f.shift[i]);
  }
  return os << ")";
}

}  // namespace systolic
