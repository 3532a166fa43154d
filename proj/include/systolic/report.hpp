#pragma once

#include "systolic/integrator.hpp"
#include "systolic/isometry.hpp"
#include "systolic/manifold.hpp"

#include <json.hpp>

#include <boost/version.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

namespace systolic {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string format_number(double x, int digits) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline void emit_string(std::ostream& os, const std::string& s) {
  // nlohmann's escaping, applied to a lone string.
  os << Json(s).dump();
}

inline void emit(std::ostream& os, const Json& j, int indent) {
  const std::string pad(std::size_t(2 * (indent + 1)), ' '), close(std::size_t(2 * indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        emit_string(os, it.key());
        os << ": ";
        emit(os, it.value(), indent + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(os, j[i], indent + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_number(j.get<double>(), 17);
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// JSON text with every floating-point number at 17 significant digits;
/// non-finite values become null.
inline std::string to_json_text(const Json& j) {
  std::ostringstream os;
  detail::emit(os, j, 0);
  os << "\n";
  return os.str();
}

inline Json to_json(const SignedAffineIsometry& f) {
  return Json{{"sign", {f.sign[0], f.sign[1], f.sign[2]}}, {"shift", {f.shift[0], f.shift[1], f.shift[2]}}};
}

inline Json to_json(const ChartPoint& p) { return Json{{"u", p.u}, {"v", p.v}, {"z", p.z}}; }

inline Json to_json(const ManifoldSpec& m) {
  const Moduli& mod = m.moduli();
  Json j{{"name", m.name()},
         {"topology", to_string(m.topology())},
         {"geometry", to_string(m.geometry())},
         {"dimension", m.dimension()},
         {"scale", m.scale()}};
  Json mj = Json::object();
  if (m.is_torus() && m.geometry() == Geometry::flat) {
    Json basis = Json::array();
    for (const auto& e : mod.lattice) basis.push_back({e[0], e[1], e[2]});
    mj["lattice"] = basis;
  } else if (m.is_torus()) {
    Json periods = Json::array();
    for (const auto& e : mod.lattice) periods.push_back({e[0], e[1], e[2]});
    mj["periods"] = periods;
  } else {
    mj["a"] = mod.a;
    mj["b"] = mod.b;
    if (is_bieberbach(m.topology())) {
      mj["alpha"] = mod.alpha;
      mj["d"] = mod.d;
    }
    if (m.topology() == Topology::klein_cross_circle) mj["L"] = mod.circle_length;
  }
  j["moduli"] = mj;
  return j;
}

inline Json versions_json() {
  return Json{{"systolic", kVersion},
              {"boost", BOOST_LIB_VERSION},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

inline Json check_json(const std::string& name, double expected, double computed, double tolerance, bool pass) {
  return Json{{"name", name}, {"expected", expected}, {"computed", computed}, {"tolerance", tolerance}, {"pass", pass}};
}

inline const char* kTraceCsvHeader = "t,u,v,z,cumulative_length";

/// Plot-ready samples at 12 significant digits.
inline std::string trace_csv(const GeodesicTrace& tr) {
  std::ostringstream os;
  os << kTraceCsvHeader << "\n";
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    const ChartPoint& p = tr.points[i];
    os << detail::format_number(tr.t[i], 12) << "," << detail::format_number(p.u, 12) << ","
       << detail::format_number(p.v, 12) << "," << detail::format_number(p.z, 12) << ","
       << detail::format_number(tr.cumulative_length[i], 12) << "\n";
  }
  return os.str();
}

}  // namespace systolic
