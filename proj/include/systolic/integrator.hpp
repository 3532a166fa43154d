#pragma once

#include "systolic/errors.hpp"
#include "systolic/geodesic.hpp"
#include "systolic/metric.hpp"
#include "systolic/profile.hpp"

#include <boost/numeric/odeint/integrate/max_step_checker.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include <array>
#include <cmath>
#include <exception>
#include <string>
#include <vector>

namespace systolic {

struct IntegratorOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-13;
  double max_step = 0.05;
  /// Spacing of the emitted samples in arclength; corner crossings are added.
  double sample_spacing = 0.01;
  /// Below this normal speed a corner crossing counts as a tangency.
  double tangency_tol = 1e-8;
};

struct GeodesicTrace {
  std::vector<double> t;  // arclength parameter
  std::vector<ChartPoint> points;
  /// Metric length of the sampled polyline up to each sample.
  std::vector<double> cumulative_length;
  /// Clairaut invariant psi^2 du/dt at the start.
  double clairaut = 0.0;
  /// max |J(t) - J(0)| over samples and crossings.
  double clairaut_drift = 0.0;
  /// max |speed - 1| over samples.
  double speed_drift = 0.0;
  std::vector<ChartPoint> crossings;

  GeodesicArc arc() const { return GeodesicArc(GeodesicArc::Polyline{points}); }
};

/// Geodesic of psi^2 du^2 + dv^2 (+ dz^2) from `start` with initial chart
/// velocity `direction`, followed for the given metric arclength (unit scale).
///
/// Each band is integrated with its own smooth coefficients (dopri5, dense
/// output). Where the solution reaches a corner line the crossing is located
/// on the dense output and integration restarts in the neighbouring band
/// with the same chart velocity: tangent and psi^2 u' are continuous since
/// psi is.
inline GeodesicTrace integrate_geodesic(const MetricSpec& spec, const ChartPoint& start,
                                        const ChartPoint& direction, double arclength,
                                        const IntegratorOptions& opt = {}) {
  using State = std::array<double, 4>;  // u, v, u', v'
  namespace ode = boost::numeric::odeint;
  for (double x : {start.u, start.v, start.z, direction.u, direction.v, direction.z, arclength})
    if (!std::isfinite(x)) throw DomainError("integrate_geodesic: non-finite input");
  if (arclength < 0) throw DomainError("integrate_geodesic: arclength must be non-negative");
  const LatitudeProfile& prof = spec.profile;
  const double dz = spec.dimension == 3 ? direction.z : 0.0;
  const double w0 = prof(start.v);
  const double norm = std::sqrt(w0 * w0 * direction.u * direction.u + direction.v * direction.v + dz * dz);
  if (std::abs(norm - 1.0) > 1e-9)
    throw DomainError("integrate_geodesic: direction must have unit length in the metric at start");

  long band = band_index(start.v);
  auto edge_gap = [&](double v, long k) { return std::abs(v - double(k) * kHalfPi); };
  if (prof.is_singular() && std::abs(edge_gap(start.v, band) - kQuarterPi) < 1e-14) {
    const double side = start.v - double(band) * kHalfPi;
    if (side * direction.v > 0) band += side > 0 ? 1 : -1;
  }

  auto rhs = [&prof, &band](const State& x, State& dx, double) {
    const double w = prof.band_value(x[1], band);
    const double dw = prof.band_derivative(x[1], band);
    dx[0] = x[2];
    dx[1] = x[3];
    dx[2] = -2.0 * dw / w * x[2] * x[3];
    dx[3] = w * dw * x[2] * x[2];
  };
  auto clairaut = [&prof](const State& x) {
    const double w = prof(x[1]);
    return w * w * x[2];
  };

  GeodesicTrace out;
  State x{start.u, start.v, direction.u, direction.v};
  out.clairaut = clairaut(x);
  auto record = [&](double t, const State& s) {
    out.t.push_back(t);
    out.points.push_back({s[0], s[1], start.z + dz * t});
    const double w = prof(s[1]);
    out.speed_drift = std::max(out.speed_drift, std::abs(std::sqrt(w * w * s[2] * s[2] + s[3] * s[3] + dz * dz) - 1.0));
    out.clairaut_drift = std::max(out.clairaut_drift, std::abs(clairaut(s) - out.clairaut));
  };
  record(0.0, x);
  if (arclength == 0.0) {
    out.cumulative_length = {0.0};
    return out;
  }

  auto stepper = ode::make_dense_output(opt.abs_tol, opt.rel_tol, opt.max_step, ode::runge_kutta_dopri5<State>());
  stepper.initialize(x, 0.0, std::min(opt.max_step, 1e-3));
  double next_sample = opt.sample_spacing;
  const double edge_lo_off = -kQuarterPi, edge_hi_off = kQuarterPi;
  int guard = 0;
  try {
    while (stepper.current_time() < arclength) {
      if (++guard > 50'000'000) throw GeodesicError("integrate_geodesic: step budget exhausted", x[0], x[1]);
      const auto [t0, t1] = stepper.do_step(rhs);
      double t_end = std::min(t1, arclength);
      bool crossed = false;
      double t_cross = t_end;
      if (prof.is_singular()) {
        State s;
        stepper.calc_state(t_end, s);
        const double c = double(band) * kHalfPi;
        double off = s[1] - c;
        double t_hit = t_end;
        // A grazing excursion past the edge can start and end inside one
        // step; look at the latitude extremum when v' changes sign.
        if (off <= edge_hi_off && off >= edge_lo_off) {
          State s0;
          stepper.calc_state(t0, s0);
          if (s0[3] * s[3] < 0) {
            double lo = t0, hi = t_end;
            for (int it = 0; it < 100 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
              const double mid = 0.5 * (lo + hi);
              State sm;
              stepper.calc_state(mid, sm);
              if (sm[3] * s0[3] > 0) lo = mid; else hi = mid;
            }
            State se;
            stepper.calc_state(lo, se);
            if (se[1] - c > edge_hi_off || se[1] - c < edge_lo_off) {
              off = se[1] - c;
              t_hit = lo;
            }
          }
        }
        if (off > edge_hi_off || off < edge_lo_off) {
          const double target = off > 0 ? c + edge_hi_off : c + edge_lo_off;
          const double sgn = off > 0 ? 1.0 : -1.0;
          double lo = t0, hi = t_hit;
          for (int it = 0; it < 100 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            stepper.calc_state(mid, s);
            if (sgn * (s[1] - target) > 0) hi = mid; else lo = mid;
          }
          t_cross = hi;
          crossed = true;
        }
      }
      State s;
      for (; next_sample < t_cross; next_sample += opt.sample_spacing) {
        stepper.calc_state(next_sample, s);
        record(next_sample, s);
      }
      if (crossed) {
        stepper.calc_state(t_cross, s);
        const double side = s[1] - double(band) * kHalfPi > 0 ? 1.0 : -1.0;
        s[1] = double(band) * kHalfPi + side * kQuarterPi;
        if (std::abs(s[3]) < opt.tangency_tol)
          throw GeodesicError("integrate_geodesic: tangency with a corner line at u = " + std::to_string(s[0]) +
                                  ", v = " + std::to_string(s[1]),
                              s[0], s[1]);
        band += side > 0 ? 1 : -1;
        record(t_cross, s);
        out.crossings.push_back(out.points.back());
        stepper.initialize(s, t_cross, std::min(opt.max_step, 1e-3));
        continue;
      }
      if (t_end >= arclength) {
        stepper.calc_state(arclength, s);
        if (out.t.back() < arclength) record(arclength, s);
        break;
      }
    }
  } catch (const GeodesicError&) {
    throw;
  } catch (const std::exception& e) {
    throw GeodesicError(std::string("integrate_geodesic: step control failed (") + e.what() + ") near u = " +
                            std::to_string(out.points.back().u) + ", v = " + std::to_string(out.points.back().v),
                        out.points.back().u, out.points.back().v);
  }

  out.cumulative_length.assign(out.points.size(), 0.0);
  for (std::size_t i = 1; i < out.points.size(); ++i)
    out.cumulative_length[i] =
        out.cumulative_length[i - 1] + detail::segment_length(spec, out.points[i - 1], out.points[i], 1e-12);
  return out;
}

/// Unit initial velocity making angle `heading` with the u direction
/// (0 = increasing u, pi/2 = increasing v) on the surface part.
inline ChartPoint unit_direction(const MetricSpec& spec, const ChartPoint& p, double heading, double climb = 0.0) {
  const double w = spec.profile(p.v);
  const double c = std::sqrt(std::max(0.0, 1.0 - climb * climb));
  return {c * std::cos(heading) / w, c * std::sin(heading), spec.dimension == 3 ? climb : 0.0};
}

}  // namespace systolic
