#pragma once

#include "systolic/errors.hpp"
#include "systolic/manifold.hpp"
#include "systolic/metric.hpp"
#include "systolic/systole.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace systolic {

struct FlatOptimumOptions {
  /// Total number of systolic-ratio evaluations.
  std::size_t budget = 10'000;
  std::uint64_t seed = 0;
  /// Enumeration cap per evaluation; moduli exceeding it score 0.
  std::size_t cap = 200'000;
};

struct FlatOptimumResult {
  Topology topology = Topology::torus2;
  double ratio = 0.0;
  std::vector<double> parameters;
  /// Moduli at the optimum: a basis for tori, (a, b, alpha, d, L) otherwise.
  Moduli moduli;
  std::size_t evaluations = 0;
  bool certified = false;
};

/// Minimal Nelder-Mead on R^n with a hard evaluation budget.
class NelderMead {
 public:
  using Objective = std::function<double(const std::vector<double>&)>;

  NelderMead(Objective f, std::size_t budget) : f_(std::move(f)), budget_(budget) {}

  std::size_t used() const { return used_; }
  bool exhausted() const { return used_ >= budget_; }

  /// Minimises from x0 with initial simplex steps `step`; returns (x, f).
  std::pair<std::vector<double>, double> run(std::vector<double> x0, const std::vector<double>& step,
                                             std::size_t max_evals, double ftol = 1e-14, double xtol = 1e-10) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> s(n + 1, x0);
    std::vector<double> fs(n + 1);
    const std::size_t stop = std::min(budget_, used_ + max_evals);
    fs[0] = eval(s[0]);
    for (std::size_t i = 0; i < n; ++i) {
      s[i + 1][i] += step[i];
      fs[i + 1] = eval(s[i + 1]);
    }
    std::vector<std::size_t> order(n + 1);
    auto sort = [&] {
      for (std::size_t i = 0; i <= n; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    };
    auto point = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = c[i] + t * (w[i] - c[i]);
      return p;
    };
    while (used_ + 1 < stop) {
      sort();
      const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
      double diam = 0.0;
      for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t i = 0; i < n; ++i) diam = std::max(diam, std::abs(s[k][i] - s[best][i]));
      if (std::abs(fs[worst] - fs[best]) <= ftol && diam <= xtol) break;
      std::vector<double> c(n, 0.0);
      for (std::size_t k = 0; k <= n; ++k)
        if (k != worst)
          for (std::size_t i = 0; i < n; ++i) c[i] += s[k][i] / double(n);
      const auto xr = point(c, s[worst], -1.0);
      const double fr = eval(xr);
      if (fr < fs[best]) {
        const auto xe = point(c, s[worst], -2.0);
        const double fe = used_ < stop ? eval(xe) : fr;
        if (fe < fr) {
          s[worst] = xe;
          fs[worst] = fe;
        } else {
          s[worst] = xr;
          fs[worst] = fr;
        }
      } else if (fr < fs[second]) {
        s[worst] = xr;
        fs[worst] = fr;
      } else {
        const bool outside = fr < fs[worst];
        const auto xc = point(c, outside ? xr : s[worst], 0.5);
        const double fc = eval(xc);
        if (fc < std::min(fr, fs[worst])) {
          s[worst] = xc;
          fs[worst] = fc;
        } else {
          for (std::size_t k = 0; k <= n && used_ < stop; ++k) {
            if (k == best) continue;
            s[k] = point(s[best], s[k], 0.5);
            fs[k] = eval(s[k]);
          }
        }
      }
    }
    sort();
    return {s[order.front()], fs[order.front()]};
  }

  /// Past the budget the objective is not called and +inf is returned.
  double eval(const std::vector<double>& x) {
    if (used_ >= budget_) return std::numeric_limits<double>::infinity();
    ++used_;
    return f_(x);
  }

 private:
  Objective f_;
  std::size_t budget_;
  std::size_t used_ = 0;
};

namespace detail {

/// Pairwise size reduction of a lattice basis until no vector shortens.
inline std::vector<Vector3> reduce_basis(std::vector<Vector3> b) {
  auto dot = [](const Vector3& x, const Vector3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; };
  for (int pass = 0; pass < 100; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (i == j) continue;
        const double k = std::round(dot(b[i], b[j]) / dot(b[j], b[j]));
        if (k != 0.0) {
          for (int c = 0; c < 3; ++c) b[i][c] -= k * b[j][c];
          changed = true;
        }
      }
    if (!changed) break;
  }
  return b;
}

struct FlatFamily {
  std::vector<double> lo, hi;
  std::function<ManifoldSpec(const std::vector<double>&)> build;
};

inline FlatFamily flat_family(Topology t) {
  auto clampv = [](double x) { return std::clamp(x, -6.0, 6.0); };
  const double root_margin = 0.7;
  switch (t) {
    case Topology::torus2:
      return {{0.0, std::log(0.5)}, {0.5, std::log(2.0)}, [=](const std::vector<double>& x) {
                return ManifoldSpec::flat_torus(reduce_basis({{1, 0, 0}, {x[0], std::exp(clampv(x[1])), 0}}));
              }};
    case Topology::torus3:
      return {{0.0, -root_margin, 0.0, 0.0, -root_margin},
              {0.5, root_margin, 0.5, 0.6, root_margin},
              [=](const std::vector<double>& x) {
                return ManifoldSpec::flat_torus(reduce_basis(
                    {{1, 0, 0}, {x[0], std::exp(clampv(x[1])), 0}, {x[2], x[3], std::exp(clampv(x[4]))}}));
              }};
    case Topology::klein2:
      return {{-1.5}, {1.5}, [=](const std::vector<double>& x) { return ManifoldSpec::flat_klein(2.0, std::exp(clampv(x[0]))); }};
    case Topology::klein_cross_circle:
      return {{-1.5, -1.5}, {1.5, 1.5}, [=](const std::vector<double>& x) {
                return ManifoldSpec::klein_cross_circle(std::exp(clampv(x[1])), Geometry::flat, 2.0, std::exp(clampv(x[0])));
              }};
    case Topology::b1:
    case Topology::b2:
      return {{-1.5, 0.0, -1.5}, {1.5, 1.0, 1.5}, [=](const std::vector<double>& x) {
                const double frac = x[1] - std::floor(x[1]);
                return ManifoldSpec::flat_bieberbach(t, 2.0, std::exp(clampv(x[0])), frac, std::exp(clampv(x[2])));
              }};
    case Topology::b3:
    case Topology::b4:
      return {{-1.5, -1.5}, {1.5, 1.5}, [=](const std::vector<double>& x) {
                return ManifoldSpec::flat_bieberbach(t, 2.0, std::exp(clampv(x[0])), 0.0, std::exp(clampv(x[1])));
              }};
  }
  throw InputError("no flat moduli family for this topology");
}

}  // namespace detail

/// Best systolic ratio over flat metrics of the given topology.
///
/// Moduli are normalised (first period 1, or a/2 = 1) since the ratio is
/// scale invariant; log coordinates keep periods positive. A grid search
/// over a box of plausible moduli seeds Nelder-Mead runs; seeded random
/// restarts use the remaining budget.
inline FlatOptimumResult flat_ratio_optimum(Topology t, const FlatOptimumOptions& o = {}) {
  const detail::FlatFamily fam = detail::flat_family(t);
  const std::size_t n = fam.lo.size();
  FlatOptimumResult best;
  best.topology = t;
  best.certified = o.budget >= 50 * n;
  SystoleOptions so;
  so.enumeration.cap = o.cap;
  auto objective = [&](const std::vector<double>& x) {
    try {
      const ManifoldSpec m = fam.build(x);
      const SystoleResult s = systole(m, so);
      if (!s.certified) return 0.0;
      const double r = std::pow(s.value, m.dimension()) / volume(m);
      if (r > best.ratio) {
        best.ratio = r;
        best.parameters = x;
        best.moduli = m.moduli();
      }
      return -r;
    } catch (const ResourceError&) {
      return 0.0;
    } catch (const InputError&) {
      return 0.0;
    }
  };
  NelderMead nm(objective, o.budget);

  // Grid search over the box with about a fifth of the budget.
  const std::size_t g = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(std::pow(double(o.budget) / 5.0, 1.0 / double(n)))));
  std::vector<std::pair<double, std::vector<double>>> grid;
  std::vector<std::size_t> idx(n, 0);
  for (bool done = false; !done && !nm.exhausted();) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = fam.lo[i] + (fam.hi[i] - fam.lo[i]) * double(idx[i]) / double(g - 1);
    grid.push_back({nm.eval(x), x});
    std::size_t k = 0;
    while (k < n && ++idx[k] == g) idx[k++] = 0;
    done = k == n;
  }
  std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = (fam.hi[i] - fam.lo[i]) / double(g);
  const std::size_t per_run = 200 * n;
  for (std::size_t k = 0; k < std::min<std::size_t>(5, grid.size()) && !nm.exhausted(); ++k) {
    auto [x, f] = nm.run(grid[k].second, step, per_run);
    // One restart from the converged point with a fresh simplex.
    std::vector<double> small(n);
    for (std::size_t i = 0; i < n; ++i) small[i] = step[i] / 10;
    if (!nm.exhausted()) nm.run(x, small, per_run);
  }
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (!nm.exhausted()) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = fam.lo[i] + (fam.hi[i] - fam.lo[i]) * unit(rng);
    nm.run(x, step, per_run);
  }
  best.evaluations = nm.used();
  return best;
}

}  // namespace systolic
