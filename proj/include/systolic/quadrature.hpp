#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace systolic::quad {

/// Adaptive Gauss-Kronrod (G7/K15) on [a, b]. Boost's stopping rule is
/// relative to the L1 norm of f, which is O(1) for every integrand here.
template <class F>
double adaptive(F&& f, double a, double b, double tol = 1e-12,
                double* error = nullptr) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 15, tol, &err);
  if (error) *error = err;
  return value;
}

/// Adaptive integration of f over [a, b], split at the given interior
/// break points (kinks of the integrand).
template <class F>
double adaptive_split(F&& f, double a, double b, const std::vector<double>& breaks,
                      double tol = 1e-12) {
  double sum = 0.0;
  double lo = a;
  for (double c : breaks) {
    if (c > lo && c < b) {
      sum += adaptive(f, lo, c, tol);
      lo = c;
    }
  }
  return sum + adaptive(f, lo, b, tol);
}

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule; cached per n.
inline const Rule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rule rule;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    if (x == 0.0) {
      rule.nodes.push_back(0.0);
      rule.weights.push_back(w);
    } else {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
    }
  }
  // Fixed ascending order keeps summation order deterministic.
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    pairs.emplace_back(rule.nodes[i], rule.weights[i]);
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    rule.nodes[i] = pairs[i].first;
    rule.weights[i] = pairs[i].second;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

/// Fixed Gauss-Legendre rule mapped onto [a, b].
template <class F>
double gauss(F&& f, double a, double b, int n) {
  const Rule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

}  // namespace systolic::quad
