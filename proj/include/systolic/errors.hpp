#pragma once

#include <stdexcept>
#include <string>

namespace systolic {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent user input (config keys, moduli, test functions).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured resource cap (candidate count, evaluation budget) was hit.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, double best_bound = 0.0)
      : std::runtime_error(what), best_bound_(best_bound) {}
  double best_bound() const noexcept { return best_bound_; }

 private:
  double best_bound_;
};

/// The geodesic integrator could not continue (e.g. grazing a corner line).
class GeodesicError : public std::runtime_error {
 public:
  GeodesicError(const std::string& what, double u, double v)
      : std::runtime_error(what), u_(u), v_(v) {}
  double u() const noexcept { return u_; }
  double v() const noexcept { return v_; }

 private:
  double u_, v_;
};

}  // namespace systolic
