#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdeqbic {

// Euler state left the admissible range (|x| > blow-up guard or non-finite).
class SimulationBlowupError : public std::runtime_error {
 public:
  SimulationBlowupError(std::size_t first_bad_index, const std::string& what)
      : std::runtime_error(what), first_bad_index_(first_bad_index) {}
  std::size_t first_bad_index() const { return first_bad_index_; }

 private:
  std::size_t first_bad_index_;
};

// Scale coefficient collapsed below the representable floor during a
// quasi-likelihood evaluation.
class DegenerateScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No optimizer start reached the convergence criterion.
class OptimizationFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or other numeric routine failed to converge; carries the last
// residual estimate.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

class UnsupportedDimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdeqbic
