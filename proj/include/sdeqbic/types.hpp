#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sdeqbic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Equidistant high-frequency sampling grid t_j = j*h, j = 0..n.
struct SamplingScheme {
  std::size_t n = 0;  ///< number of increments (observations are n+1)
  double h = 0.0;     ///< step size in time units
  double T = 0.0;     ///< terminal time, always n*h

  /// True when n*h^2 >= 0.5, i.e. the grid is too coarse for the
  /// high-frequency asymptotics to be trustworthy. A warning, not an error.
  bool high_frequency_warning() const {
    return static_cast<double>(n) * h * h >= 0.5;
  }

  void validate() const;
};

/// Builds a scheme with T = n*h. Requires n >= 2 and h > 0.
SamplingScheme make_scheme(std::size_t n, double h);

struct PathMeta {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::string model;
  std::string noise;
};

/// Discrete observations (X_{t_0}, ..., X_{t_n}) on a sampling grid.
struct Path {
  SamplingScheme scheme;
  Vector values;  ///< length scheme.n + 1, all finite
  std::optional<PathMeta> meta;

  void validate() const;
};

/// First differences X_{j+1} - X_j, length n.
Vector increments(const Path& path);

/// Axis-aligned bounded box of admissible parameters.
struct ParameterDomain {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  Vector widths() const { return upper - lower; }
  Vector center() const { return 0.5 * (lower + upper); }
  bool contains(const Vector& theta) const;
  /// Componentwise clamp onto the box; idempotent.
  Vector project(const Vector& theta) const;
  void validate() const;
};

ParameterDomain make_domain(Vector lower, Vector upper);
/// Cube [lo, hi]^dim.
ParameterDomain uniform_box(int dim, double lo, double hi);

/// A parametric coefficient x, theta -> c(x, theta) with optional analytic
/// structure. Only `evaluate` is mandatory; everything else enables faster or
/// more accurate downstream paths and is cross-checked against `evaluate` by
/// the tests.
struct CoefficientFunction {
  std::function<double(double, const Vector&)> evaluate;

  /// d/dtheta, optional. When absent, param_gradient falls back to central
  /// finite differences with step 1e-5*(1+|theta_k|).
  std::function<Vector(double, const Vector&)> gradient;
  /// d2/dtheta2, optional.
  std::function<Matrix(double, const Vector&)> hessian;

  /// Declares a(x, theta) = sum_k theta_k * phi_k(x) + phi_0(x).
  /// The declaration is trusted by the weighted-least-squares fitter and
  /// verified pointwise by linear_decomposition_gap.
  bool linear_in_params = false;
  std::function<Vector(double)> basis;         ///< phi_1..phi_p
  std::function<double(double)> basis_offset;  ///< phi_0

  /// Declares log c^2(x, theta) = psi(x).theta + psi_0(x), the structure of
  /// exponential-form scale families. Enables a vectorized contrast kernel.
  bool log_square_affine = false;
  std::function<Vector(double)> log_square_basis;
  std::function<double(double)> log_square_offset;

  Vector param_gradient(double x, const Vector& theta) const;
  Matrix param_hessian(double x, const Vector& theta) const;
};

/// One candidate SDE model dX = a(X,alpha)dt + c(X-,gamma)dZ.
struct ModelSpec {
  CoefficientFunction drift;
  ParameterDomain drift_domain;
  CoefficientFunction scale;
  ParameterDomain scale_domain;
  std::string label;
};

struct ScaleCandidate {
  std::string name;
  CoefficientFunction fn;
  ParameterDomain domain;
};

struct DriftCandidate {
  std::string name;
  CoefficientFunction fn;
  ParameterDomain domain;
};

/// The M1 scale candidates and M2 drift candidates of a selection problem.
struct CandidateSet {
  std::vector<ScaleCandidate> scales;
  std::vector<DriftCandidate> drifts;

  std::size_t m1() const { return scales.size(); }
  std::size_t m2() const { return drifts.size(); }
  void validate() const;
};

/// Randomized-probe check that the scale never vanishes on the domain.
/// Samples (x, gamma) pairs with x in [-x_range, x_range]; returns false as
/// soon as a probe evaluates to exactly zero or a non-finite value.
bool scale_nonzero_probe(const CoefficientFunction& scale,
                         const ParameterDomain& domain, int probes = 512,
                         double x_range = 5.0, std::uint64_t seed = 0x5eed);

/// Throws std::invalid_argument when the probe check or a domain invariant
/// fails.
void validate_model_spec(const ModelSpec& model);

/// Max |evaluate - basis decomposition| over a (x, theta) grid; meaningful
/// only when linear_in_params is set.
double linear_decomposition_gap(const CoefficientFunction& fn,
                                const ParameterDomain& domain,
                                int grid = 17, double x_range = 5.0);

/// Max |exp(psi.theta + psi_0) - evaluate^2| relative gap over a grid;
/// meaningful only when log_square_affine is set.
double log_square_decomposition_gap(const CoefficientFunction& fn,
                                    const ParameterDomain& domain,
                                    int grid = 17, double x_range = 5.0);

}  // namespace sdeqbic
