#pragma once

#include "sdeqbic/optimize.hpp"
#include "sdeqbic/quadrature.hpp"
#include "sdeqbic/types.hpp"

#include <functional>
#include <vector>

namespace sdeqbic {

struct TrueModel;  // simulate.hpp

/// The invariant law pi_0 the limit contrasts integrate against: the standard
/// normal (Gauss-Hermite fast path), a general closed-form density, or the
/// occupation measure of one long simulated path.
class StationaryDistribution {
 public:
  enum class Kind { StandardNormal, ClosedForm, Empirical };

  static StationaryDistribution standard_normal();
  /// General density; verified to integrate to 1 within 1e-8.
  static StationaryDistribution closed_form(
      std::function<double(double)> density);
  /// Ergodic time average over a long path after discarding burn_in time
  /// units. Requires at least 1000 time units after burn-in.
  static StationaryDistribution empirical(Path long_path, double burn_in);

  Kind kind() const { return kind_; }
  /// E[f(X)], dispatched per kind.
  double expect(const std::function<double(double)>& f) const;
  const Vector& sample() const { return sample_; }

  int gh_nodes = 201;
  AdaptiveOptions adaptive;

 private:
  StationaryDistribution() = default;
  Kind kind_ = Kind::StandardNormal;
  std::function<double(double)> density_;
  Vector sample_;
};

/// G1(gamma) = -Int [log c^2(x,gamma) + C^2(x)/c^2(x,gamma)] pi0(dx).
double limit_scale_contrast(const CoefficientFunction& scale,
                            const Vector& gamma,
                            const std::function<double(double)>& true_C,
                            const StationaryDistribution& pi0);

/// G2(alpha) = -Int c^{-2}(x,gamma*) (A(x) - a(x,alpha))^2 pi0(dx).
double limit_drift_contrast(const CoefficientFunction& drift,
                            const Vector& alpha,
                            const CoefficientFunction& scale,
                            const Vector& gamma_star,
                            const std::function<double(double)>& true_A,
                            const StationaryDistribution& pi0);

/// argmax of a limit contrast over its box with the same multistart optimizer
/// the data fits use.
std::pair<Vector, double> optimize_limit(
    const std::function<double(const Vector&)>& contrast,
    const ParameterDomain& domain, const OptimizeOptions& opts = {});

/// Fisher-type matrix of the scale step at the optimal parameter,
///   I_gamma = 4 Int (dc)(dc)^T / c^4 C^2 dpi0
///           - 2 Int [d2c c - (dc)(dc)^T] / c^4 (C^2 - c^2) dpi0.
Matrix fisher_scale(const CoefficientFunction& scale, const Vector& gamma_star,
                    const std::function<double(double)>& true_C,
                    const StationaryDistribution& pi0);

/// Fisher-type matrix of the drift step at the optimal parameter,
///   I_alpha = 2 Int (da)(da)^T / c^2 dpi0
///           - 2 Int d2a / c^2 (A - a) dpi0.
Matrix fisher_drift(const CoefficientFunction& drift, const Vector& alpha_star,
                    const CoefficientFunction& scale, const Vector& gamma_star,
                    const std::function<double(double)>& true_A,
                    const StationaryDistribution& pi0);

/// Population-level answer for a candidate set against a known truth.
struct LimitReport {
  Vector g1_star;                   // optimal G1 per scale candidate
  Vector g2_star;                   // optimal G2 per drift, given m1_star
  std::vector<Vector> gamma_star;   // optimal parameter per scale candidate
  std::vector<Vector> alpha_star;   // optimal parameter per drift candidate
  std::size_t m1_star = 0;          // 0-based optimal indices
  std::size_t m2_star = 0;
  /// Candidates ordered best-first; values tied within 1e-6 are ordered by
  /// parameter dimension, then index.
  std::vector<std::size_t> scale_ranking;
  std::vector<std::size_t> drift_ranking;
  Matrix fisher_gamma;              // at the optimal scale model
  Matrix fisher_alpha;              // at the optimal drift model
  bool fisher_gamma_pd = false;
  bool fisher_alpha_pd = false;
};

/// Optimizes every candidate's limit contrast, resolves the optimal-model
/// sets (ties within 1e-6 go to the smallest dimension, then lowest index),
/// and evaluates the Fisher matrices at the optimal model.
LimitReport optimal_model(const CandidateSet& candidates,
                          const TrueModel& truth,
                          const StationaryDistribution& pi0,
                          const OptimizeOptions& opts = {});

}  // namespace sdeqbic
