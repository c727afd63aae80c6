#pragma once

#include "sdeqbic/optimize.hpp"
#include "sdeqbic/types.hpp"

namespace sdeqbic {

/// Step-one quasi-likelihood of the scale coefficient,
///   G1_n(gamma) = -(1/h) sum_j [ h log c^2_{j-1} + (dX_j)^2 / c^2_{j-1} ],
/// with c evaluated at the left endpoint. c^2 is floored at 1e-300; a floor
/// hit raises DegenerateScaleError.
double scale_contrast(const Path& path, const CoefficientFunction& scale,
                      const Vector& gamma);

Vector scale_contrast_gradient(const Path& path,
                               const CoefficientFunction& scale,
                               const Vector& gamma);

/// Step-two quasi-likelihood of the drift coefficient given the fitted scale,
///   G2_n(alpha) = -sum_j (dX_j - h a_{j-1}(alpha))^2 / (h c^2_{j-1}(gamma)).
double drift_contrast(const Path& path, const CoefficientFunction& drift,
                      const Vector& alpha, const CoefficientFunction& scale,
                      const Vector& gamma_hat);

Vector drift_contrast_gradient(const Path& path,
                               const CoefficientFunction& drift,
                               const Vector& alpha,
                               const CoefficientFunction& scale,
                               const Vector& gamma_hat);

/// Joint contrast of Remark-style cross-checks:
///   -(1/h) sum_j [ h log c^2_{j-1} + (dX_j - h a_{j-1})^2 / c^2_{j-1} ].
double joint_contrast(const Path& path, const ModelSpec& model,
                      const Vector& gamma, const Vector& alpha);

/// Reusable scale-contrast evaluator: left endpoints, squared increments,
/// and (for affine log-square scales) the basis matrix are assembled once,
/// so repeated evaluations during optimization or quadrature stay cheap.
/// Keeps references to the path's scale function; do not outlive it.
class ScaleContrastEvaluator {
 public:
  ScaleContrastEvaluator(const Path& path, const CoefficientFunction& scale);
  double operator()(const Vector& gamma) const;

 private:
  const CoefficientFunction* scale_;
  Vector x_, dx2_, psi0_;
  Matrix psi_;
  double h_ = 0.0;
  bool affine_ = false;
};

/// Same idea for the drift step: the 1/(h c^2) weights under the fitted
/// scale are computed once.
class DriftContrastEvaluator {
 public:
  DriftContrastEvaluator(const Path& path, const CoefficientFunction& drift,
                         const CoefficientFunction& scale,
                         const Vector& gamma_hat);
  double operator()(const Vector& alpha) const;
  const Vector& weights() const { return weights_; }

 private:
  const CoefficientFunction* drift_;
  const Path* path_;
  Vector weights_;
};

struct FitOptions {
  OptimizeOptions optimize;
  /// Skip the closed-form weighted-least-squares route for linear drifts and
  /// run the numerical optimizer instead (used to cross-validate the two).
  bool force_numeric_drift = false;
};

struct ScaleFit {
  Vector gamma_hat;
  double g1_at_max = 0.0;
  OptimizeDiagnostics diag;
};

struct DriftFit {
  Vector alpha_hat;
  double g2_at_max = 0.0;
  OptimizeDiagnostics diag;
  bool used_wls = false;
};

/// Stepwise GQMLE output for one candidate model.
struct FitResult {
  std::string model_label;
  Vector gamma_hat;
  Vector alpha_hat;
  double g1_at_max = 0.0;
  double g2_at_max = 0.0;
  OptimizeDiagnostics scale_diag;
  OptimizeDiagnostics drift_diag;
  bool drift_used_wls = false;
};

/// argmax of the scale contrast over the closed box by multistart
/// Nelder-Mead; probe points where the scale degenerates are rejected.
ScaleFit fit_scale(const Path& path, const CoefficientFunction& scale,
                   const ParameterDomain& domain, const FitOptions& opts = {});

/// argmax of the drift contrast. Linear-in-parameter drifts are solved by
/// the weighted-least-squares normal equations (the contrast is exactly
/// quadratic) and projected onto the box; otherwise multistart Nelder-Mead.
DriftFit fit_drift(const Path& path, const CoefficientFunction& drift,
                   const ParameterDomain& domain,
                   const CoefficientFunction& scale, const Vector& gamma_hat,
                   const FitOptions& opts = {});

/// Both steps for one candidate model.
FitResult fit_model(const Path& path, const ModelSpec& model,
                    const FitOptions& opts = {});

}  // namespace sdeqbic
