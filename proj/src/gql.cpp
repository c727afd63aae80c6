#include "sdeqbic/gql.hpp"

#include "sdeqbic/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace sdeqbic {

namespace {

constexpr double kC2Floor = 1e-300;
const double kLogFloor = std::log(kC2Floor);
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

ScaleContrastEvaluator::ScaleContrastEvaluator(const Path& path,
                                               const CoefficientFunction& scale)
    : scale_(&scale) {
  path.validate();
  const auto n = static_cast<Eigen::Index>(path.scheme.n);
  x_ = path.values.head(n);
  dx2_ = (path.values.tail(n) - path.values.head(n)).array().square();
  h_ = path.scheme.h;
  affine_ = scale.log_square_affine && static_cast<bool>(scale.log_square_basis);
  if (affine_) {
    const Eigen::Index p = scale.log_square_basis(x_[0]).size();
    psi_.resize(n, p);
    psi0_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      psi_.row(j) = scale.log_square_basis(x_[j]).transpose();
      psi0_[j] = scale.log_square_offset ? scale.log_square_offset(x_[j]) : 0.0;
    }
  }
}

double ScaleContrastEvaluator::operator()(const Vector& gamma) const {
  if (affine_) {
    const Vector log_c2 = psi_ * gamma + psi0_;
    if (log_c2.minCoeff() < kLogFloor)
      throw DegenerateScaleError("scale_contrast: c^2 hit the 1e-300 floor");
    const double quad = (dx2_.array() * (-log_c2).array().exp()).sum();
    return -log_c2.sum() - quad / h_;
  }
  double log_acc = 0.0, quad_acc = 0.0;
  for (Eigen::Index j = 0; j < x_.size(); ++j) {
    const double c = scale_->evaluate(x_[j], gamma);
    const double c2 = c * c;
    if (!(c2 >= kC2Floor))
      throw DegenerateScaleError("scale_contrast: c^2 hit the 1e-300 floor");
    log_acc += std::log(c2);
    quad_acc += dx2_[j] / c2;
  }
  return -log_acc - quad_acc / h_;
}

DriftContrastEvaluator::DriftContrastEvaluator(const Path& path,
                                               const CoefficientFunction& drift,
                                               const CoefficientFunction& scale,
                                               const Vector& gamma_hat)
    : drift_(&drift), path_(&path) {
  path.validate();
  const auto n = static_cast<Eigen::Index>(path.scheme.n);
  weights_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double c = scale.evaluate(path.values[j], gamma_hat);
    const double c2 = c * c;
    if (!(c2 >= kC2Floor))
      throw DegenerateScaleError("drift_contrast: c^2 hit the 1e-300 floor");
    weights_[j] = 1.0 / (path.scheme.h * c2);
  }
}

double DriftContrastEvaluator::operator()(const Vector& alpha) const {
  const auto n = weights_.size();
  const double h = path_->scheme.h;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double resid = path_->values[j + 1] - path_->values[j] -
                         h * drift_->evaluate(path_->values[j], alpha);
    acc += resid * resid * weights_[j];
  }
  return -acc;
}

double scale_contrast(const Path& path, const CoefficientFunction& scale,
                      const Vector& gamma) {
  return ScaleContrastEvaluator(path, scale)(gamma);
}

Vector scale_contrast_gradient(const Path& path,
                               const CoefficientFunction& scale,
                               const Vector& gamma) {
  path.validate();
  const auto n = static_cast<Eigen::Index>(path.scheme.n);
  const double h = path.scheme.h;
  Vector grad = Vector::Zero(gamma.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = path.values[j];
    const double dx = path.values[j + 1] - path.values[j];
    const double c = scale.evaluate(x, gamma);
    const double c2 = c * c;
    if (!(c2 >= kC2Floor))
      throw DegenerateScaleError("scale_contrast_gradient: degenerate c^2");
    const Vector dc = scale.param_gradient(x, gamma);
    grad += 2.0 * (dc / c) * (dx * dx / (h * c2) - 1.0);
  }
  return grad;
}

double drift_contrast(const Path& path, const CoefficientFunction& drift,
                      const Vector& alpha, const CoefficientFunction& scale,
                      const Vector& gamma_hat) {
  return DriftContrastEvaluator(path, drift, scale, gamma_hat)(alpha);
}

Vector drift_contrast_gradient(const Path& path,
                               const CoefficientFunction& drift,
                               const Vector& alpha,
                               const CoefficientFunction& scale,
                               const Vector& gamma_hat) {
  path.validate();
  const DriftContrastEvaluator eval(path, drift, scale, gamma_hat);
  const auto n = static_cast<Eigen::Index>(path.scheme.n);
  const double h = path.scheme.h;
  Vector grad = Vector::Zero(alpha.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = path.values[j];
    const double resid =
        path.values[j + 1] - path.values[j] - h * drift.evaluate(x, alpha);
    grad += 2.0 * h * eval.weights()[j] * resid * drift.param_gradient(x, alpha);
  }
  return grad;
}

double joint_contrast(const Path& path, const ModelSpec& model,
                      const Vector& gamma, const Vector& alpha) {
  path.validate();
  const auto n = static_cast<Eigen::Index>(path.scheme.n);
  const double h = path.scheme.h;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = path.values[j];
    const double c = model.scale.evaluate(x, gamma);
    const double c2 = c * c;
    if (!(c2 >= kC2Floor))
      throw DegenerateScaleError("joint_contrast: c^2 hit the 1e-300 floor");
    const double resid =
        path.values[j + 1] - path.values[j] - h * model.drift.evaluate(x, alpha);
    acc += std::log(c2) + resid * resid / (h * c2);
  }
  return -acc;
}

ScaleFit fit_scale(const Path& path, const CoefficientFunction& scale,
                   const ParameterDomain& domain, const FitOptions& opts) {
  const ScaleContrastEvaluator contrast(path, scale);
  const Objective objective = [&](const Vector& gamma) {
    try {
      return contrast(gamma);
    } catch (const DegenerateScaleError&) {
      return kNegInf;
    }
  };
  const OptimizeResult res = maximize_box(objective, domain, opts.optimize);
  return ScaleFit{res.x, res.value, res.diag};
}

DriftFit fit_drift(const Path& path, const CoefficientFunction& drift,
                   const ParameterDomain& domain,
                   const CoefficientFunction& scale, const Vector& gamma_hat,
                   const FitOptions& opts) {
  const DriftContrastEvaluator contrast(path, drift, scale, gamma_hat);

  if (drift.linear_in_params && drift.basis && !opts.force_numeric_drift) {
    const auto n = static_cast<Eigen::Index>(path.scheme.n);
    const double h = path.scheme.h;
    const Eigen::Index p = domain.dim();
    Matrix normal = Matrix::Zero(p, p);
    Vector rhs = Vector::Zero(p);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x = path.values[j];
      const Vector phi = drift.basis(x);
      const double offset = drift.basis_offset ? drift.basis_offset(x) : 0.0;
      const double y = path.values[j + 1] - path.values[j] - h * offset;
      const double wj = contrast.weights()[j];
      normal.noalias() += (wj * h * h) * (phi * phi.transpose());
      rhs.noalias() += (wj * h * y) * phi;
    }
    const Eigen::LDLT<Matrix> ldlt(normal);
    if (ldlt.info() == Eigen::Success) {
      const Vector alpha = ldlt.solve(rhs);
      const double residual = (normal * alpha - rhs).norm();
      if (alpha.allFinite() && residual <= 1e-8 * (1.0 + rhs.norm())) {
        DriftFit fit;
        fit.alpha_hat = domain.project(alpha);
        fit.g2_at_max = contrast(fit.alpha_hat);
        fit.used_wls = true;
        fit.diag.evaluations = 1;
        fit.diag.converged = true;
        fit.diag.boundary_contact = !domain.contains(alpha);
        for (Eigen::Index k = 0; k < p && !fit.diag.boundary_contact; ++k) {
          const double margin =
              opts.optimize.boundary_tol * (domain.upper[k] - domain.lower[k]);
          if (fit.alpha_hat[k] - domain.lower[k] <= margin ||
              domain.upper[k] - fit.alpha_hat[k] <= margin)
            fit.diag.boundary_contact = true;
        }
        return fit;
      }
    }
    // Singular normal equations: fall through to the numeric route.
  }

  const Objective objective = [&](const Vector& alpha) {
    return contrast(alpha);
  };
  const OptimizeResult res = maximize_box(objective, domain, opts.optimize);
  return DriftFit{res.x, res.value, res.diag, false};
}

FitResult fit_model(const Path& path, const ModelSpec& model,
                    const FitOptions& opts) {
  const ScaleFit sf = fit_scale(path, model.scale, model.scale_domain, opts);
  const DriftFit df = fit_drift(path, model.drift, model.drift_domain,
                                model.scale, sf.gamma_hat, opts);
  FitResult out;
  out.model_label = model.label;
  out.gamma_hat = sf.gamma_hat;
  out.alpha_hat = df.alpha_hat;
  out.g1_at_max = sf.g1_at_max;
  out.g2_at_max = df.g2_at_max;
  out.scale_diag = sf.diag;
  out.drift_diag = df.diag;
  out.drift_used_wls = df.used_wls;
  return out;
}

}  // namespace sdeqbic
