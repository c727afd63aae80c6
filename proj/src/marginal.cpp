#include "sdeqbic/marginal.hpp"

#include "sdeqbic/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace sdeqbic {

namespace {

double box_volume(const ParameterDomain& domain) {
  return domain.widths().prod();
}

double integrate_over_domain(const std::function<double(const Vector&)>& f,
                             const ParameterDomain& domain,
                             const AdaptiveOptions& opts) {
  switch (domain.dim()) {
    case 1:
      return integrate_adaptive(
          [&](double x) { return f(Vector::Constant(1, x)); },
          domain.lower[0], domain.upper[0], opts);
    case 2:
      return integrate_adaptive_2d(
          [&](double x, double y) {
            Vector t(2);
            t << x, y;
            return f(t);
          },
          domain.lower[0], domain.upper[0], domain.lower[1], domain.upper[1],
          opts);
    default:
      throw UnsupportedDimensionError(
          "parameter quadrature supports dim <= 2");
  }
}

// Per-axis edge list graded geometrically away from the anchor at the scale
// of the peak's curvature, so the initial mesh already resolves a spike the
// root rule would integrate to zero.
std::vector<double> graded_edges(
    const std::function<double(const Vector&)>& log_f, const Vector& anchor,
    double anchor_value, int axis, const ParameterDomain& domain) {
  const double lo = domain.lower[axis], hi = domain.upper[axis];
  const double width = hi - lo;
  // One-sided curvature probe; the peak may sit on a domain face.
  double sigma = width / 8.0;
  const double step = std::max(1e-7 * width, 1e-9);
  Vector probe = anchor;
  probe[axis] = std::min(anchor[axis] + step, hi);
  const double up = log_f(probe);
  probe[axis] = std::max(anchor[axis] - step, lo);
  const double dn = log_f(probe);
  probe[axis] = anchor[axis];
  const double d2 =
      -(up - 2.0 * anchor_value + dn) / (step * step);  // -d2/dx2 of log_f
  if (std::isfinite(d2) && d2 > 0.0)
    sigma = std::min(sigma, 1.0 / std::sqrt(d2));
  sigma = std::max(sigma, 1e-9 * width);

  std::vector<double> edges{lo, hi};
  for (int side : {-1, +1})
    for (double r = sigma; r < width; r *= 3.0) {
      const double e = anchor[axis] + side * r;
      if (e > lo && e < hi) edges.push_back(e);
    }
  if (anchor[axis] > lo && anchor[axis] < hi) edges.push_back(anchor[axis]);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

PriorDensity uniform_prior(const ParameterDomain& domain) {
  domain.validate();
  const double value = 1.0 / box_volume(domain);
  return PriorDensity{[value](const Vector&) { return value; }, value};
}

void validate_prior(const PriorDensity& prior, const ParameterDomain& domain) {
  if (!prior.density) throw std::invalid_argument("prior: null density");
  if (!(prior.sup_bound > 0.0) || !std::isfinite(prior.sup_bound))
    throw std::invalid_argument("prior: sup_bound must be finite positive");
  const double mass = integrate_over_domain(prior.density, domain, {});
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::invalid_argument(
        "prior: density mass deviates from 1 by more than 1e-6");
}

double log_integral_exp(const std::function<double(const Vector&)>& log_f,
                        const ParameterDomain& domain,
                        const PriorDensity& prior, const Vector& anchor_point,
                        double anchor_value, const AdaptiveOptions& opts) {
  domain.validate();
  if (domain.dim() > 2)
    throw UnsupportedDimensionError("log_integral_exp supports dim <= 2");

  // The shift must track the max of log_f over the prior's support, not over
  // the whole box: scan a coarse lattice and keep the best probe.
  Vector anchor = domain.project(anchor_point);
  double shift = prior.density(anchor) > 0.0
                     ? anchor_value
                     : -std::numeric_limits<double>::infinity();
  const int lattice = 17;
  Vector probe(domain.dim());
  const Vector widths = domain.widths();
  const auto scan = [&](auto&& self, int coord) -> void {
    if (coord == domain.dim()) {
      if (prior.density(probe) <= 0.0) return;
      const double lf = log_f(probe);
      if (lf > shift) {
        shift = lf;
        anchor = probe;
      }
      return;
    }
    for (int i = 0; i < lattice; ++i) {
      probe[coord] =
          domain.lower[coord] + widths[coord] * (i + 0.5) / lattice;
      self(self, coord + 1);
    }
  };
  scan(scan, 0);
  if (!std::isfinite(shift))
    throw NumericError(
        "log_integral_exp: prior support carries no finite integrand mass",
        shift);

  const auto shifted = [&](const Vector& theta) {
    const double w = prior.density(theta);
    if (!(w > 0.0)) return 0.0;
    const double lf = log_f(theta);
    if (!std::isfinite(lf) && lf > 0)
      throw NumericError("log_integral_exp: +inf integrand", lf);
    return std::exp(lf - shift) * w;
  };
  double integral = 0.0;
  if (domain.dim() == 1) {
    integral = integrate_adaptive(
        [&](double x) { return shifted(Vector::Constant(1, x)); },
        graded_edges(log_f, anchor, shift, 0, domain), opts);
  } else {
    integral = integrate_adaptive_2d(
        [&](double x, double y) {
          Vector t(2);
          t << x, y;
          return shifted(t);
        },
        graded_edges(log_f, anchor, shift, 0, domain),
        graded_edges(log_f, anchor, shift, 1, domain), opts);
  }
  if (!(integral > 0.0))
    throw NumericError("log_integral_exp: integral underflowed to zero",
                       integral);
  return shift + std::log(integral);
}

double log_marginal_scale(const Path& path, const CoefficientFunction& scale,
                          const ParameterDomain& domain,
                          const PriorDensity& prior, const FitOptions& opts) {
  if (domain.dim() > 2)
    throw UnsupportedDimensionError("log_marginal_scale supports dim <= 2");
  const ScaleFit fit = fit_scale(path, scale, domain, opts);
  const ScaleContrastEvaluator contrast(path, scale);
  return log_integral_exp(
      [&](const Vector& gamma) {
        try {
          return contrast(gamma);
        } catch (const DegenerateScaleError&) {
          return -std::numeric_limits<double>::infinity();
        }
      },
      domain, prior, fit.gamma_hat, fit.g1_at_max);
}

double log_marginal_drift(const Path& path, const CoefficientFunction& drift,
                          const ParameterDomain& domain,
                          const PriorDensity& prior,
                          const CoefficientFunction& scale,
                          const Vector& gamma_hat, const FitOptions& opts) {
  if (domain.dim() > 2)
    throw UnsupportedDimensionError("log_marginal_drift supports dim <= 2");
  const DriftFit fit = fit_drift(path, drift, domain, scale, gamma_hat, opts);
  const DriftContrastEvaluator contrast(path, drift, scale, gamma_hat);
  return log_integral_exp(
      [&](const Vector& alpha) { return contrast(alpha); }, domain, prior,
      fit.alpha_hat, fit.g2_at_max);
}

namespace {

double expansion_prediction(double g_at_max, int p, double log_rate,
                            double prior_at_star, const Matrix& fisher) {
  if (p == 0) return g_at_max;
  if (fisher.rows() != p || fisher.cols() != p)
    throw std::invalid_argument("expansion_prediction: fisher size mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(fisher);
  if (solver.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument(
        "expansion_prediction: fisher matrix must be positive definite");
  const double log_det = solver.eigenvalues().array().log().sum();
  return g_at_max - 0.5 * p * log_rate + std::log(prior_at_star) +
         0.5 * p * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
}

}  // namespace

double expansion_prediction_scale(double g1_at_max, int p_gamma, std::size_t n,
                                  double prior_at_star, const Matrix& fisher) {
  return expansion_prediction(g1_at_max, p_gamma,
                              std::log(static_cast<double>(n)), prior_at_star,
                              fisher);
}

double expansion_prediction_drift(double g2_at_max, int p_alpha, double T,
                                  double prior_at_star, const Matrix& fisher) {
  if (!(T > 0.0))
    throw std::invalid_argument("expansion_prediction_drift: T must be > 0");
  return expansion_prediction(g2_at_max, p_alpha, std::log(T), prior_at_star,
                              fisher);
}

}  // namespace sdeqbic
