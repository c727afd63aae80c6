#pragma once

#include "sdeqbic/gql.hpp"
#include "sdeqbic/quadrature.hpp"
#include "sdeqbic/types.hpp"

#include <functional>

namespace sdeqbic {

/// Prior over a parameter box; continuous, bounded by sup_bound, zero
/// outside the domain by convention.
struct PriorDensity {
  std::function<double(const Vector&)> density;
  double sup_bound = 0.0;
};

/// Uniform prior 1/vol(box).
PriorDensity uniform_prior(const ParameterDomain& domain);

/// Checks the prior integrates to 1 over the domain within 1e-6; throws
/// std::invalid_argument otherwise. Supports dim <= 2.
void validate_prior(const PriorDensity& prior, const ParameterDomain& domain);

/// log Int_domain exp(log_f(theta)) * prior(theta) dtheta, computed on the
/// max-shifted scale: the integrand is evaluated as exp(log_f - shift) so a
/// sharply peaked log_f cannot underflow. The caller supplies the maximizer
/// and maximum of log_f as the anchor; a coarse lattice scan over the prior's
/// support refines both before the anchored adaptive quadrature runs (this
/// keeps priors supported away from the peak integrable). Dimensions above 2
/// raise UnsupportedDimensionError.
double log_integral_exp(const std::function<double(const Vector&)>& log_f,
                        const ParameterDomain& domain,
                        const PriorDensity& prior, const Vector& anchor_point,
                        double anchor_value, const AdaptiveOptions& opts = {});

/// log Int exp(G1_n(gamma)) pi_1(gamma) dgamma. Fits gamma_hat internally to
/// anchor the shift.
double log_marginal_scale(const Path& path, const CoefficientFunction& scale,
                          const ParameterDomain& domain,
                          const PriorDensity& prior,
                          const FitOptions& opts = {});

/// log Int exp(G2_n(alpha)) pi_2(alpha) dalpha given the step-one scale.
double log_marginal_drift(const Path& path, const CoefficientFunction& drift,
                          const ParameterDomain& domain,
                          const PriorDensity& prior,
                          const CoefficientFunction& scale,
                          const Vector& gamma_hat,
                          const FitOptions& opts = {});

/// The deterministic part of the scale-step stochastic expansion:
///   g1 - (p/2) log n + log prior(theta*) + (p/2) log 2pi - (1/2) log det I.
/// Requires a positive-definite Fisher matrix; p = 0 returns g1.
double expansion_prediction_scale(double g1_at_max, int p_gamma, std::size_t n,
                                  double prior_at_star, const Matrix& fisher);

/// Same with the drift rate: the log n penalty becomes log T.
double expansion_prediction_drift(double g2_at_max, int p_alpha, double T,
                                  double prior_at_star, const Matrix& fisher);

}  // namespace sdeqbic
