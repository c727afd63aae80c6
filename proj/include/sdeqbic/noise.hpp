#pragma once

#include "sdeqbic/rng.hpp"
#include "sdeqbic/types.hpp"

namespace sdeqbic {

/// Driving-noise law for the SDE: standard Wiener, or a normal-inverse
/// Gaussian Levy process with L(Z_t) = NIG(alpha, beta, delta_rate*t,
/// mu_rate*t).
struct NoiseSpec {
  enum class Kind { Wiener, Nig };

  Kind kind = Kind::Wiener;
  double alpha = 0.0;
  double beta = 0.0;
  double delta_rate = 0.0;
  double mu_rate = 0.0;

  static NoiseSpec wiener() { return NoiseSpec{}; }
  static NoiseSpec nig(double alpha, double beta, double delta_rate,
                       double mu_rate);

  /// E[Z_1]: 0 for Wiener, mu + delta*beta/sqrt(alpha^2-beta^2) for NIG.
  double mean_rate() const;
  /// Var[Z_1]: 1 for Wiener, delta*alpha^2/(alpha^2-beta^2)^{3/2} for NIG.
  double variance_rate() const;

  void validate() const;
};

/// n i.i.d. N(0, h) increments of a standard Wiener process.
Vector wiener_increments(const SamplingScheme& scheme, Rng& rng);
Vector wiener_increments(const SamplingScheme& scheme, RngStream stream);

/// One draw from InverseGaussian(mean, shape) via the Michael-Schucany-Haas
/// transform. Strictly positive.
double inverse_gaussian_sample(double mean, double shape, Rng& rng);

/// n i.i.d. NIG(alpha, beta, delta_rate*h, mu_rate*h) increments as a normal
/// variance-mean mixture over an inverse-Gaussian subordinator.
Vector nig_increments(const NoiseSpec& spec, const SamplingScheme& scheme,
                      Rng& rng);
Vector nig_increments(const NoiseSpec& spec, const SamplingScheme& scheme,
                      RngStream stream);

/// Increments under whichever law `spec` prescribes.
Vector noise_increments(const NoiseSpec& spec, const SamplingScheme& scheme,
                        Rng& rng);

}  // namespace sdeqbic
