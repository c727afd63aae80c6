#include "sdeqbic/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace sdeqbic {

NoiseSpec NoiseSpec::nig(double alpha, double beta, double delta_rate,
                         double mu_rate) {
  NoiseSpec s;
  s.kind = Kind::Nig;
  s.alpha = alpha;
  s.beta = beta;
  s.delta_rate = delta_rate;
  s.mu_rate = mu_rate;
  s.validate();
  return s;
}

void NoiseSpec::validate() const {
  if (kind == Kind::Wiener) return;
  if (!(alpha > 0.0)) throw std::invalid_argument("NIG: need alpha > 0");
  if (!(std::abs(beta) < alpha))
    throw std::invalid_argument("NIG: need |beta| < alpha");
  if (!(delta_rate > 0.0))
    throw std::invalid_argument("NIG: need delta_rate > 0");
  if (!std::isfinite(mu_rate))
    throw std::invalid_argument("NIG: mu_rate must be finite");
}

double NoiseSpec::mean_rate() const {
  if (kind == Kind::Wiener) return 0.0;
  const double gbar = std::sqrt(alpha * alpha - beta * beta);
  return mu_rate + delta_rate * beta / gbar;
}

double NoiseSpec::variance_rate() const {
  if (kind == Kind::Wiener) return 1.0;
  const double gbar = std::sqrt(alpha * alpha - beta * beta);
  return delta_rate * alpha * alpha / (gbar * gbar * gbar);
}

Vector wiener_increments(const SamplingScheme& scheme, Rng& rng) {
  scheme.validate();
  const double sd = std::sqrt(scheme.h);
  Vector out(static_cast<Eigen::Index>(scheme.n));
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] = sd * rng.normal();
  return out;
}

Vector wiener_increments(const SamplingScheme& scheme, RngStream stream) {
  Rng rng(stream);
  return wiener_increments(scheme, rng);
}

double inverse_gaussian_sample(double mean, double shape, Rng& rng) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw std::invalid_argument(
        "inverse_gaussian_sample: mean and shape must be positive");
  const double nu = rng.normal();
  const double y = nu * nu;
  const double x = mean + mean * mean * y / (2.0 * shape) -
                   mean / (2.0 * shape) *
                       std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  const double u = rng.uniform();
  double draw = (u <= mean / (mean + x)) ? x : mean * mean / x;
  // Guard against a catastrophic-cancellation zero for tiny mean*shape.
  if (!(draw > 0.0)) draw = std::numeric_limits<double>::min();
  return draw;
}

Vector nig_increments(const NoiseSpec& spec, const SamplingScheme& scheme,
                      Rng& rng) {
  if (spec.kind != NoiseSpec::Kind::Nig)
    throw std::invalid_argument("nig_increments: spec is not NIG");
  spec.validate();
  scheme.validate();
  const double gbar = std::sqrt(spec.alpha * spec.alpha - spec.beta * spec.beta);
  const double delta_h = spec.delta_rate * scheme.h;
  const double ig_mean = delta_h / gbar;
  const double ig_shape = delta_h * delta_h;
  const double drift_h = spec.mu_rate * scheme.h;
  Vector out(static_cast<Eigen::Index>(scheme.n));
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const double v = inverse_gaussian_sample(ig_mean, ig_shape, rng);
    out[j] = drift_h + spec.beta * v + std::sqrt(v) * rng.normal();
  }
  return out;
}

Vector nig_increments(const NoiseSpec& spec, const SamplingScheme& scheme,
                      RngStream stream) {
  Rng rng(stream);
  return nig_increments(spec, scheme, rng);
}

Vector noise_increments(const NoiseSpec& spec, const SamplingScheme& scheme,
                        Rng& rng) {
  return spec.kind == NoiseSpec::Kind::Wiener
             ? wiener_increments(scheme, rng)
             : nig_increments(spec, scheme, rng);
}

}  // namespace sdeqbic
