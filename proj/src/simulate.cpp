#include "sdeqbic/simulate.hpp"

#include "sdeqbic/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sdeqbic {

namespace {

std::string noise_label(const NoiseSpec& s) {
  if (s.kind == NoiseSpec::Kind::Wiener) return "wiener";
  std::ostringstream os;
  os << "nig(" << s.alpha << "," << s.beta << "," << s.delta_rate << ","
     << s.mu_rate << ")";
  return os.str();
}

}  // namespace

Path euler_path(const TrueModel& model, const SamplingScheme& scheme,
                int refine, RngStream stream, const SimulateOptions& opts) {
  scheme.validate();
  model.noise.validate();
  if (refine < 1) throw std::invalid_argument("euler_path: refine must be >= 1");
  if (!model.drift_fn || !model.scale_fn)
    throw std::invalid_argument("euler_path: model coefficients must be set");

  const double fine_h = scheme.h / refine;
  const std::size_t burn_steps =
      opts.burn_in > 0.0
          ? static_cast<std::size_t>(std::ceil(opts.burn_in / fine_h))
          : 0;
  const std::size_t fine_n = scheme.n * static_cast<std::size_t>(refine);

  Rng rng(stream);
  SamplingScheme fine{fine_n + burn_steps, fine_h,
                      static_cast<double>(fine_n + burn_steps) * fine_h};
  const Vector dz = noise_increments(model.noise, fine, rng);

  Path out;
  out.scheme = scheme;
  out.values.resize(static_cast<Eigen::Index>(scheme.n) + 1);
  out.meta = PathMeta{stream.seed, stream.stream_id, model.label,
                      noise_label(model.noise)};

  double x = model.x0;
  std::size_t coarse = 0;
  if (burn_steps == 0) out.values[0] = x;
  for (std::size_t k = 0; k < fine.n; ++k) {
    x += model.drift_fn(x) * fine_h + model.scale_fn(x) * dz[static_cast<Eigen::Index>(k)];
    if (!std::isfinite(x) || std::abs(x) > opts.blowup_bound) {
      const std::size_t bad = k >= burn_steps
                                  ? (k - burn_steps) / refine
                                  : 0;
      std::ostringstream os;
      os << "euler_path: state blew up near observation index " << bad
         << " (fine step " << k << ")";
      throw SimulationBlowupError(bad, os.str());
    }
    if (k + 1 < burn_steps) continue;
    if (k + 1 == burn_steps) {
      out.values[0] = x;
      continue;
    }
    const std::size_t since_start = k + 1 - burn_steps;
    if (since_start % refine == 0) {
      ++coarse;
      out.values[static_cast<Eigen::Index>(coarse)] = x;
    }
  }
  out.validate();
  return out;
}

Path exact_ou_path(double theta, double sigma, const SamplingScheme& scheme,
                   double x0, RngStream stream) {
  if (!(theta > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("exact_ou_path: need theta > 0 and sigma > 0");
  scheme.validate();
  Rng rng(stream);
  const double decay = std::exp(-theta * scheme.h);
  const double sd =
      sigma * std::sqrt((1.0 - decay * decay) / (2.0 * theta));
  Path out;
  out.scheme = scheme;
  out.values.resize(static_cast<Eigen::Index>(scheme.n) + 1);
  out.meta = PathMeta{stream.seed, stream.stream_id, "exact-ou", "wiener"};
  double x = x0;
  out.values[0] = x;
  for (std::size_t j = 1; j <= scheme.n; ++j) {
    x = x * decay + sd * rng.normal();
    out.values[static_cast<Eigen::Index>(j)] = x;
  }
  return out;
}

}  // namespace sdeqbic
