#pragma once

#include "sdeqbic/noise.hpp"
#include "sdeqbic/rng.hpp"
#include "sdeqbic/types.hpp"

namespace sdeqbic {

/// The data-generating SDE dX = A(X)dt + C(X-)dZ with fixed coefficients.
struct TrueModel {
  std::function<double(double)> drift_fn;  ///< A
  std::function<double(double)> scale_fn;  ///< C
  NoiseSpec noise;
  double x0 = 0.0;
  std::string label;
};

struct SimulateOptions {
  double burn_in = 0.0;       ///< warm-up horizon discarded before t = 0
  double blowup_bound = 1e12; ///< |X| above this raises SimulationBlowupError
};

/// Euler-Maruyama on the refined grid of step h/refine with left-point drift
/// and scale (the pre-jump state multiplies the increment), subsampled back
/// to the observation grid. Deterministic in (model, scheme, refine, stream).
Path euler_path(const TrueModel& model, const SamplingScheme& scheme,
                int refine, RngStream stream, const SimulateOptions& opts = {});

/// Exact-in-law Ornstein-Uhlenbeck simulation of dX = -theta X dt + sigma dW
/// via the Gaussian transition. Discretization-bias oracle for euler_path.
Path exact_ou_path(double theta, double sigma, const SamplingScheme& scheme,
                   double x0, RngStream stream);

}  // namespace sdeqbic
