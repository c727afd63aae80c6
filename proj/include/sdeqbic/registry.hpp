#pragma once

#include "sdeqbic/limits.hpp"
#include "sdeqbic/simulate.hpp"
#include "sdeqbic/types.hpp"

#include <string>
#include <vector>

namespace sdeqbic {

/// Drift that is linear in its parameters:
///   a(x, alpha) = sum_k alpha_k phi_k(x) + phi_0(x).
CoefficientFunction make_linear_drift(
    std::vector<std::function<double(double)>> phis,
    std::function<double(double)> phi0 = nullptr);

/// Scale of the exponential-rational family
///   c(x, gamma) = exp{ (sum_k gamma_k b_k(x) + b_0(x)) / (1 + x^2) },
/// with analytic derivatives and the affine log-square fast path.
CoefficientFunction make_exp_rational_scale(
    std::vector<std::function<double(double)>> basis,
    std::function<double(double)> fixed = nullptr);

/// A shipped experiment: the data-generating model, its candidate set, the
/// default sampling schemes, and how to obtain pi_0 for the limit oracle.
struct Experiment {
  std::string name;
  TrueModel truth;
  CandidateSet candidates;
  std::vector<SamplingScheme> default_schemes;
  bool pi0_closed_form = false;  ///< standard normal when true
  /// Empirical pi_0 recipe (used when pi0_closed_form is false).
  double pi0_T = 5000.0;
  double pi0_h = 0.01;
  int pi0_refine = 10;
  double pi0_burn_in = 100.0;
};

/// Candidate lookups by registered name ("scale1".."scale7",
/// "drift1".."drift3", "levy-scale1".."levy-scale4",
/// "levy-drift1".."levy-drift3"). Throws std::invalid_argument on unknown
/// names.
const ScaleCandidate& find_scale(const std::string& name);
const DriftCandidate& find_drift(const std::string& name);

/// Registered experiments: "diffusion-4.1" and "nig-4.2".
const Experiment& find_experiment(const std::string& name);
std::vector<std::string> experiment_names();

/// The stationary law for an experiment's limit oracle: the standard normal
/// for closed-form experiments, otherwise a long simulated path under the
/// experiment's truth with the given seed.
StationaryDistribution experiment_pi0(const Experiment& experiment,
                                      std::uint64_t seed = 0x9120);

}  // namespace sdeqbic
