#pragma once

#include "sdeqbic/gql.hpp"
#include "sdeqbic/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sdeqbic {

/// Scale-step criterion in the -2-scaled convention: -2 G1_n(gamma_hat) +
/// p_gamma log n. Smaller is better.
double qbic_scale(double g1_at_max, int p_gamma, std::size_t n);

/// Drift-step criterion: -2 G2_n(alpha_hat) + p_alpha log T. Requires T > 0.
double qbic_drift(double g2_at_max, int p_alpha, double T);

/// Burnham-Anderson style weights of the two-step criteria, in percent.
/// qbic1 has one entry per scale candidate, qbic2 one row per scale and one
/// column per drift; +infinity marks an excluded candidate and yields zero
/// weight. Entries sum to 100.
Matrix model_weights(const Vector& qbic1, const Matrix& qbic2);

struct CandidateFailure {
  std::size_t scale_index = 0;                 // 0-based
  std::optional<std::size_t> drift_index;      // 0-based, empty for step one
  std::string message;
};

/// Everything stepwise_select produces for one path.
struct QbicReport {
  Vector qbic1;                 // per scale candidate
  Matrix qbic2;                 // [scale][drift], full conditional grid
  std::size_t selected_scale = 0;  // 0-based index m1_hat
  std::size_t selected_drift = 0;  // 0-based index m2_hat
  Matrix weights;               // percent, sums to 100
  std::vector<std::optional<ScaleFit>> scale_fits;
  std::vector<std::vector<std::optional<DriftFit>>> drift_fits;
  std::vector<CandidateFailure> failures;
};

struct SelectOptions {
  FitOptions fit;
};

/// The stepwise procedure: fit every scale candidate and pick the qbic1
/// argmin, then fit every drift candidate under the selected scale and pick
/// the qbic2 argmin. The conditional qbic2 grid is filled for every scale row
/// because the weight formula needs it. A failing candidate is excluded with
/// an infinite criterion instead of aborting. Argmin ties resolve by smaller
/// parameter dimension, then lower index.
QbicReport stepwise_select(const Path& path, const CandidateSet& candidates,
                           const SelectOptions& opts = {});

}  // namespace sdeqbic
