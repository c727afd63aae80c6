#pragma once

#include "sdeqbic/qbic.hpp"
#include "sdeqbic/registry.hpp"
#include "sdeqbic/simulate.hpp"
#include "sdeqbic/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace sdeqbic {

/// Full description of a Monte Carlo selection experiment.
struct ExperimentConfig {
  TrueModel truth;
  CandidateSet candidates;
  std::vector<SamplingScheme> schemes;
  std::size_t replicates = 200;
  std::uint64_t base_seed = 1;
  int refine = 10;
  std::string output_dir;     ///< empty = no files written
  unsigned workers = 0;       ///< 0 = auto (env SDE_QBIC_WORKERS, then cores)
  bool record_replicates = false;
  SelectOptions select;
  /// Text the journal fingerprint is derived from; identifies the
  /// determinism-relevant part of the config.
  std::string fingerprint_source;

  void validate() const;
};

/// Parses the JSON config schema. `truth` and `candidates` may be registry
/// names ("diffusion-4.1", "nig-4.2") or, for the truth, an inline object;
/// `experiment` sets both at once. Schemes are {"h": .., "T": ..} pairs with
/// integer T/h.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig config_from_file(const std::filesystem::path& file);
/// Config prefilled from a registered experiment.
ExperimentConfig config_from_experiment(const Experiment& experiment);

struct SchemeAggregate {
  SamplingScheme scheme;
  Eigen::MatrixXi counts;  ///< selection frequency of (m1, m2)
  Matrix mean_weights;     ///< mean weight matrix over successful replicates
  std::size_t successes = 0;
  std::size_t failures = 0;

  std::string label() const;
  double frequency(std::size_t m1, std::size_t m2) const;  // 0-based
};

struct AggregateReport {
  std::vector<SchemeAggregate> per_scheme;
  std::size_t failures_total = 0;
  std::size_t skipped_from_journal = 0;
  double wall_seconds = 0.0;  ///< not part of the persisted aggregates
};

/// Runs replicates x schemes, one independent stream per replicate
/// (stream_id = hash(scheme index, replicate)), aggregates the selections and
/// weights, and persists frequencies.csv / weights.csv / journal.jsonl under
/// output_dir. Completed replicates found in an existing journal with a
/// matching fingerprint are not recomputed. Deterministic in (config,
/// base_seed) and independent of the worker count. Throws when more than 5%
/// of replicates fail.
AggregateReport run_experiment(const ExperimentConfig& config);

/// Worker resolution: explicit value, else SDE_QBIC_WORKERS, else hardware
/// concurrency.
unsigned resolve_workers(unsigned requested);

/// Bounded-pool parallel loop over [0, count); rethrows the first uncaught
/// exception after all workers join.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

/// One row of the expansion-verification CSV.
struct ExpansionRow {
  std::size_t n = 0;
  std::size_t replicate = 0;
  double log_marginal = 0.0;
  double prediction = 0.0;
  double residual = 0.0;
};

/// Simulates `replicates` paths per scheme under the experiment's truth and
/// compares the quadrature log-marginal of one candidate against the
/// stochastic-expansion prediction (population Fisher matrix, uniform prior
/// on the candidate box). component = "scale" or "drift"; drift marginals
/// condition on the limit-optimal scale fitted per path.
std::vector<ExpansionRow> verify_expansion(
    const Experiment& experiment, const std::string& candidate_name,
    const std::string& component, const std::vector<SamplingScheme>& schemes,
    std::size_t replicates, std::uint64_t seed, unsigned workers = 0,
    int refine = 10);

void write_expansion_csv(const std::vector<ExpansionRow>& rows,
                         const std::filesystem::path& file);

}  // namespace sdeqbic
