#include "sdeqbic/errors.hpp"
#include "sdeqbic/harness.hpp"
#include "sdeqbic/io.hpp"
#include "sdeqbic/limits.hpp"
#include "sdeqbic/marginal.hpp"
#include "sdeqbic/registry.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

using namespace sdeqbic;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

std::vector<SamplingScheme> parse_schemes(
    const std::vector<std::string>& specs) {
  std::vector<SamplingScheme> out;
  for (const auto& spec : specs) {
    double h = 0.0, T = 0.0;
    if (std::sscanf(spec.c_str(), "%lf,%lf", &h, &T) != 2)
      throw std::invalid_argument("--scheme expects h,T (e.g. 0.01,50)");
    const auto n = static_cast<std::size_t>(std::llround(T / h));
    out.push_back(make_scheme(n, h));
    if (out.back().high_frequency_warning())
      std::cerr << "warning: scheme h=" << h << ",T=" << T << " has n*h^2 = "
                << static_cast<double>(n) * h * h
                << " >= 0.5; the high-frequency asymptotics are doubtful\n";
  }
  return out;
}

int cmd_run(const std::string& config_file, const std::string& experiment,
            long replicates, long seed, long workers,
            const std::string& output, const std::vector<std::string>& schemes,
            long refine, bool record_replicates) {
  ExperimentConfig config;
  if (!config_file.empty()) {
    config = config_from_file(config_file);
  } else if (!experiment.empty()) {
    config = config_from_experiment(find_experiment(experiment));
  } else {
    std::cerr << "run: need --config or --experiment\n";
    return kExitUsage;
  }
  if (replicates > 0) config.replicates = static_cast<std::size_t>(replicates);
  if (seed >= 0) config.base_seed = static_cast<std::uint64_t>(seed);
  if (workers >= 0) config.workers = static_cast<unsigned>(workers);
  if (!output.empty()) config.output_dir = output;
  if (!schemes.empty()) config.schemes = parse_schemes(schemes);
  if (refine > 0) config.refine = static_cast<int>(refine);
  config.record_replicates = record_replicates;
  if (config.output_dir.empty()) config.output_dir = "out";

  const AggregateReport report = run_experiment(config);
  for (const auto& agg : report.per_scheme) {
    std::cout << agg.label() << ": " << agg.successes << " replicates";
    if (agg.failures > 0) std::cout << " (" << agg.failures << " failed)";
    std::cout << "\n";
    Eigen::Index best_a = 0, best_b = 0;
    agg.counts.maxCoeff(&best_a, &best_b);
    std::cout << "  modal selection (m1,m2) = (" << best_a + 1 << ","
              << best_b + 1 << ") with count " << agg.counts(best_a, best_b)
              << "\n";
  }
  std::cout << "outputs written to " << config.output_dir << " in "
            << std::fixed << std::setprecision(1) << report.wall_seconds
            << "s\n";
  return kExitOk;
}

int cmd_limits(const std::string& experiment_name, long seed, long gh_nodes,
               const std::string& json_out) {
  const Experiment& experiment = find_experiment(experiment_name);
  StationaryDistribution pi0 = experiment_pi0(
      experiment, seed >= 0 ? static_cast<std::uint64_t>(seed) : 0x9120);
  if (gh_nodes > 0) pi0.gh_nodes = static_cast<int>(gh_nodes);
  const LimitReport report =
      optimal_model(experiment.candidates, experiment.truth, pi0);

  std::cout << "optimal scale contrasts G1*\n";
  for (std::size_t i = 0; i < experiment.candidates.m1(); ++i) {
    std::cout << "  " << std::left << std::setw(14)
              << experiment.candidates.scales[i].name << std::right
              << std::fixed << std::setprecision(4)
              << report.g1_star[static_cast<Eigen::Index>(i)]
              << (i == report.m1_star ? "  *" : "") << "\n";
  }
  std::cout << "optimal drift contrasts G2* (given "
            << experiment.candidates.scales[report.m1_star].name << ")\n";
  for (std::size_t i = 0; i < experiment.candidates.m2(); ++i) {
    std::cout << "  " << std::left << std::setw(14)
              << experiment.candidates.drifts[i].name << std::right
              << std::fixed << std::setprecision(4)
              << report.g2_star[static_cast<Eigen::Index>(i)]
              << (i == report.m2_star ? "  *" : "") << "\n";
  }
  std::cout << "optimal model: ("
            << experiment.candidates.scales[report.m1_star].name << ", "
            << experiment.candidates.drifts[report.m2_star].name << ")\n";
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    out << to_json(report, experiment.candidates).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_verify_expansion(const std::string& experiment_name,
                         const std::string& candidate,
                         const std::string& component,
                         const std::vector<std::string>& scheme_specs,
                         long replicates, long seed, long workers,
                         const std::string& output) {
  const Experiment& experiment = find_experiment(experiment_name);
  std::vector<SamplingScheme> schemes = scheme_specs.empty()
                                            ? experiment.default_schemes
                                            : parse_schemes(scheme_specs);
  const auto rows = verify_expansion(
      experiment, candidate, component, schemes,
      replicates > 0 ? static_cast<std::size_t>(replicates) : 100,
      seed >= 0 ? static_cast<std::uint64_t>(seed) : 0xE4A,
      workers >= 0 ? static_cast<unsigned>(workers) : 0);
  write_expansion_csv(rows, output);
  std::cout << rows.size() << " rows written to " << output << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& experiment_name, const std::string& scheme,
                 long seed, long stream, long refine,
                 const std::string& output) {
  const Experiment& experiment = find_experiment(experiment_name);
  const SamplingScheme s = scheme.empty() ? experiment.default_schemes.front()
                                          : parse_schemes({scheme}).front();
  const Path path = euler_path(
      experiment.truth, s, refine > 0 ? static_cast<int>(refine) : 10,
      RngStream{seed >= 0 ? static_cast<std::uint64_t>(seed) : 1,
                stream >= 0 ? static_cast<std::uint64_t>(stream) : 0});
  save_path_csv(path, output);
  std::cout << "path with n=" << s.n << " written to " << output << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& path_file, const std::string& scale_name,
            const std::string& drift_name) {
  const Path path = load_path_csv(path_file);
  const ScaleCandidate& scale = find_scale(scale_name);
  const DriftCandidate& drift = find_drift(drift_name);
  ModelSpec model{drift.fn, drift.domain, scale.fn, scale.domain,
                  scale.name + "+" + drift.name};
  const FitResult fit = fit_model(path, model);
  std::cout << to_json(fit).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model selection for ergodic SDEs by stepwise Gaussian "
               "quasi-likelihood and QBIC"};
  app.require_subcommand(1);

  std::string config_file, experiment, output, candidate, component = "scale";
  std::string path_file, scale_name, drift_name, scheme, json_out;
  std::vector<std::string> schemes;
  long replicates = -1, seed = -1, workers = -1, refine = -1, gh_nodes = -1;
  long stream = -1;
  bool record_replicates = false;

  auto* run = app.add_subcommand("run", "Run a Monte Carlo selection experiment");
  run->add_option("--config", config_file, "JSON config file");
  run->add_option("--experiment", experiment, "registered experiment name");
  run->add_option("--replicates", replicates, "replicates per scheme");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--workers", workers, "worker threads (0 = auto)");
  run->add_option("--output", output, "output directory");
  run->add_option("--scheme", schemes, "sampling scheme h,T (repeatable)");
  run->add_option("--refine", refine, "Euler refinement factor");
  run->add_flag("--record-replicates", record_replicates,
                "write per-replicate reports");

  auto* limits = app.add_subcommand(
      "limits", "Print the limit contrasts and the optimal model");
  limits->add_option("--experiment", experiment)->required();
  limits->add_option("--seed", seed, "seed of the empirical pi0 path");
  limits->add_option("--gh-nodes", gh_nodes, "Gauss-Hermite node count");
  limits->add_option("--json", json_out, "also write a JSON report");

  auto* verify = app.add_subcommand(
      "verify-expansion",
      "Compare quadrature log-marginals with the expansion prediction");
  verify->add_option("--experiment", experiment)->required();
  verify->add_option("--candidate", candidate)->required();
  verify->add_option("--component", component, "scale or drift");
  verify->add_option("--scheme", schemes, "sampling scheme h,T (repeatable)");
  verify->add_option("--replicates", replicates);
  verify->add_option("--seed", seed);
  verify->add_option("--workers", workers);
  verify->add_option("--output", output, "CSV output file")->required();

  auto* simulate = app.add_subcommand("simulate",
                                      "Simulate one path and write it as CSV");
  simulate->add_option("--experiment", experiment)->required();
  simulate->add_option("--scheme", scheme, "sampling scheme h,T");
  simulate->add_option("--seed", seed);
  simulate->add_option("--stream", stream, "stream id");
  simulate->add_option("--refine", refine);
  simulate->add_option("--output", output, "CSV output file")->required();

  auto* fit = app.add_subcommand("fit", "Fit one candidate model to a path");
  fit->add_option("--path", path_file, "path CSV")->required();
  fit->add_option("--scale", scale_name, "scale candidate name")->required();
  fit->add_option("--drift", drift_name, "drift candidate name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed())
      return cmd_run(config_file, experiment, replicates, seed, workers,
                     output, schemes, refine, record_replicates);
    if (limits->parsed())
      return cmd_limits(experiment, seed, gh_nodes, json_out);
    if (verify->parsed())
      return cmd_verify_expansion(experiment, candidate, component, schemes,
                                  replicates, seed, workers, output);
    if (simulate->parsed())
      return cmd_simulate(experiment, scheme, seed, stream, refine, output);
    if (fit->parsed()) return cmd_fit(path_file, scale_name, drift_name);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
