#include "sdeqbic/harness.hpp"

#include "sdeqbic/errors.hpp"
#include "sdeqbic/io.hpp"
#include "sdeqbic/limits.hpp"
#include "sdeqbic/marginal.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace sdeqbic {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kReplicateTag = 0x5DE0C0DE;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

SamplingScheme scheme_from_pair(double h, double T) {
  const double ratio = T / h;
  const auto n = static_cast<std::size_t>(std::llround(ratio));
  if (n < 2 || std::abs(static_cast<double>(n) * h - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("scheme: T/h must be an integer >= 2");
  return make_scheme(n, h);
}

TrueModel truth_from_json(const json& j) {
  if (j.is_string()) return find_experiment(j.get<std::string>()).truth;
  TrueModel truth;
  const json& drift = j.at("drift");
  const std::string drift_type = drift.at("type").get<std::string>();
  if (drift_type == "linear") {
    const double slope = drift.at("slope").get<double>();
    const double intercept = drift.value("intercept", 0.0);
    truth.drift_fn = [slope, intercept](double x) {
      return slope * x + intercept;
    };
  } else if (drift_type == "zero") {
    truth.drift_fn = [](double) { return 0.0; };
  } else {
    throw std::invalid_argument("truth: unknown drift type '" + drift_type +
                                "'");
  }
  const json& scale = j.at("scale");
  const std::string scale_type = scale.at("type").get<std::string>();
  if (scale_type == "constant") {
    const double value = scale.at("value").get<double>();
    truth.scale_fn = [value](double) { return value; };
  } else if (scale_type == "rational-decay") {
    const double value = scale.at("value").get<double>();
    truth.scale_fn = [value](double x) { return value / (1.0 + x * x); };
  } else {
    throw std::invalid_argument("truth: unknown scale type '" + scale_type +
                                "'");
  }
  truth.noise = j.contains("noise") ? noise_from_json(j.at("noise"))
                                    : NoiseSpec::wiener();
  truth.x0 = j.value("x0", 0.0);
  truth.label = j.value("label", std::string("inline"));
  return truth;
}

unsigned workers_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "auto") return 0;
    throw std::invalid_argument("config: workers must be a count or \"auto\"");
  }
  return j.get<unsigned>();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replicates < 1)
    throw std::invalid_argument("config: replicates must be >= 1");
  if (refine < 1) throw std::invalid_argument("config: refine must be >= 1");
  if (schemes.empty())
    throw std::invalid_argument("config: need at least one scheme");
  for (const auto& s : schemes) s.validate();
  candidates.validate();
  if (!truth.drift_fn || !truth.scale_fn)
    throw std::invalid_argument("config: truth coefficients unset");
}

ExperimentConfig config_from_experiment(const Experiment& experiment) {
  ExperimentConfig config;
  config.truth = experiment.truth;
  config.candidates = experiment.candidates;
  config.schemes = experiment.default_schemes;
  config.fingerprint_source = "experiment:" + experiment.name;
  return config;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig config;
  std::string truth_desc, candidates_desc;
  if (j.contains("experiment")) {
    const auto& experiment =
        find_experiment(j.at("experiment").get<std::string>());
    config = config_from_experiment(experiment);
    truth_desc = candidates_desc = experiment.name;
  }
  if (j.contains("truth")) {
    config.truth = truth_from_json(j.at("truth"));
    truth_desc = j.at("truth").dump();
  }
  if (j.contains("candidates")) {
    const std::string name = j.at("candidates").get<std::string>();
    config.candidates = find_experiment(name).candidates;
    candidates_desc = name;
  }
  if (truth_desc.empty() || config.candidates.scales.empty())
    throw std::invalid_argument(
        "config: need \"experiment\" or \"truth\"+\"candidates\"");
  if (j.contains("schemes")) {
    config.schemes.clear();
    for (const auto& s : j.at("schemes"))
      config.schemes.push_back(
          scheme_from_pair(s.at("h").get<double>(), s.at("T").get<double>()));
  }
  config.replicates = j.value("replicates", config.replicates);
  config.base_seed = j.value("base_seed", config.base_seed);
  config.refine = j.value("refine", config.refine);
  config.output_dir = j.value("output_dir", config.output_dir);
  if (j.contains("workers")) config.workers = workers_from_json(j.at("workers"));
  config.record_replicates =
      j.value("record_replicates", config.record_replicates);
  config.fingerprint_source =
      "truth=" + truth_desc + ";candidates=" + candidates_desc;
  config.validate();
  return config;
}

ExperimentConfig config_from_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in)
    throw std::invalid_argument("config: cannot open " + file.string());
  json j;
  in >> j;
  return config_from_json(j);
}

std::string SchemeAggregate::label() const {
  return "h" + format_double(scheme.h) + "_T" + format_double(scheme.T);
}

double SchemeAggregate::frequency(std::size_t m1, std::size_t m2) const {
  if (successes == 0) return 0.0;
  return static_cast<double>(counts(static_cast<Eigen::Index>(m1),
                                    static_cast<Eigen::Index>(m2))) /
         static_cast<double>(successes);
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SDE_QBIC_WORKERS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0) return static_cast<unsigned>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
  workers = resolve_workers(workers);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned spawn = static_cast<unsigned>(
      std::min<std::size_t>(workers, count));
  pool.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct ReplicateRecord {
  bool done = false;
  bool failed = false;
  std::size_t m1 = 0;  // 0-based
  std::size_t m2 = 0;
  Matrix weights;
  std::string error;
  std::optional<QbicReport> detail;
};

json record_json(std::size_t scheme_idx, std::size_t replicate,
                 const ReplicateRecord& r, std::size_t m1_count,
                 std::size_t m2_count) {
  json j;
  j["scheme"] = scheme_idx;
  j["replicate"] = replicate;
  if (r.failed) {
    j["failed"] = true;
    j["error"] = r.error;
    return j;
  }
  j["m1"] = r.m1 + 1;
  j["m2"] = r.m2 + 1;
  json weights = json::array();
  for (std::size_t a = 0; a < m1_count; ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < m2_count; ++b)
      row.push_back(r.weights(static_cast<Eigen::Index>(a),
                              static_cast<Eigen::Index>(b)));
    weights.push_back(row);
  }
  j["weights"] = weights;
  return j;
}

ReplicateRecord record_from_json(const json& j, std::size_t m1_count,
                                 std::size_t m2_count) {
  ReplicateRecord r;
  r.done = true;
  if (j.value("failed", false)) {
    r.failed = true;
    r.error = j.value("error", "");
    return r;
  }
  r.m1 = j.at("m1").get<std::size_t>() - 1;
  r.m2 = j.at("m2").get<std::size_t>() - 1;
  r.weights.resize(static_cast<Eigen::Index>(m1_count),
                   static_cast<Eigen::Index>(m2_count));
  const auto& rows = j.at("weights");
  for (std::size_t a = 0; a < m1_count; ++a)
    for (std::size_t b = 0; b < m2_count; ++b)
      r.weights(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          rows.at(a).at(b).get<double>();
  return r;
}

}  // namespace

AggregateReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start_time = std::chrono::steady_clock::now();
  const std::size_t m1 = config.candidates.m1();
  const std::size_t m2 = config.candidates.m2();
  const std::size_t scheme_count = config.schemes.size();
  const std::size_t total = scheme_count * config.replicates;
  std::ostringstream fp_stream;
  fp_stream << config.fingerprint_source << "|seed=" << config.base_seed
            << "|refine=" << config.refine << "|schemes=";
  for (const auto& s : config.schemes)
    fp_stream << s.n << "x" << format_double(s.h) << ",";
  fp_stream << "|candidates=";
  for (const auto& s : config.candidates.scales) {
    fp_stream << s.name << "[";
    for (int k = 0; k < s.domain.dim(); ++k)
      fp_stream << format_double(s.domain.lower[k]) << ":"
                << format_double(s.domain.upper[k]) << ",";
    fp_stream << "]";
  }
  for (const auto& d : config.candidates.drifts) {
    fp_stream << d.name << "[";
    for (int k = 0; k < d.domain.dim(); ++k)
      fp_stream << format_double(d.domain.lower[k]) << ":"
                << format_double(d.domain.upper[k]) << ",";
    fp_stream << "]";
  }
  std::ostringstream fp_hex;
  fp_hex << std::hex << fnv1a(fp_stream.str());
  const std::string fingerprint = fp_hex.str();

  std::vector<std::vector<ReplicateRecord>> records(
      scheme_count, std::vector<ReplicateRecord>(config.replicates));

  // Journal: resume completed replicates when the fingerprint matches.
  const bool persist = !config.output_dir.empty();
  fs::path journal_file;
  std::size_t resumed = 0;
  if (persist) {
    fs::create_directories(config.output_dir);
    journal_file = fs::path(config.output_dir) / "journal.jsonl";
    if (fs::exists(journal_file)) {
      std::ifstream in(journal_file);
      std::string line;
      bool header_ok = false;
      if (std::getline(in, line)) {
        const json header = json::parse(line, nullptr, false);
        header_ok = header.is_object() &&
                    header.value("fingerprint", "") == fingerprint;
        if (!header_ok)
          throw std::runtime_error(
              "run_experiment: journal fingerprint mismatch in " +
              journal_file.string() + "; remove it or use a fresh output dir");
      }
      while (header_ok && std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line, nullptr, false);
        if (!j.is_object()) continue;
        const auto si = j.value("scheme", std::size_t{0});
        const auto r = j.value("replicate", std::size_t{0});
        if (si < scheme_count && r < config.replicates &&
            !records[si][r].done) {
          records[si][r] = record_from_json(j, m1, m2);
          ++resumed;
        }
      }
    }
  }

  std::ofstream journal;
  std::mutex journal_mutex;
  if (persist) {
    const bool fresh = !fs::exists(journal_file) ||
                       fs::file_size(journal_file) == 0;
    journal.open(journal_file, std::ios::app);
    if (!journal)
      throw std::runtime_error("run_experiment: cannot open journal");
    if (fresh) journal << json{{"fingerprint", fingerprint}}.dump() << "\n";
  }

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  tasks.reserve(total - resumed);
  for (std::size_t si = 0; si < scheme_count; ++si)
    for (std::size_t r = 0; r < config.replicates; ++r)
      if (!records[si][r].done) tasks.emplace_back(si, r);

  const std::size_t failure_budget =
      static_cast<std::size_t>(0.05 * static_cast<double>(total));
  std::atomic<std::size_t> failures{0};
  std::atomic<bool> abort_flag{false};

  parallel_for(tasks.size(), config.workers, [&](std::size_t t) {
    if (abort_flag.load()) return;
    const auto [si, r] = tasks[t];
    ReplicateRecord& rec = records[si][r];
    rec.done = true;
    try {
      const RngStream stream{config.base_seed,
                             derive_stream(kReplicateTag, si, r)};
      const Path path = euler_path(config.truth, config.schemes[si],
                                   config.refine, stream);
      QbicReport report =
          stepwise_select(path, config.candidates, config.select);
      rec.m1 = report.selected_scale;
      rec.m2 = report.selected_drift;
      rec.weights = report.weights;
      if (config.record_replicates) rec.detail = std::move(report);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      if (failures.fetch_add(1) + 1 > failure_budget) abort_flag.store(true);
    }
    if (persist) {
      std::lock_guard<std::mutex> lock(journal_mutex);
      journal << record_json(si, r, rec, m1, m2).dump() << "\n";
      journal.flush();
    }
  });

  AggregateReport report;
  report.skipped_from_journal = resumed;
  for (std::size_t si = 0; si < scheme_count; ++si) {
    SchemeAggregate agg;
    agg.scheme = config.schemes[si];
    agg.counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(m1),
                                       static_cast<Eigen::Index>(m2));
    Matrix weight_sum = Matrix::Zero(static_cast<Eigen::Index>(m1),
                                     static_cast<Eigen::Index>(m2));
    for (std::size_t r = 0; r < config.replicates; ++r) {
      const ReplicateRecord& rec = records[si][r];
      if (rec.failed || !rec.done) {  // !done: skipped after an early abort
        ++agg.failures;
        continue;
      }
      ++agg.successes;
      agg.counts(static_cast<Eigen::Index>(rec.m1),
                 static_cast<Eigen::Index>(rec.m2)) += 1;
      weight_sum += rec.weights;
    }
    agg.mean_weights =
        agg.successes > 0
            ? Matrix(weight_sum / static_cast<double>(agg.successes))
            : Matrix(Matrix::Zero(static_cast<Eigen::Index>(m1),
                                  static_cast<Eigen::Index>(m2)));
    report.failures_total += agg.failures;
    report.per_scheme.push_back(std::move(agg));
  }

  if (report.failures_total > failure_budget) {
    std::ostringstream os;
    os << "run_experiment: " << report.failures_total << " of " << total
       << " replicates failed (budget " << failure_budget << ")";
    throw std::runtime_error(os.str());
  }

  if (persist) {
    const fs::path dir(config.output_dir);
    {
      std::ofstream out(dir / "frequencies.csv");
      out << "scheme,m1,m2,count\n";
      for (const auto& agg : report.per_scheme)
        for (std::size_t a = 0; a < m1; ++a)
          for (std::size_t b = 0; b < m2; ++b)
            out << agg.label() << ',' << a + 1 << ',' << b + 1 << ','
                << agg.counts(static_cast<Eigen::Index>(a),
                              static_cast<Eigen::Index>(b))
                << "\n";
    }
    {
      std::ofstream out(dir / "weights.csv");
      out << "scheme,m1,m2,mean_weight\n";
      for (const auto& agg : report.per_scheme)
        for (std::size_t a = 0; a < m1; ++a)
          for (std::size_t b = 0; b < m2; ++b)
            out << agg.label() << ',' << a + 1 << ',' << b + 1 << ','
                << format_double(agg.mean_weights(
                       static_cast<Eigen::Index>(a),
                       static_cast<Eigen::Index>(b)))
                << "\n";
    }
    if (config.record_replicates) {
      std::ofstream out(dir / "replicates.jsonl");
      for (std::size_t si = 0; si < scheme_count; ++si)
        for (std::size_t r = 0; r < config.replicates; ++r) {
          const ReplicateRecord& rec = records[si][r];
          if (!rec.detail) continue;
          ordered_json j = to_json(*rec.detail);
          j["scheme"] = si;
          j["replicate"] = r;
          out << j.dump() << "\n";
        }
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  if (persist) {
    std::ofstream out(fs::path(config.output_dir) / "run_stats.json");
    out << json{{"wall_seconds", report.wall_seconds},
                {"failures", report.failures_total},
                {"resumed", report.skipped_from_journal}}
               .dump(2)
        << "\n";
  }
  return report;
}

std::vector<ExpansionRow> verify_expansion(
    const Experiment& experiment, const std::string& candidate_name,
    const std::string& component, const std::vector<SamplingScheme>& schemes,
    std::size_t replicates, std::uint64_t seed, unsigned workers, int refine) {
  if (component != "scale" && component != "drift")
    throw std::invalid_argument(
        "verify_expansion: component must be 'scale' or 'drift'");
  const bool drift_component = component == "drift";
  const StationaryDistribution pi0 = experiment_pi0(experiment, seed);

  // Population quantities of the inspected candidate (and, for the drift
  // component, of the limit-optimal scale it conditions on).
  Matrix fisher;
  double prior_at_star = 0.0;
  const ScaleCandidate* given_scale = nullptr;
  Vector given_gamma_star;
  const CoefficientFunction* fn = nullptr;
  const ParameterDomain* domain = nullptr;
  if (drift_component) {
    const LimitReport limit =
        optimal_model(experiment.candidates, experiment.truth, pi0);
    given_scale = &experiment.candidates.scales[limit.m1_star];
    given_gamma_star = limit.gamma_star[limit.m1_star];
    const DriftCandidate& cand = [&]() -> const DriftCandidate& {
      for (const auto& d : experiment.candidates.drifts)
        if (d.name == candidate_name) return d;
      throw std::invalid_argument("verify_expansion: unknown drift '" +
                                  candidate_name + "'");
    }();
    fn = &cand.fn;
    domain = &cand.domain;
    auto [alpha_star, value] = optimize_limit(
        [&](const Vector& a) {
          return limit_drift_contrast(cand.fn, a, given_scale->fn,
                                      given_gamma_star,
                                      experiment.truth.drift_fn, pi0);
        },
        cand.domain);
    (void)value;
    fisher = fisher_drift(cand.fn, alpha_star, given_scale->fn,
                          given_gamma_star, experiment.truth.drift_fn, pi0);
    prior_at_star = uniform_prior(cand.domain).sup_bound;
  } else {
    const ScaleCandidate& cand = [&]() -> const ScaleCandidate& {
      for (const auto& s : experiment.candidates.scales)
        if (s.name == candidate_name) return s;
      throw std::invalid_argument("verify_expansion: unknown scale '" +
                                  candidate_name + "'");
    }();
    fn = &cand.fn;
    domain = &cand.domain;
    auto [gamma_star, value] = optimize_limit(
        [&](const Vector& g) {
          return limit_scale_contrast(cand.fn, g, experiment.truth.scale_fn,
                                      pi0);
        },
        cand.domain);
    (void)value;
    fisher = fisher_scale(cand.fn, gamma_star, experiment.truth.scale_fn, pi0);
    prior_at_star = uniform_prior(cand.domain).sup_bound;
  }
  const PriorDensity prior = uniform_prior(*domain);

  std::vector<ExpansionRow> rows(schemes.size() * replicates);
  parallel_for(rows.size(), workers, [&](std::size_t t) {
    const std::size_t si = t / replicates;
    const std::size_t r = t % replicates;
    const SamplingScheme& scheme = schemes[si];
    const RngStream stream{seed, derive_stream(0xE4Aul, si, r)};
    const Path path = euler_path(experiment.truth, scheme, refine, stream);
    ExpansionRow row;
    row.n = scheme.n;
    row.replicate = r;
    if (drift_component) {
      const ScaleFit sf =
          fit_scale(path, given_scale->fn, given_scale->domain);
      const DriftFit df =
          fit_drift(path, *fn, *domain, given_scale->fn, sf.gamma_hat);
      row.log_marginal = log_marginal_drift(path, *fn, *domain, prior,
                                            given_scale->fn, sf.gamma_hat);
      row.prediction = expansion_prediction_drift(
          df.g2_at_max, domain->dim(), scheme.T, prior_at_star, fisher);
    } else {
      const ScaleFit sf = fit_scale(path, *fn, *domain);
      row.log_marginal = log_marginal_scale(path, *fn, *domain, prior);
      row.prediction = expansion_prediction_scale(
          sf.g1_at_max, domain->dim(), scheme.n, prior_at_star, fisher);
    }
    row.residual = row.log_marginal - row.prediction;
    rows[t] = row;
  });
  return rows;
}

void write_expansion_csv(const std::vector<ExpansionRow>& rows,
                         const fs::path& file) {
  std::ofstream out(file);
  if (!out)
    throw std::runtime_error("write_expansion_csv: cannot open " +
                             file.string());
  out << "n,replicate,log_marginal,prediction,residual\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.replicate << ',' << format_double(r.log_marginal)
        << ',' << format_double(r.prediction) << ','
        << format_double(r.residual) << "\n";
}

}  // namespace sdeqbic
