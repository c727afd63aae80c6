#include "sdeqbic/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sdeqbic {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void save_path_csv(const Path& path, const std::filesystem::path& file) {
  path.validate();
  std::ofstream out(file);
  if (!out) throw std::runtime_error("save_path_csv: cannot open " + file.string());
  out << "t,x\n";
  for (Eigen::Index j = 0; j < path.values.size(); ++j)
    out << format_double(static_cast<double>(j) * path.scheme.h) << ','
        << format_double(path.values[j]) << '\n';
}

Path load_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("load_path_csv: cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_path_csv: empty file");
  std::vector<double> ts, xs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("load_path_csv: malformed row '" + line + "'");
    ts.push_back(std::stod(line.substr(0, comma)));
    xs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (ts.size() < 2)
    throw std::runtime_error("load_path_csv: need at least two rows");
  const double h = ts[1] - ts[0];
  for (std::size_t j = 1; j < ts.size(); ++j)
    if (std::abs(ts[j] - ts[j - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::runtime_error("load_path_csv: grid is not uniform");
  Path path;
  path.scheme = SamplingScheme{ts.size() - 1, h,
                               static_cast<double>(ts.size() - 1) * h};
  path.values = Eigen::Map<const Vector>(xs.data(),
                                         static_cast<Eigen::Index>(xs.size()));
  path.validate();
  return path;
}

namespace {

ordered_json vector_json(const Vector& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

}  // namespace

ordered_json to_json(const NoiseSpec& spec) {
  if (spec.kind == NoiseSpec::Kind::Wiener) return {{"kind", "wiener"}};
  return {{"kind", "nig"},
          {"alpha", spec.alpha},
          {"beta", spec.beta},
          {"delta_rate", spec.delta_rate},
          {"mu_rate", spec.mu_rate}};
}

NoiseSpec noise_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "wiener") return NoiseSpec::wiener();
  if (kind == "nig")
    return NoiseSpec::nig(j.at("alpha").get<double>(),
                          j.at("beta").get<double>(),
                          j.at("delta_rate").get<double>(),
                          j.at("mu_rate").get<double>());
  throw std::invalid_argument("noise_from_json: unknown kind '" + kind + "'");
}

ordered_json to_json(const OptimizeDiagnostics& diag) {
  return {{"evaluations", diag.evaluations},
          {"starts", diag.starts_used},
          {"converged", diag.converged},
          {"boundary_contact", diag.boundary_contact},
          {"multiplicity", diag.multiplicity}};
}

ordered_json to_json(const FitResult& fit) {
  ordered_json j;
  j["model"] = fit.model_label;
  j["gamma_hat"] = vector_json(fit.gamma_hat);
  j["alpha_hat"] = vector_json(fit.alpha_hat);
  j["g1"] = fit.g1_at_max;
  j["g2"] = fit.g2_at_max;
  j["diag"] = {{"scale", to_json(fit.scale_diag)},
               {"drift", to_json(fit.drift_diag)},
               {"drift_used_wls", fit.drift_used_wls}};
  return j;
}

ordered_json to_json(const QbicReport& report) {
  ordered_json j;
  j["qbic1"] = vector_json(report.qbic1);
  j["qbic2"] = matrix_json(report.qbic2);
  j["selected_scale"] = report.selected_scale + 1;  // 1-based in outputs
  j["selected_drift"] = report.selected_drift + 1;
  j["weights"] = matrix_json(report.weights);
  ordered_json failures = ordered_json::array();
  for (const auto& f : report.failures) {
    ordered_json entry;
    entry["scale"] = f.scale_index + 1;
    if (f.drift_index) entry["drift"] = *f.drift_index + 1;
    entry["message"] = f.message;
    failures.push_back(entry);
  }
  j["failures"] = failures;
  return j;
}

ordered_json to_json(const LimitReport& report,
                     const CandidateSet& candidates) {
  ordered_json j;
  ordered_json scales = ordered_json::array();
  for (std::size_t i = 0; i < candidates.m1(); ++i)
    scales.push_back(
        {{"name", candidates.scales[i].name},
         {"g1_star", report.g1_star[static_cast<Eigen::Index>(i)]},
         {"gamma_star", vector_json(report.gamma_star[i])}});
  ordered_json drifts = ordered_json::array();
  for (std::size_t i = 0; i < candidates.m2(); ++i)
    drifts.push_back(
        {{"name", candidates.drifts[i].name},
         {"g2_star", report.g2_star[static_cast<Eigen::Index>(i)]},
         {"alpha_star", vector_json(report.alpha_star[i])}});
  j["scales"] = scales;
  j["drifts"] = drifts;
  j["m1_star"] = report.m1_star + 1;
  j["m2_star"] = report.m2_star + 1;
  j["fisher_gamma"] = matrix_json(report.fisher_gamma);
  j["fisher_alpha"] = matrix_json(report.fisher_alpha);
  j["fisher_gamma_pd"] = report.fisher_gamma_pd;
  j["fisher_alpha_pd"] = report.fisher_alpha_pd;
  return j;
}

}  // namespace sdeqbic
