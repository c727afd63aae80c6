#include "sdeqbic/registry.hpp"

#include "sdeqbic/rng.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace sdeqbic {

CoefficientFunction make_linear_drift(
    std::vector<std::function<double(double)>> phis,
    std::function<double(double)> phi0) {
  const auto p = static_cast<Eigen::Index>(phis.size());
  auto basis = [phis = std::move(phis), p](double x) {
    Vector out(p);
    for (Eigen::Index k = 0; k < p; ++k) out[k] = phis[static_cast<std::size_t>(k)](x);
    return out;
  };
  CoefficientFunction fn;
  fn.linear_in_params = true;
  fn.basis = basis;
  fn.basis_offset = phi0;
  fn.evaluate = [basis, phi0](double x, const Vector& alpha) {
    return basis(x).dot(alpha) + (phi0 ? phi0(x) : 0.0);
  };
  fn.gradient = [basis](double x, const Vector&) { return basis(x); };
  fn.hessian = [p](double, const Vector&) { return Matrix::Zero(p, p); };
  return fn;
}

CoefficientFunction make_exp_rational_scale(
    std::vector<std::function<double(double)>> basis_funcs,
    std::function<double(double)> fixed) {
  const auto p = static_cast<Eigen::Index>(basis_funcs.size());
  // b(x)/(1+x^2) per parameter; the exponent is u = gamma.b_r(x) + f_r(x).
  auto rational_basis = [basis_funcs = std::move(basis_funcs), p](double x) {
    const double denom = 1.0 + x * x;
    Vector out(p);
    for (Eigen::Index k = 0; k < p; ++k)
      out[k] = basis_funcs[static_cast<std::size_t>(k)](x) / denom;
    return out;
  };
  auto rational_fixed = [fixed](double x) {
    return fixed ? fixed(x) / (1.0 + x * x) : 0.0;
  };

  CoefficientFunction fn;
  fn.evaluate = [rational_basis, rational_fixed](double x, const Vector& g) {
    return std::exp(rational_basis(x).dot(g) + rational_fixed(x));
  };
  fn.gradient = [rational_basis, rational_fixed](double x, const Vector& g) {
    const Vector b = rational_basis(x);
    return Vector(std::exp(b.dot(g) + rational_fixed(x)) * b);
  };
  fn.hessian = [rational_basis, rational_fixed](double x, const Vector& g) {
    const Vector b = rational_basis(x);
    return Matrix(std::exp(b.dot(g) + rational_fixed(x)) *
                  (b * b.transpose()));
  };
  fn.log_square_affine = true;
  fn.log_square_basis = [rational_basis](double x) {
    return Vector(2.0 * rational_basis(x));
  };
  fn.log_square_offset = [rational_fixed](double x) {
    return 2.0 * rational_fixed(x);
  };
  return fn;
}

namespace {

std::function<double(double)> constant(double v) {
  return [v](double) { return v; };
}

CandidateSet build_diffusion_candidates() {
  auto one = constant(1.0);
  auto id = [](double x) { return x; };
  auto sq = [](double x) { return x * x; };

  CandidateSet set;
  set.scales = {
      {"scale1", make_exp_rational_scale({one, id}, sq), uniform_box(2, -10, 10)},
      {"scale2", make_exp_rational_scale({one, sq}, id), uniform_box(2, -10, 10)},
      {"scale3", make_exp_rational_scale({id, sq}, one), uniform_box(2, -10, 10)},
      {"scale4", make_exp_rational_scale({id}, one), uniform_box(1, -10, 10)},
      {"scale5", make_exp_rational_scale({sq}, one), uniform_box(1, -10, 10)},
      {"scale6", make_exp_rational_scale({id}, sq), uniform_box(1, -10, 10)},
      {"scale7", make_exp_rational_scale({sq}, id), uniform_box(1, -10, 10)},
  };
  // Wide drift boxes keep every candidate's optimum interior (drift1's is
  // 0.152, drift3's is 0); a positive lower bound would clip a sizable share
  // of the finite-sample fits and distort both frequencies and weights.
  set.drifts = {
      {"drift1", make_linear_drift({[](double x) { return 1.0 - x; }}),
       uniform_box(1, -10, 10)},
      {"drift2", make_linear_drift({[](double x) { return -x; }}, constant(-1.0)),
       uniform_box(1, -10, 10)},
      {"drift3", make_linear_drift({constant(-1.0)}), uniform_box(1, -10, 10)},
  };
  return set;
}

CandidateSet build_levy_candidates() {
  CoefficientFunction const_scale;
  const_scale.evaluate = [](double, const Vector& g) { return g[0]; };
  const_scale.gradient = [](double, const Vector&) {
    return Vector(Vector::Ones(1));
  };
  const_scale.hessian = [](double, const Vector&) {
    return Matrix(Matrix::Zero(1, 1));
  };

  CoefficientFunction trig_scale;
  trig_scale.evaluate = [](double x, const Vector& g) {
    return std::exp(0.5 * (g[0] * std::cos(x) + g[1] * std::sin(x)));
  };
  trig_scale.gradient = [](double x, const Vector& g) {
    Vector b(2);
    b << 0.5 * std::cos(x), 0.5 * std::sin(x);
    return Vector(std::exp(b.dot(g)) * b);
  };
  trig_scale.hessian = [](double x, const Vector& g) {
    Vector b(2);
    b << 0.5 * std::cos(x), 0.5 * std::sin(x);
    return Matrix(std::exp(b.dot(g)) * (b * b.transpose()));
  };
  trig_scale.log_square_affine = true;
  trig_scale.log_square_basis = [](double x) {
    Vector b(2);
    b << std::cos(x), std::sin(x);
    return b;
  };

  CoefficientFunction decay_scale;  // gamma / (1 + x^2)
  decay_scale.evaluate = [](double x, const Vector& g) {
    return g[0] / (1.0 + x * x);
  };
  decay_scale.gradient = [](double x, const Vector&) {
    return Vector(Vector::Constant(1, 1.0 / (1.0 + x * x)));
  };
  decay_scale.hessian = [](double, const Vector&) {
    return Matrix(Matrix::Zero(1, 1));
  };

  CoefficientFunction blend_scale;  // (1 + gamma x^2) / (1 + x^2)
  blend_scale.evaluate = [](double x, const Vector& g) {
    return (1.0 + g[0] * x * x) / (1.0 + x * x);
  };
  blend_scale.gradient = [](double x, const Vector&) {
    return Vector(Vector::Constant(1, x * x / (1.0 + x * x)));
  };
  blend_scale.hessian = [](double, const Vector&) {
    return Matrix(Matrix::Zero(1, 1));
  };

  CandidateSet set;
  // levy-scale4's parameter is kept strictly positive: (1 + gamma x^2) with
  // gamma < 0 vanishes at |x| = 1/sqrt(-gamma), violating the nonzero-scale
  // requirement on the domain. Its population optimum therefore sits on the
  // 0.1 boundary.
  set.scales = {
      {"levy-scale1", const_scale, uniform_box(1, 0.05, 10)},
      {"levy-scale2", trig_scale, uniform_box(2, -10, 10)},
      {"levy-scale3", decay_scale, uniform_box(1, 0.05, 10)},
      {"levy-scale4", blend_scale, uniform_box(1, 0.1, 10)},
  };
  set.drifts = {
      {"levy-drift1",
       make_linear_drift({[](double x) { return -x; }, constant(-1.0)}),
       uniform_box(2, -10, 10)},
      {"levy-drift2", make_linear_drift({[](double x) { return -x; }}),
       uniform_box(1, -10, 10)},
      {"levy-drift3", make_linear_drift({constant(-1.0)}),
       uniform_box(1, -10, 10)},
  };
  return set;
}

std::vector<SamplingScheme> reference_schemes() {
  return {make_scheme(1000, 0.01), make_scheme(2000, 0.005),
          make_scheme(5000, 0.01), make_scheme(10000, 0.005)};
}

Experiment build_diffusion_experiment() {
  Experiment e;
  e.name = "diffusion-4.1";
  e.truth.drift_fn = [](double x) { return -0.5 * x; };
  e.truth.scale_fn = [](double) { return 1.0; };
  e.truth.noise = NoiseSpec::wiener();
  e.truth.x0 = 0.0;
  e.truth.label = "ou-halflife";
  e.candidates = build_diffusion_candidates();
  e.default_schemes = reference_schemes();
  e.pi0_closed_form = true;
  return e;
}

Experiment build_levy_experiment() {
  Experiment e;
  e.name = "nig-4.2";
  e.truth.drift_fn = [](double x) { return -0.5 * x; };
  e.truth.scale_fn = [](double x) { return 1.0 / (1.0 + x * x); };
  e.truth.noise = NoiseSpec::nig(3.0, 0.0, 3.0, 0.0);
  e.truth.x0 = 0.0;
  e.truth.label = "nig-rational";
  e.candidates = build_levy_candidates();
  e.default_schemes = reference_schemes();
  e.pi0_closed_form = false;
  return e;
}

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> all = {build_diffusion_experiment(),
                                              build_levy_experiment()};
  return all;
}

}  // namespace

const ScaleCandidate& find_scale(const std::string& name) {
  for (const auto& e : experiments())
    for (const auto& s : e.candidates.scales)
      if (s.name == name) return s;
  throw std::invalid_argument("unknown scale candidate '" + name + "'");
}

const DriftCandidate& find_drift(const std::string& name) {
  for (const auto& e : experiments())
    for (const auto& d : e.candidates.drifts)
      if (d.name == name) return d;
  throw std::invalid_argument("unknown drift candidate '" + name + "'");
}

const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return e;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& e : experiments()) names.push_back(e.name);
  return names;
}

StationaryDistribution experiment_pi0(const Experiment& experiment,
                                      std::uint64_t seed) {
  if (experiment.pi0_closed_form)
    return StationaryDistribution::standard_normal();
  const auto n = static_cast<std::size_t>(
      std::llround((experiment.pi0_T + experiment.pi0_burn_in) /
                   experiment.pi0_h));
  const SamplingScheme scheme = make_scheme(n, experiment.pi0_h);
  const Path long_path =
      euler_path(experiment.truth, scheme, experiment.pi0_refine,
                 RngStream{seed, derive_stream(0x9120, 0)});
  return StationaryDistribution::empirical(long_path,
                                           experiment.pi0_burn_in);
}

}  // namespace sdeqbic
