#include "sdeqbic/types.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sdeqbic {

void SamplingScheme::validate() const {
  if (n < 1) throw std::invalid_argument("SamplingScheme: n must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("SamplingScheme: h must be positive");
  if (T != static_cast<double>(n) * h)
    throw std::invalid_argument("SamplingScheme: T must equal n*h");
}

SamplingScheme make_scheme(std::size_t n, double h) {
  if (n < 2) throw std::invalid_argument("make_scheme: n must be >= 2");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("make_scheme: h must be positive");
  SamplingScheme s{n, h, static_cast<double>(n) * h};
  s.validate();
  return s;
}

void Path::validate() const {
  scheme.validate();
  if (static_cast<std::size_t>(values.size()) != scheme.n + 1) {
    std::ostringstream os;
    os << "Path: expected " << scheme.n + 1 << " values, got " << values.size();
    throw std::invalid_argument(os.str());
  }
  if (!values.allFinite())
    throw std::invalid_argument("Path: values must all be finite");
}

Vector increments(const Path& path) {
  path.validate();
  const auto n = static_cast<Eigen::Index>(path.scheme.n);
  return path.values.tail(n) - path.values.head(n);
}

bool ParameterDomain::contains(const Vector& theta) const {
  if (theta.size() != lower.size()) return false;
  return (theta.array() >= lower.array()).all() &&
         (theta.array() <= upper.array()).all();
}

Vector ParameterDomain::project(const Vector& theta) const {
  return theta.cwiseMax(lower).cwiseMin(upper);
}

void ParameterDomain::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw std::invalid_argument("ParameterDomain: empty or mismatched bounds");
  if (!lower.allFinite() || !upper.allFinite())
    throw std::invalid_argument("ParameterDomain: bounds must be finite");
  if (!(lower.array() < upper.array()).all())
    throw std::invalid_argument("ParameterDomain: need lower < upper");
}

ParameterDomain make_domain(Vector lower, Vector upper) {
  ParameterDomain d{std::move(lower), std::move(upper)};
  d.validate();
  return d;
}

ParameterDomain uniform_box(int dim, double lo, double hi) {
  return make_domain(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

Vector CoefficientFunction::param_gradient(double x, const Vector& theta) const {
  if (gradient) return gradient(x, theta);
  const auto p = theta.size();
  Vector g(p);
  Vector t = theta;
  for (Eigen::Index k = 0; k < p; ++k) {
    const double step = 1e-5 * (1.0 + std::abs(theta[k]));
    t[k] = theta[k] + step;
    const double up = evaluate(x, t);
    t[k] = theta[k] - step;
    const double dn = evaluate(x, t);
    t[k] = theta[k];
    g[k] = (up - dn) / (2.0 * step);
  }
  return g;
}

Matrix CoefficientFunction::param_hessian(double x, const Vector& theta) const {
  if (hessian) return hessian(x, theta);
  const auto p = theta.size();
  Matrix h(p, p);
  Vector t = theta;
  const double f0 = evaluate(x, theta);
  for (Eigen::Index k = 0; k < p; ++k) {
    const double sk = 1e-5 * (1.0 + std::abs(theta[k]));
    for (Eigen::Index l = k; l < p; ++l) {
      if (k == l) {
        t[k] = theta[k] + sk;
        const double up = evaluate(x, t);
        t[k] = theta[k] - sk;
        const double dn = evaluate(x, t);
        t[k] = theta[k];
        h(k, k) = (up - 2.0 * f0 + dn) / (sk * sk);
      } else {
        const double sl = 1e-5 * (1.0 + std::abs(theta[l]));
        double sum = 0.0;
        for (int sa : {+1, -1}) {
          for (int sb : {+1, -1}) {
            t[k] = theta[k] + sa * sk;
            t[l] = theta[l] + sb * sl;
            sum += sa * sb * evaluate(x, t);
          }
        }
        t[k] = theta[k];
        t[l] = theta[l];
        h(k, l) = h(l, k) = sum / (4.0 * sk * sl);
      }
    }
  }
  return h;
}

void CandidateSet::validate() const {
  if (scales.empty() || drifts.empty())
    throw std::invalid_argument("CandidateSet: need M1 >= 1 and M2 >= 1");
  for (const auto& s : scales) s.domain.validate();
  for (const auto& d : drifts) d.domain.validate();
}

bool scale_nonzero_probe(const CoefficientFunction& scale,
                         const ParameterDomain& domain, int probes,
                         double x_range, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(-x_range, x_range);
  const Vector lo = domain.lower, w = domain.widths();
  for (int i = 0; i < probes; ++i) {
    Vector gamma(domain.dim());
    for (int k = 0; k < domain.dim(); ++k)
      gamma[k] = lo[k] + w[k] * std::uniform_real_distribution<double>(0, 1)(gen);
    const double c = scale.evaluate(ux(gen), gamma);
    if (c == 0.0 || !std::isfinite(c)) return false;
  }
  return true;
}

void validate_model_spec(const ModelSpec& model) {
  model.drift_domain.validate();
  model.scale_domain.validate();
  if (!model.drift.evaluate || !model.scale.evaluate)
    throw std::invalid_argument("ModelSpec: coefficients must be evaluable");
  if (!scale_nonzero_probe(model.scale, model.scale_domain))
    throw std::invalid_argument(
        "ModelSpec '" + model.label +
        "': scale coefficient vanished or was non-finite at a probe point");
}

double linear_decomposition_gap(const CoefficientFunction& fn,
                                const ParameterDomain& domain, int grid,
                                double x_range) {
  if (!fn.linear_in_params || !fn.basis)
    throw std::invalid_argument("linear_decomposition_gap: no declared basis");
  double worst = 0.0;
  std::mt19937_64 gen(0xba515);
  for (int i = 0; i < grid; ++i) {
    const double x = -x_range + 2.0 * x_range * i / (grid - 1);
    Vector theta(domain.dim());
    for (int k = 0; k < domain.dim(); ++k)
      theta[k] = domain.lower[k] +
                 domain.widths()[k] *
                     std::uniform_real_distribution<double>(0, 1)(gen);
    const double direct = fn.evaluate(x, theta);
    double decomposed = fn.basis(x).dot(theta);
    if (fn.basis_offset) decomposed += fn.basis_offset(x);
    worst = std::max(worst, std::abs(direct - decomposed));
  }
  return worst;
}

double log_square_decomposition_gap(const CoefficientFunction& fn,
                                    const ParameterDomain& domain, int grid,
                                    double x_range) {
  if (!fn.log_square_affine || !fn.log_square_basis)
    throw std::invalid_argument("log_square_decomposition_gap: not declared");
  double worst = 0.0;
  std::mt19937_64 gen(0x10c5a);
  for (int i = 0; i < grid; ++i) {
    const double x = -x_range + 2.0 * x_range * i / (grid - 1);
    Vector theta(domain.dim());
    for (int k = 0; k < domain.dim(); ++k)
      theta[k] = domain.lower[k] +
                 domain.widths()[k] *
                     std::uniform_real_distribution<double>(0, 1)(gen);
    double log_c2 = fn.log_square_basis(x).dot(theta);
    if (fn.log_square_offset) log_c2 += fn.log_square_offset(x);
    const double c = fn.evaluate(x, theta);
    const double direct = c * c;
    const double gap = std::abs(std::exp(log_c2) - direct) /
                       std::max(1.0, std::abs(direct));
    worst = std::max(worst, gap);
  }
  return worst;
}

}  // namespace sdeqbic
