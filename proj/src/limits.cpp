#include "sdeqbic/limits.hpp"

#include "sdeqbic/errors.hpp"
#include "sdeqbic/simulate.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sdeqbic {

namespace {

constexpr double kTieTol = 1e-6;

bool positive_definite(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  return solver.eigenvalues().minCoeff() > 0.0;
}

// Best-first candidate order; within a group tied with the leader (1e-6 on
// the contrast value) the smallest dimension wins, then the lowest index.
std::vector<std::size_t> rank_candidates(
    const Vector& values, const std::function<int(std::size_t)>& dim_of) {
  std::vector<std::size_t> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[static_cast<Eigen::Index>(a)] >
           values[static_cast<Eigen::Index>(b)];
  });
  std::size_t group_start = 0;
  while (group_start < order.size()) {
    const double leader = values[static_cast<Eigen::Index>(order[group_start])];
    std::size_t group_end = group_start + 1;
    while (group_end < order.size() &&
           leader - values[static_cast<Eigen::Index>(order[group_end])] <=
               kTieTol)
      ++group_end;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(group_start),
              order.begin() + static_cast<std::ptrdiff_t>(group_end),
              [&](std::size_t a, std::size_t b) {
                const int da = dim_of(a), db = dim_of(b);
                return da != db ? da < db : a < b;
              });
    group_start = group_end;
  }
  return order;
}

}  // namespace

StationaryDistribution StationaryDistribution::standard_normal() {
  StationaryDistribution d;
  d.kind_ = Kind::StandardNormal;
  return d;
}

StationaryDistribution StationaryDistribution::closed_form(
    std::function<double(double)> density) {
  if (!density)
    throw std::invalid_argument("StationaryDistribution: null density");
  StationaryDistribution d;
  d.kind_ = Kind::ClosedForm;
  d.density_ = std::move(density);
  const double mass = integrate_real_line(d.density_, d.adaptive);
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument(
        "StationaryDistribution: density mass deviates from 1 by more than "
        "1e-8");
  return d;
}

StationaryDistribution StationaryDistribution::empirical(Path long_path,
                                                         double burn_in) {
  long_path.validate();
  if (long_path.scheme.T - burn_in < 1000.0)
    throw std::invalid_argument(
        "StationaryDistribution: need at least 1000 time units after "
        "burn-in");
  const auto first = static_cast<Eigen::Index>(
      std::ceil(burn_in / long_path.scheme.h));
  StationaryDistribution d;
  d.kind_ = Kind::Empirical;
  d.sample_ = long_path.values.tail(long_path.values.size() - first);
  return d;
}

double StationaryDistribution::expect(
    const std::function<double(double)>& f) const {
  switch (kind_) {
    case Kind::StandardNormal: {
      static const QuadratureRule cached = gauss_hermite(201);
      const QuadratureRule& rule =
          gh_nodes == 201 ? cached : gauss_hermite(gh_nodes);
      return expect_standard_normal(f, rule);
    }
    case Kind::ClosedForm:
      return integrate_real_line(
          [&](double x) { return f(x) * density_(x); }, adaptive);
    case Kind::Empirical: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < sample_.size(); ++i) acc += f(sample_[i]);
      return acc / static_cast<double>(sample_.size());
    }
  }
  throw std::logic_error("StationaryDistribution: unknown kind");
}

double limit_scale_contrast(const CoefficientFunction& scale,
                            const Vector& gamma,
                            const std::function<double(double)>& true_C,
                            const StationaryDistribution& pi0) {
  return -pi0.expect([&](double x) {
    const double c2 = std::pow(scale.evaluate(x, gamma), 2);
    const double C = true_C(x);
    return std::log(c2) + C * C / c2;
  });
}

double limit_drift_contrast(const CoefficientFunction& drift,
                            const Vector& alpha,
                            const CoefficientFunction& scale,
                            const Vector& gamma_star,
                            const std::function<double(double)>& true_A,
                            const StationaryDistribution& pi0) {
  return -pi0.expect([&](double x) {
    const double c = scale.evaluate(x, gamma_star);
    const double gap = true_A(x) - drift.evaluate(x, alpha);
    return gap * gap / (c * c);
  });
}

std::pair<Vector, double> optimize_limit(
    const std::function<double(const Vector&)>& contrast,
    const ParameterDomain& domain, const OptimizeOptions& opts) {
  const Objective objective = [&](const Vector& theta) {
    const double v = contrast(theta);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };
  const OptimizeResult res = maximize_box(objective, domain, opts);
  return {res.x, res.value};
}

Matrix fisher_scale(const CoefficientFunction& scale, const Vector& gamma_star,
                    const std::function<double(double)>& true_C,
                    const StationaryDistribution& pi0) {
  const auto p = gamma_star.size();
  Matrix fisher(p, p);
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index l = k; l < p; ++l) {
      const double entry = pi0.expect([&](double x) {
        const double c = scale.evaluate(x, gamma_star);
        const double c2 = c * c;
        const double C2 = std::pow(true_C(x), 2);
        const Vector dc = scale.param_gradient(x, gamma_star);
        const Matrix d2c = scale.param_hessian(x, gamma_star);
        const double outer = dc[k] * dc[l];
        return 4.0 * outer / (c2 * c2) * C2 -
               2.0 * (d2c(k, l) * c - outer) / (c2 * c2) * (C2 - c2);
      });
      fisher(k, l) = fisher(l, k) = entry;
    }
  return fisher;
}

Matrix fisher_drift(const CoefficientFunction& drift, const Vector& alpha_star,
                    const CoefficientFunction& scale, const Vector& gamma_star,
                    const std::function<double(double)>& true_A,
                    const StationaryDistribution& pi0) {
  const auto p = alpha_star.size();
  Matrix fisher(p, p);
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index l = k; l < p; ++l) {
      const double entry = pi0.expect([&](double x) {
        const double c2 = std::pow(scale.evaluate(x, gamma_star), 2);
        const Vector da = drift.param_gradient(x, alpha_star);
        const Matrix d2a = drift.param_hessian(x, alpha_star);
        const double gap = true_A(x) - drift.evaluate(x, alpha_star);
        return 2.0 * da[k] * da[l] / c2 - 2.0 * d2a(k, l) / c2 * gap;
      });
      fisher(k, l) = fisher(l, k) = entry;
    }
  return fisher;
}

LimitReport optimal_model(const CandidateSet& candidates,
                          const TrueModel& truth,
                          const StationaryDistribution& pi0,
                          const OptimizeOptions& opts) {
  candidates.validate();
  if (!truth.drift_fn || !truth.scale_fn)
    throw std::invalid_argument("optimal_model: truth coefficients unset");

  LimitReport report;
  const std::size_t m1 = candidates.m1();
  const std::size_t m2 = candidates.m2();
  report.g1_star.resize(static_cast<Eigen::Index>(m1));
  report.g2_star.resize(static_cast<Eigen::Index>(m2));
  report.gamma_star.resize(m1);
  report.alpha_star.resize(m2);

  for (std::size_t i = 0; i < m1; ++i) {
    const auto& cand = candidates.scales[i];
    auto [gamma, value] = optimize_limit(
        [&](const Vector& g) {
          return limit_scale_contrast(cand.fn, g, truth.scale_fn, pi0);
        },
        cand.domain, opts);
    report.gamma_star[i] = std::move(gamma);
    report.g1_star[static_cast<Eigen::Index>(i)] = value;
  }
  report.scale_ranking = rank_candidates(report.g1_star, [&](std::size_t i) {
    return candidates.scales[i].domain.dim();
  });
  report.m1_star = report.scale_ranking.front();

  const auto& best_scale = candidates.scales[report.m1_star];
  const Vector& best_gamma = report.gamma_star[report.m1_star];
  for (std::size_t j = 0; j < m2; ++j) {
    const auto& cand = candidates.drifts[j];
    auto [alpha, value] = optimize_limit(
        [&](const Vector& a) {
          return limit_drift_contrast(cand.fn, a, best_scale.fn, best_gamma,
                                      truth.drift_fn, pi0);
        },
        cand.domain, opts);
    report.alpha_star[j] = std::move(alpha);
    report.g2_star[static_cast<Eigen::Index>(j)] = value;
  }
  report.drift_ranking = rank_candidates(report.g2_star, [&](std::size_t j) {
    return candidates.drifts[j].domain.dim();
  });
  report.m2_star = report.drift_ranking.front();

  report.fisher_gamma =
      fisher_scale(best_scale.fn, best_gamma, truth.scale_fn, pi0);
  const auto& best_drift = candidates.drifts[report.m2_star];
  report.fisher_alpha =
      fisher_drift(best_drift.fn, report.alpha_star[report.m2_star],
                   best_scale.fn, best_gamma, truth.drift_fn, pi0);
  report.fisher_gamma_pd = positive_definite(report.fisher_gamma);
  report.fisher_alpha_pd = positive_definite(report.fisher_alpha);
  return report;
}

}  // namespace sdeqbic
