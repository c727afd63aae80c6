#include "sdeqbic/qbic.hpp"

#include "sdeqbic/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdeqbic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// argmin with ties resolved by smaller dimension, then lower index.
template <class DimOf>
std::size_t argmin_tiebreak(const Vector& values, const DimOf& dim_of) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < static_cast<std::size_t>(values.size()); ++i) {
    const double v = values[static_cast<Eigen::Index>(i)];
    const double b = values[static_cast<Eigen::Index>(best)];
    if (v < b || (v == b && dim_of(i) < dim_of(best))) best = i;
  }
  return best;
}

// Softmax of -q/2 with the max-shift (min-criterion-shift) trick; infinite
// criteria get exactly zero mass.
Vector half_softmax(const Vector& q) {
  const double shift = q.minCoeff();
  Vector out(q.size());
  if (!std::isfinite(shift)) {
    // Every candidate excluded: spread mass evenly to keep the total at 100.
    out.setConstant(1.0 / static_cast<double>(q.size()));
    return out;
  }
  for (Eigen::Index i = 0; i < q.size(); ++i)
    out[i] = std::isfinite(q[i]) ? std::exp(-0.5 * (q[i] - shift)) : 0.0;
  return out / out.sum();
}

}  // namespace

double qbic_scale(double g1_at_max, int p_gamma, std::size_t n) {
  if (!std::isfinite(g1_at_max)) return kInf;
  return -2.0 * g1_at_max +
         p_gamma * std::log(static_cast<double>(n));
}

double qbic_drift(double g2_at_max, int p_alpha, double T) {
  if (!(T > 0.0))
    throw std::invalid_argument("qbic_drift: T must be positive");
  if (!std::isfinite(g2_at_max)) return kInf;
  return -2.0 * g2_at_max + p_alpha * std::log(T);
}

Matrix model_weights(const Vector& qbic1, const Matrix& qbic2) {
  if (qbic2.rows() != qbic1.size())
    throw std::invalid_argument("model_weights: row count mismatch");
  const Vector scale_factor = half_softmax(qbic1);
  Matrix w(qbic2.rows(), qbic2.cols());
  for (Eigen::Index m1 = 0; m1 < qbic2.rows(); ++m1) {
    const Vector row = half_softmax(qbic2.row(m1).transpose());
    w.row(m1) = (100.0 * scale_factor[m1]) * row.transpose();
  }
  return w;
}

QbicReport stepwise_select(const Path& path, const CandidateSet& candidates,
                           const SelectOptions& opts) {
  candidates.validate();
  path.validate();
  const std::size_t m1 = candidates.m1();
  const std::size_t m2 = candidates.m2();
  const std::size_t n = path.scheme.n;
  const double T = path.scheme.T;

  QbicReport report;
  report.qbic1 = Vector::Constant(static_cast<Eigen::Index>(m1), kInf);
  report.qbic2 =
      Matrix::Constant(static_cast<Eigen::Index>(m1),
                       static_cast<Eigen::Index>(m2), kInf);
  report.scale_fits.resize(m1);
  report.drift_fits.assign(m1, std::vector<std::optional<DriftFit>>(m2));

  for (std::size_t i = 0; i < m1; ++i) {
    const auto& cand = candidates.scales[i];
    try {
      ScaleFit fit = fit_scale(path, cand.fn, cand.domain, opts.fit);
      report.qbic1[static_cast<Eigen::Index>(i)] =
          qbic_scale(fit.g1_at_max, cand.domain.dim(), n);
      report.scale_fits[i] = std::move(fit);
    } catch (const std::exception& e) {
      report.failures.push_back(CandidateFailure{i, std::nullopt, e.what()});
    }
  }
  if (!(report.qbic1.minCoeff() < kInf))
    throw OptimizationFailureError(
        "stepwise_select: every scale candidate failed");

  report.selected_scale = argmin_tiebreak(report.qbic1, [&](std::size_t i) {
    return candidates.scales[i].domain.dim();
  });

  for (std::size_t i = 0; i < m1; ++i) {
    if (!report.scale_fits[i]) continue;
    const auto& scale = candidates.scales[i];
    const Vector& gamma = report.scale_fits[i]->gamma_hat;
    for (std::size_t j = 0; j < m2; ++j) {
      const auto& cand = candidates.drifts[j];
      try {
        DriftFit fit = fit_drift(path, cand.fn, cand.domain, scale.fn, gamma,
                                 opts.fit);
        report.qbic2(static_cast<Eigen::Index>(i),
                     static_cast<Eigen::Index>(j)) =
            qbic_drift(fit.g2_at_max, cand.domain.dim(), T);
        report.drift_fits[i][j] = std::move(fit);
      } catch (const std::exception& e) {
        report.failures.push_back(CandidateFailure{i, j, e.what()});
      }
    }
  }

  const Vector selected_row =
      report.qbic2.row(static_cast<Eigen::Index>(report.selected_scale))
          .transpose();
  if (!(selected_row.minCoeff() < kInf))
    throw OptimizationFailureError(
        "stepwise_select: every drift candidate failed under the selected "
        "scale");
  report.selected_drift = argmin_tiebreak(selected_row, [&](std::size_t j) {
    return candidates.drifts[j].domain.dim();
  });

  report.weights = model_weights(report.qbic1, report.qbic2);
  return report;
}

}  // namespace sdeqbic
