#include "sdeqbic/optimize.hpp"

#include "sdeqbic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace sdeqbic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Generalized golden ratios: unique positive root of x^{d+1} = x + 1.
double plastic_alpha(int dim, int coord) {
  double g = 1.5;
  for (int i = 0; i < 64; ++i) g = std::pow(1.0 + g, 1.0 / (dim + 1));
  return std::fmod(1.0 / std::pow(g, coord + 1), 1.0);
}

struct SingleRun {
  Vector x;
  double value = kNegInf;
  bool converged = false;
};

// One Nelder-Mead descent (maximization) with projected evaluations.
// `best_x`/`best_f` accumulate the best probe seen across the whole call.
SingleRun nelder_mead(const Objective& f, const ParameterDomain& box,
                      const Vector& start, const OptimizeOptions& opts,
                      long& evals, Vector& best_x, double& best_f) {
  const int dim = box.dim();
  const Vector widths = box.widths();

  auto probe = [&](const Vector& v) {
    const Vector p = box.project(v);
    double val = f(p);
    if (std::isnan(val)) val = kNegInf;
    ++evals;
    if (val > best_f) {
      best_f = val;
      best_x = p;
    }
    return val;
  };

  std::vector<Vector> xs(dim + 1, start);
  std::vector<double> fs(dim + 1);
  for (int i = 0; i < dim; ++i) {
    double step = 0.05 * widths[i];
    if (start[i] + step > box.upper[i]) step = -step;
    xs[i + 1][i] += step;
  }
  for (int i = 0; i <= dim; ++i) fs[i] = probe(xs[i]);

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  int used = dim + 1;
  SingleRun out;
  while (used < opts.max_evals_per_start) {
    std::vector<int> order(dim + 1);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fs[a] > fs[b]; });
    {
      std::vector<Vector> xs2(dim + 1);
      std::vector<double> fs2(dim + 1);
      for (int i = 0; i <= dim; ++i) {
        xs2[i] = xs[order[i]];
        fs2[i] = fs[order[i]];
      }
      xs.swap(xs2);
      fs.swap(fs2);
    }

    double diameter = 0.0;
    for (int i = 1; i <= dim; ++i)
      diameter = std::max(diameter, (xs[i] - xs[0]).norm());
    if (diameter < opts.tol * (1.0 + xs[0].norm())) {
      out.converged = true;
      break;
    }

    Vector centroid = Vector::Zero(dim);
    for (int i = 0; i < dim; ++i) centroid += xs[i];
    centroid /= dim;

    const Vector xr = centroid + alpha * (centroid - xs[dim]);
    const double fr = probe(xr);
    ++used;
    if (fr > fs[0]) {
      const Vector xe = centroid + gamma * (xr - centroid);
      const double fe = probe(xe);
      ++used;
      if (fe > fr) {
        xs[dim] = xe;
        fs[dim] = fe;
      } else {
        xs[dim] = xr;
        fs[dim] = fr;
      }
    } else if (fr > fs[dim - 1]) {
      xs[dim] = xr;
      fs[dim] = fr;
    } else {
      const bool outside = fr > fs[dim];
      const Vector xc =
          outside ? centroid + rho * (xr - centroid)
                  : centroid + rho * (xs[dim] - centroid);
      const double fc = probe(xc);
      ++used;
      if (fc > (outside ? fr : fs[dim])) {
        xs[dim] = xc;
        fs[dim] = fc;
      } else {
        for (int i = 1; i <= dim; ++i) {
          xs[i] = xs[0] + sigma * (xs[i] - xs[0]);
          fs[i] = probe(xs[i]);
          ++used;
        }
      }
    }
  }

  int arg = 0;
  for (int i = 1; i <= dim; ++i)
    if (fs[i] > fs[arg]) arg = i;
  out.x = box.project(xs[arg]);
  out.value = fs[arg];
  return out;
}

}  // namespace

std::vector<Vector> multistart_points(const ParameterDomain& domain,
                                      int count) {
  domain.validate();
  const int dim = domain.dim();
  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(count));
  points.push_back(domain.center());
  Vector alphas(dim);
  for (int k = 0; k < dim; ++k) alphas[k] = plastic_alpha(dim, k);
  const Vector widths = domain.widths();
  for (int i = 1; i < count; ++i) {
    Vector p(dim);
    for (int k = 0; k < dim; ++k) {
      const double frac = std::fmod(0.5 + i * alphas[k], 1.0);
      p[k] = domain.lower[k] + widths[k] * (0.05 + 0.9 * frac);
    }
    points.push_back(std::move(p));
  }
  return points;
}

OptimizeResult maximize_box(const Objective& objective,
                            const ParameterDomain& domain,
                            const OptimizeOptions& opts) {
  domain.validate();
  if (opts.starts < 1)
    throw std::invalid_argument("maximize_box: need at least one start");

  long evals = 0;
  Vector best_x = domain.center();
  double best_f = kNegInf;

  std::vector<SingleRun> runs;
  runs.reserve(static_cast<std::size_t>(opts.starts));
  for (const Vector& start : multistart_points(domain, opts.starts))
    runs.push_back(
        nelder_mead(objective, domain, start, opts, evals, best_x, best_f));

  OptimizeResult out;
  out.diag.evaluations = evals;
  out.diag.starts_used = opts.starts;
  out.diag.converged =
      std::any_of(runs.begin(), runs.end(),
                  [](const SingleRun& r) { return r.converged; });
  if (!out.diag.converged) {
    std::ostringstream os;
    os << "maximize_box: no start converged within "
       << opts.max_evals_per_start << " evaluations (starts=" << opts.starts
       << ", best value " << best_f << ")";
    throw OptimizationFailureError(os.str());
  }
  if (!std::isfinite(best_f)) {
    throw OptimizationFailureError(
        "maximize_box: objective was rejected at every probe point");
  }

  for (std::size_t i = 0; i < runs.size() && !out.diag.multiplicity; ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      if (!std::isfinite(runs[i].value) || !std::isfinite(runs[j].value))
        continue;
      if ((runs[i].x - runs[j].x).norm() >= 1e-4 &&
          std::abs(runs[i].value - runs[j].value) < 1e-8) {
        out.diag.multiplicity = true;
        break;
      }
    }

  out.x = best_x;
  out.value = best_f;
  const Vector widths = domain.widths();
  for (int k = 0; k < domain.dim(); ++k) {
    const double margin = opts.boundary_tol * widths[k];
    if (out.x[k] - domain.lower[k] <= margin ||
        domain.upper[k] - out.x[k] <= margin) {
      out.diag.boundary_contact = true;
      break;
    }
  }
  return out;
}

}  // namespace sdeqbic
