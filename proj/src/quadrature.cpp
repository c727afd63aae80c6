#include "sdeqbic/quadrature.hpp"

#include "sdeqbic/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace sdeqbic {

namespace {

// Nodes/weights from the symmetric Jacobi matrix of a three-term recurrence.
QuadratureRule golub_welsch(const Vector& offdiag, double total_weight) {
  const auto n = offdiag.size() + 1;
  Matrix jacobi = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    jacobi(i, i + 1) = offdiag[i];
    jacobi(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(jacobi);
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = total_weight * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  Vector b(n - 1);
  for (int k = 1; k < n; ++k) b[k - 1] = std::sqrt(k / 2.0);
  return golub_welsch(b, std::sqrt(std::numbers::pi));
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Vector b(n - 1);
  for (int k = 1; k < n; ++k)
    b[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(b, 2.0);
}

double expect_standard_normal(const std::function<double(double)>& f,
                              const QuadratureRule& gh) {
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < gh.nodes.size(); ++i)
    acc += gh.weights[i] * f(std::numbers::sqrt2 * gh.nodes[i]);
  return acc * inv_sqrt_pi;
}

namespace {

const QuadratureRule& gl8() {
  static const QuadratureRule rule = gauss_legendre(8);
  return rule;
}
const QuadratureRule& gl16() {
  static const QuadratureRule rule = gauss_legendre(16);
  return rule;
}
const QuadratureRule& gl4() {
  static const QuadratureRule rule = gauss_legendre(4);
  return rule;
}

double gl_interval(const std::function<double(double)>& f, double a, double b,
                   const QuadratureRule& rule) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

struct Panel1D {
  double a, b, lo, hi, err;
};

struct Panel2D {
  double ax, bx, ay, by, lo, hi, err;
};

double gl_rect(const std::function<double(double, double)>& f, double ax,
               double bx, double ay, double by, const QuadratureRule& rule) {
  const double mx = 0.5 * (ax + bx), hx = 0.5 * (bx - ax);
  const double my = 0.5 * (ay + by), hy = 0.5 * (by - ay);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const double x = mx + hx * rule.nodes[i];
    double row = 0.0;
    for (Eigen::Index j = 0; j < rule.nodes.size(); ++j)
      row += rule.weights[j] * f(x, my + hy * rule.nodes[j]);
    acc += rule.weights[i] * row;
  }
  return acc * hx * hy;
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f,
                          const std::vector<double>& edges,
                          const AdaptiveOptions& opts) {
  if (edges.size() < 2)
    throw std::invalid_argument("integrate_adaptive: need >= 2 edges");
  auto make = [&](double lo, double hi) {
    Panel1D p{lo, hi, gl_interval(f, lo, hi, gl8()),
              gl_interval(f, lo, hi, gl16()), 0.0};
    p.err = std::abs(p.hi - p.lo);
    return p;
  };
  auto cmp = [](const Panel1D& x, const Panel1D& y) { return x.err < y.err; };
  std::priority_queue<Panel1D, std::vector<Panel1D>, decltype(cmp)> queue(cmp);
  double total = 0.0, err = 0.0;
  int panels = 0;
  auto push = [&](const Panel1D& p) {
    total += p.hi;
    err += p.err;
    queue.push(p);
    ++panels;
  };
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1]))
      throw std::invalid_argument("integrate_adaptive: edges must increase");
    push(make(edges[i], edges[i + 1]));
  }
  while (err > opts.rel_tol * std::max(std::abs(total), 1e-300)) {
    if (panels >= opts.max_panels)
      throw NumericError("integrate_adaptive: panel budget exhausted",
                         err / std::max(std::abs(total), 1e-300));
    Panel1D worst = queue.top();
    queue.pop();
    total -= worst.hi;
    err -= worst.err;
    --panels;
    const double mid = 0.5 * (worst.a + worst.b);
    push(make(worst.a, mid));
    push(make(mid, worst.b));
  }
  return total;
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, const AdaptiveOptions& opts) {
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive: need a < b");
  return integrate_adaptive(f, std::vector<double>{a, b}, opts);
}

double integrate_adaptive_2d(const std::function<double(double, double)>& f,
                             const std::vector<double>& x_edges,
                             const std::vector<double>& y_edges,
                             const AdaptiveOptions& opts) {
  if (x_edges.size() < 2 || y_edges.size() < 2)
    throw std::invalid_argument("integrate_adaptive_2d: need >= 2 edges");
  const double wx0 = x_edges.back() - x_edges.front();
  const double wy0 = y_edges.back() - y_edges.front();
  auto make = [&](double x0, double x1, double y0, double y1) {
    Panel2D p{x0, x1, y0, y1, gl_rect(f, x0, x1, y0, y1, gl4()),
              gl_rect(f, x0, x1, y0, y1, gl8()), 0.0};
    p.err = std::abs(p.hi - p.lo);
    return p;
  };
  auto cmp = [](const Panel2D& x, const Panel2D& y) { return x.err < y.err; };
  std::priority_queue<Panel2D, std::vector<Panel2D>, decltype(cmp)> queue(cmp);
  double total = 0.0, err = 0.0;
  int panels = 0;
  auto push = [&](const Panel2D& p) {
    total += p.hi;
    err += p.err;
    queue.push(p);
    ++panels;
  };
  for (std::size_t i = 0; i + 1 < x_edges.size(); ++i)
    for (std::size_t j = 0; j + 1 < y_edges.size(); ++j) {
      if (!(x_edges[i] < x_edges[i + 1]) || !(y_edges[j] < y_edges[j + 1]))
        throw std::invalid_argument(
            "integrate_adaptive_2d: edges must increase");
      push(make(x_edges[i], x_edges[i + 1], y_edges[j], y_edges[j + 1]));
    }
  while (err > opts.rel_tol * std::max(std::abs(total), 1e-300)) {
    if (panels >= opts.max_panels)
      throw NumericError("integrate_adaptive_2d: panel budget exhausted",
                         err / std::max(std::abs(total), 1e-300));
    Panel2D worst = queue.top();
    queue.pop();
    total -= worst.hi;
    err -= worst.err;
    --panels;
    if ((worst.bx - worst.ax) / wx0 >= (worst.by - worst.ay) / wy0) {
      const double mid = 0.5 * (worst.ax + worst.bx);
      push(make(worst.ax, mid, worst.ay, worst.by));
      push(make(mid, worst.bx, worst.ay, worst.by));
    } else {
      const double mid = 0.5 * (worst.ay + worst.by);
      push(make(worst.ax, worst.bx, worst.ay, mid));
      push(make(worst.ax, worst.bx, mid, worst.by));
    }
  }
  return total;
}

double integrate_adaptive_2d(const std::function<double(double, double)>& f,
                             double ax, double bx, double ay, double by,
                             const AdaptiveOptions& opts) {
  return integrate_adaptive_2d(f, std::vector<double>{ax, bx},
                               std::vector<double>{ay, by}, opts);
}

double integrate_real_line(const std::function<double(double)>& f,
                           const AdaptiveOptions& opts) {
  double range = 8.0;
  double core = integrate_adaptive(f, -range, range, opts);
  for (int iter = 0; iter < 10; ++iter) {
    const double left = gl_interval(f, -2.0 * range, -range, gl16());
    const double right = gl_interval(f, range, 2.0 * range, gl16());
    const double tail = std::abs(left) + std::abs(right);
    if (tail <= 0.1 * opts.rel_tol * std::max(std::abs(core), 1e-300))
      return core;
    core += integrate_adaptive(f, -2.0 * range, -range, opts) +
            integrate_adaptive(f, range, 2.0 * range, opts);
    range *= 2.0;
  }
  throw NumericError("integrate_real_line: integrand does not decay", range);
}

}  // namespace sdeqbic
