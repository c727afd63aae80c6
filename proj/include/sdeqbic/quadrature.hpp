#pragma once

#include "sdeqbic/types.hpp"

#include <functional>
#include <vector>

namespace sdeqbic {

struct QuadratureRule {
  Vector nodes;
  Vector weights;
};

/// Physicists' Gauss-Hermite rule (weight e^{-x^2} on R) by Golub-Welsch.
QuadratureRule gauss_hermite(int n);

/// Gauss-Legendre rule on [-1, 1] by Golub-Welsch.
QuadratureRule gauss_legendre(int n);

/// E[f(X)] for X ~ N(0,1) using a Gauss-Hermite rule.
double expect_standard_normal(const std::function<double(double)>& f,
                              const QuadratureRule& gh);

struct AdaptiveOptions {
  double rel_tol = 1e-7;
  int max_panels = 20000;
};

/// Globally adaptive panel integration of f on [a, b]: panels are bisected
/// worst-error-first until the summed two-rule disagreement drops below
/// rel_tol times the running estimate. Throws NumericError with the residual
/// when the panel budget is exhausted.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, const AdaptiveOptions& opts = {});

/// Variant starting from a caller-supplied initial panel decomposition
/// (sorted edge list). Needed when the integrand is a spike far below the
/// root rule's resolution: the initial mesh must already bracket it or the
/// error estimates see only zeros.
double integrate_adaptive(const std::function<double(double)>& f,
                          const std::vector<double>& edges,
                          const AdaptiveOptions& opts = {});

/// Same scheme on an axis-aligned rectangle, splitting the relatively widest
/// axis first.
double integrate_adaptive_2d(const std::function<double(double, double)>& f,
                             double ax, double bx, double ay, double by,
                             const AdaptiveOptions& opts = {});

/// Rectangle variant with an initial tensor mesh given by per-axis edges.
double integrate_adaptive_2d(const std::function<double(double, double)>& f,
                             const std::vector<double>& x_edges,
                             const std::vector<double>& y_edges,
                             const AdaptiveOptions& opts = {});

/// Integral of f over the real line for integrands that decay at infinity
/// (density-weighted expectations). The range is doubled outward from [-8, 8]
/// until the tail contribution is negligible, then integrated adaptively.
double integrate_real_line(const std::function<double(double)>& f,
                           const AdaptiveOptions& opts = {});

}  // namespace sdeqbic
