#pragma once

#include "sdeqbic/types.hpp"

#include <functional>
#include <vector>

namespace sdeqbic {

struct OptimizeOptions {
  int max_evals_per_start = 2000;  ///< evaluation budget of one simplex run
  double tol = 1e-8;               ///< simplex diameter below tol*(1+|x|) converges
  int starts = 9;                  ///< domain center + quasi-random interior points
  double boundary_tol = 1e-6;      ///< boundary contact within tol*width of a face
};

struct OptimizeDiagnostics {
  long evaluations = 0;
  int starts_used = 0;
  bool converged = false;
  bool boundary_contact = false;
  /// Two starts ended >= 1e-4 apart in the parameter with a value gap < 1e-8.
  bool multiplicity = false;
};

struct OptimizeResult {
  Vector x;
  double value = 0.0;
  OptimizeDiagnostics diag;
};

/// Objective to maximize; may return -infinity to reject a point.
using Objective = std::function<double(const Vector&)>;

/// Deterministic low-discrepancy interior points: the domain center followed
/// by count-1 points of an additive golden-ratio lattice, kept 5% away from
/// the faces.
std::vector<Vector> multistart_points(const ParameterDomain& domain, int count);

/// Multistart Nelder-Mead maximization over a closed box. Vertices may wander
/// outside; the objective is always evaluated at the projection onto the box,
/// and the reported maximizer is projected. Tracks the best point over every
/// probe, so the returned value is monotone in the set of evaluations. Throws
/// OptimizationFailureError when no start converges.
OptimizeResult maximize_box(const Objective& objective,
                            const ParameterDomain& domain,
                            const OptimizeOptions& opts = {});

}  // namespace sdeqbic
