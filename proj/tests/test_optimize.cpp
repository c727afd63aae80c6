#include "sdeqbic/optimize.hpp"

#include "sdeqbic/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace sdeqbic;

TEST_CASE("interior quadratic maximum is found to high accuracy") {
  const ParameterDomain box = uniform_box(2, -5, 5);
  Vector target(2);
  target << 1.3, -0.7;
  const OptimizeResult res = maximize_box(
      [&](const Vector& x) { return -(x - target).squaredNorm(); }, box);
  CHECK((res.x - target).norm() <= 1e-6);
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(res.diag.converged);
  CHECK_FALSE(res.diag.boundary_contact);
}

TEST_CASE("maximum outside the box lands on the boundary with the flag") {
  const ParameterDomain box = uniform_box(1, -1, 1);
  const OptimizeResult res = maximize_box(
      [&](const Vector& x) { return -(x[0] - 3.0) * (x[0] - 3.0); }, box);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.diag.boundary_contact);
}

TEST_CASE("rejected regions (-inf) are avoided") {
  const ParameterDomain box = uniform_box(1, -4, 4);
  const OptimizeResult res = maximize_box(
      [&](const Vector& x) {
        if (x[0] < 0.0) return -std::numeric_limits<double>::infinity();
        return -(x[0] - 0.5) * (x[0] - 0.5);
      },
      box);
  CHECK(res.x[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("an always-rejecting objective raises") {
  const ParameterDomain box = uniform_box(1, 0, 1);
  CHECK_THROWS_AS(
      maximize_box([](const Vector&) {
        return -std::numeric_limits<double>::infinity();
      }, box),
      OptimizationFailureError);
}

TEST_CASE("two symmetric optima set the multiplicity diagnostic") {
  const ParameterDomain box = uniform_box(1, -2, 2);
  // Twin peaks at +-1 of exactly equal height.
  const OptimizeResult res = maximize_box(
      [&](const Vector& x) {
        const double d = x[0] * x[0] - 1.0;
        return -d * d;
      },
      box);
  CHECK(std::abs(res.x[0]) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.diag.multiplicity);
}

TEST_CASE("multistart points are deterministic and interior") {
  const ParameterDomain box = uniform_box(2, -3, 7);
  const auto pts = multistart_points(box, 9);
  REQUIRE(pts.size() == 9);
  CHECK((pts[0] - box.center()).norm() == 0.0);
  for (const auto& p : pts) CHECK(box.contains(p));
  const auto pts2 = multistart_points(box, 9);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK((pts[i] - pts2[i]).norm() == 0.0);
}

TEST_CASE("monotone acceptance: returned value is max over probes") {
  // A narrow spike on a plateau: single-start NM may converge on the
  // plateau, but the best probed point is what must be returned.
  const ParameterDomain box = uniform_box(1, 0, 1);
  long evals = 0;
  const OptimizeResult res = maximize_box(
      [&](const Vector& x) {
        ++evals;
        return -std::min(1.0, std::abs(x[0] - 0.37) * 50.0);
      },
      box);
  CHECK(res.value <= 0.0);
  CHECK(res.value >= -1.0);
  CHECK(res.diag.evaluations == evals);
}
