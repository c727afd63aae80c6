#include "sdeqbic/limits.hpp"

#include "sdeqbic/registry.hpp"
#include "sdeqbic/simulate.hpp"

#include <doctest.h>

#include <cmath>

using namespace sdeqbic;

namespace {

CoefficientFunction constant_scale() {
  CoefficientFunction fn;
  fn.evaluate = [](double, const Vector& g) { return g[0]; };
  fn.gradient = [](double, const Vector&) { return Vector(Vector::Ones(1)); };
  fn.hessian = [](double, const Vector&) { return Matrix(Matrix::Zero(1, 1)); };
  return fn;
}

const std::function<double(double)> unit_C = [](double) { return 1.0; };
const std::function<double(double)> ou_A = [](double x) { return -0.5 * x; };

}  // namespace

TEST_CASE("limit scale contrast closed form for a constant scale") {
  const auto pi0 = StationaryDistribution::standard_normal();
  const CoefficientFunction c = constant_scale();
  for (double g : {0.5, 1.0, 2.0}) {
    CHECK(limit_scale_contrast(c, Vector::Constant(1, g), unit_C, pi0) ==
          doctest::Approx(-(std::log(g * g) + 1.0 / (g * g))).epsilon(1e-10));
  }
  auto [gstar, value] = optimize_limit(
      [&](const Vector& g) {
        return limit_scale_contrast(c, g, unit_C, pi0);
      },
      uniform_box(1, 0.05, 10));
  CHECK(gstar[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(value == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("limit drift contrast: a perfectly matching family attains 0") {
  const auto pi0 = StationaryDistribution::standard_normal();
  const CoefficientFunction a = make_linear_drift({[](double x) { return -x; }});
  auto [astar, value] = optimize_limit(
      [&](const Vector& al) {
        return limit_drift_contrast(a, al, constant_scale(), Vector::Ones(1),
                                    ou_A, pi0);
      },
      uniform_box(1, 0.1, 10));
  CHECK(astar[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("diffusion-4.1 limit values (population regression anchors)") {
  const auto& e = find_experiment("diffusion-4.1");
  const auto pi0 = StationaryDistribution::standard_normal();
  const LimitReport report = optimal_model(e.candidates, e.truth, pi0);

  // Values of the seven scale optima; the first six match the published
  // table, the seventh is the argmax of the defined functional.
  const double expected[7] = {-1.2089, -1.2822, -1.4833, -1.6225,
                              -1.4833, -1.2602, -1.2859};
  for (int i = 0; i < 7; ++i)
    CHECK(report.g1_star[i] == doctest::Approx(expected[i]).epsilon(2e-4));

  // drift1/drift2 match the published table; drift3's -0.0897 is the argmax
  // of the defined functional at alpha = 0 (the published -0.0979 equals the
  // contrast at alpha = 0.1, a domain-boundary artifact).
  const double drift_expected[3] = {-0.0624, -0.8193, -0.0897};
  for (int i = 0; i < 3; ++i)
    CHECK(report.g2_star[i] == doctest::Approx(drift_expected[i]).epsilon(2e-3));

  CHECK(report.m1_star == 0);
  CHECK(report.m2_star == 0);
  CHECK(report.fisher_gamma_pd);
  CHECK(report.fisher_alpha_pd);

  // scale3 and scale5 tie at -1.4833; the 1-parameter scale5 must rank
  // ahead of the 2-parameter scale3.
  const auto pos = [&](std::size_t idx) {
    for (std::size_t r = 0; r < report.scale_ranking.size(); ++r)
      if (report.scale_ranking[r] == idx) return r;
    return std::size_t(99);
  };
  CHECK(std::abs(report.g1_star[2] - report.g1_star[4]) <= 1e-6);
  CHECK(pos(4) < pos(2));
}

TEST_CASE("fisher matrices: closed-form reductions") {
  const auto pi0 = StationaryDistribution::standard_normal();

  // Correctly specified constant scale: I_gamma = 4.
  const Matrix ig = fisher_scale(constant_scale(), Vector::Ones(1), unit_C, pi0);
  CHECK(ig(0, 0) == doctest::Approx(4.0).epsilon(1e-10));

  // Correctly specified linear drift a = -alpha x, c = 1: I_alpha = 2 E[x^2].
  const CoefficientFunction lin = make_linear_drift({[](double x) { return -x; }});
  const Matrix ia = fisher_drift(lin, Vector::Constant(1, 0.5), constant_scale(),
                                 Vector::Ones(1), ou_A, pi0);
  CHECK(ia(0, 0) == doctest::Approx(2.0).epsilon(1e-10));

  // Misspecified constant drift: the hessian term vanishes, I_alpha = 2 E[1].
  const CoefficientFunction con = make_linear_drift({[](double) { return 1.0; }});
  const Matrix ic = fisher_drift(con, Vector::Zero(1), constant_scale(),
                                 Vector::Ones(1), ou_A, pi0);
  CHECK(ic(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("fisher regression anchors for the scale1/drift1 optimum") {
  // Frozen from the quadrature oracle; 201- and 402-node rules agree on
  // these to ~1e-8.
  const auto& e = find_experiment("diffusion-4.1");
  const auto& s1 = find_scale("scale1");
  const auto& d1 = find_drift("drift1");
  const auto pi0 = StationaryDistribution::standard_normal();
  auto [gstar, v1] = optimize_limit(
      [&](const Vector& g) {
        return limit_scale_contrast(s1.fn, g, e.truth.scale_fn, pi0);
      },
      s1.domain);
  CHECK(gstar[0] == doctest::Approx(-0.2280722).epsilon(1e-4));
  CHECK(std::abs(gstar[1]) <= 1e-5);
  CHECK(v1 == doctest::Approx(-1.2089038).epsilon(1e-6));

  const Matrix ig = fisher_scale(s1.fn, gstar, e.truth.scale_fn, pi0);
  CHECK(ig(0, 0) == doctest::Approx(2.2476601).epsilon(1e-5));
  CHECK(ig(1, 1) == doctest::Approx(0.3750580).epsilon(1e-5));
  CHECK(std::abs(ig(0, 1)) <= 1e-5);
  CHECK(std::abs(ig(0, 1) - ig(1, 0)) <= 1e-12);  // symmetric by construction

  auto [astar, v2] = optimize_limit(
      [&](const Vector& a) {
        return limit_drift_contrast(d1.fn, a, s1.fn, gstar, e.truth.drift_fn,
                                    pi0);
      },
      d1.domain);
  CHECK(astar[0] == doctest::Approx(0.1522579).epsilon(1e-4));
  CHECK(v2 == doctest::Approx(-0.0623761).epsilon(1e-5));
  const Matrix ia = fisher_drift(d1.fn, astar, s1.fn, gstar, e.truth.drift_fn,
                                 pi0);
  CHECK(ia(0, 0) == doctest::Approx(2.3561929).epsilon(1e-5));
}

TEST_CASE("correctly specified reduction of the scale fisher matrix") {
  // levy-scale3 with C(x) = 1/(1+x^2) is correctly specified at gamma = 1:
  // the second integral vanishes and I reduces to 4 E[(dc/c)^2].
  const auto& s3 = find_scale("levy-scale3");
  const auto C = [](double x) { return 1.0 / (1.0 + x * x); };
  const auto pi0 = StationaryDistribution::standard_normal();
  const Matrix full = fisher_scale(s3.fn, Vector::Ones(1), C, pi0);
  const double reduced = 4.0 * pi0.expect([&](double x) {
    const double c = s3.fn.evaluate(x, Vector::Ones(1));
    const double dc = s3.fn.param_gradient(x, Vector::Ones(1))[0];
    return dc * dc / (c * c);
  });
  CHECK(full(0, 0) == doctest::Approx(reduced).epsilon(1e-9));
}

TEST_CASE("ergodic average agrees with closed-form quadrature within 2%") {
  // pi0 of the diffusion truth is N(0,1); compare the empirical estimator
  // of G1 at a fixed gamma from a T = 5000 exact OU path.
  const auto& s1 = find_scale("scale1");
  Vector gamma(2);
  gamma << -0.3, 0.2;
  const auto gh = StationaryDistribution::standard_normal();
  const double closed = limit_scale_contrast(s1.fn, gamma, unit_C, gh);

  const Path long_path = exact_ou_path(0.5, 1.0, make_scheme(510000, 0.01),
                                       0.0, RngStream{404, 0});
  const auto emp = StationaryDistribution::empirical(long_path, 100.0);
  const double estimated = limit_scale_contrast(s1.fn, gamma, unit_C, emp);
  CHECK(estimated == doctest::Approx(closed).epsilon(0.02));
}

TEST_CASE("empirical drift fisher is seed stable within 2%") {
  // The ergodic-average error of this integrand has ~2.7% sd at T = 5000,
  // so the 2% two-path agreement needs a longer window; T = 20000 brings
  // the sd to ~1.3% and these two pinned streams agree to 0.1%.
  const auto& e = find_experiment("nig-4.2");
  const auto& d2 = find_drift("levy-drift2");
  const auto& s3 = find_scale("levy-scale3");
  double values[2];
  int k = 0;
  for (std::uint64_t seed : {7000, 7002}) {
    const Path lp = euler_path(e.truth, make_scheme(2010000, 0.01), 10,
                               RngStream{seed, 0});
    const auto pi0 = StationaryDistribution::empirical(lp, 100.0);
    values[k] = fisher_drift(d2.fn, Vector::Constant(1, 0.5), s3.fn,
                             Vector::Ones(1), e.truth.drift_fn, pi0)(0, 0);
    CHECK(values[k] > 0.0);
    ++k;
  }
  CHECK(values[0] == doctest::Approx(values[1]).epsilon(0.02));
}

TEST_CASE("stationary distribution invariants") {
  // A non-normalized density is rejected.
  CHECK_THROWS_AS(StationaryDistribution::closed_form(
                      [](double x) { return std::exp(-x * x); }),
                  std::invalid_argument);
  // A normalized non-Gaussian density is accepted and integrates moments.
  const auto laplace = StationaryDistribution::closed_form([](double x) {
    return 0.5 * std::exp(-std::abs(x));
  });
  CHECK(laplace.expect([](double x) { return x * x; }) ==
        doctest::Approx(2.0).epsilon(1e-6));

  // Empirical paths need 1000 time units after burn-in.
  const Path brief = exact_ou_path(0.5, 1.0, make_scheme(1000, 0.01), 0.0,
                                   RngStream{1, 1});
  CHECK_THROWS_AS(StationaryDistribution::empirical(brief, 0.0),
                  std::invalid_argument);
}
