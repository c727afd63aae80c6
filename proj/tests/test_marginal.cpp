#include "sdeqbic/marginal.hpp"

#include "sdeqbic/errors.hpp"
#include "sdeqbic/limits.hpp"
#include "sdeqbic/registry.hpp"
#include "sdeqbic/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sdeqbic;

namespace {

CoefficientFunction constant_scale() {
  CoefficientFunction fn;
  fn.evaluate = [](double, const Vector& g) { return g[0]; };
  fn.gradient = [](double, const Vector&) { return Vector(Vector::Ones(1)); };
  fn.hessian = [](double, const Vector&) { return Matrix(Matrix::Zero(1, 1)); };
  return fn;
}

Path ou_path(std::size_t n, double h, std::uint64_t stream) {
  return exact_ou_path(0.5, 1.0, make_scheme(n, h), 0.0,
                       RngStream{31415, stream});
}

}  // namespace

TEST_CASE("uniform prior validates; a lopsided one does not") {
  const ParameterDomain box = uniform_box(2, -1, 3);
  const PriorDensity prior = uniform_prior(box);
  CHECK(prior.sup_bound == doctest::Approx(1.0 / 16.0));
  CHECK_NOTHROW(validate_prior(prior, box));

  PriorDensity off = prior;
  off.density = [](const Vector&) { return 0.5; };
  CHECK_THROWS_AS(validate_prior(off, box), std::invalid_argument);
}

TEST_CASE("log_integral_exp nails the exact Gaussian integral") {
  // Synthetic exactly-quadratic contrast G(g) = -(n/2) I (g - ghat)^2 with a
  // uniform prior on a wide box: the marginal equals the expansion exactly.
  const double n = 4000.0, info = 1.7, ghat = 0.37;
  const ParameterDomain box = uniform_box(1, -6, 6);
  const PriorDensity prior = uniform_prior(box);
  const auto log_f = [&](const Vector& g) {
    const double d = g[0] - ghat;
    return -0.5 * n * info * d * d;
  };
  const double lm = log_integral_exp(log_f, box, prior,
                                     Vector::Constant(1, ghat), 0.0);
  const double exact = 0.0 - 0.5 * std::log(n) + std::log(prior.sup_bound) +
                       0.5 * std::log(2 * std::numbers::pi) -
                       0.5 * std::log(info);
  CHECK(lm == doctest::Approx(exact).epsilon(1e-6));

  // Shift invariance: adding a constant to the contrast adds it exactly.
  const double offset = -12345.6789;
  const double lm2 = log_integral_exp(
      [&](const Vector& g) { return log_f(g) + offset; }, box, prior,
      Vector::Constant(1, ghat), offset);
  CHECK(lm2 - lm == doctest::Approx(offset).epsilon(1e-10));
}

TEST_CASE("expansion prediction arithmetic") {
  // g1 = 0, p = 1, n = e^2, prior 1, I = 1: -1 + (1/2) log 2 pi.
  const Matrix eye = Matrix::Identity(1, 1);
  CHECK(expansion_prediction_scale(0.0, 1, 7, 1.0, eye) ==
        doctest::Approx(-0.5 * std::log(7.0) +
                        0.5 * std::log(2 * std::numbers::pi)));
  const double at_e2 =
      0.0 - 0.5 * 2.0 + 0.5 * std::log(2 * std::numbers::pi);
  CHECK(at_e2 == doctest::Approx(-0.0811).epsilon(1e-3));

  // p = 0 degenerates to g1 itself.
  CHECK(expansion_prediction_scale(-3.25, 0, 1000, 1.0, Matrix()) ==
        doctest::Approx(-3.25));

  // Non-positive-definite fisher is rejected.
  Matrix bad(1, 1);
  bad << -1.0;
  CHECK_THROWS_AS(expansion_prediction_scale(0.0, 1, 10, 1.0, bad),
                  std::invalid_argument);
  CHECK_THROWS_AS(expansion_prediction_drift(0.0, 1, 0.0, 1.0, eye),
                  std::invalid_argument);
}

TEST_CASE("dimension cap") {
  const ParameterDomain box3 = uniform_box(3, 0, 1);
  const PriorDensity prior{[](const Vector&) { return 1.0; }, 1.0};
  CHECK_THROWS_AS(log_integral_exp([](const Vector&) { return 0.0; }, box3,
                                   prior, Vector::Zero(3), 0.0),
                  UnsupportedDimensionError);
}

TEST_CASE("scale marginal: quadrature vs closed form for c = gamma") {
  // For the constant scale the contrast is exactly
  //   G1(g) = -n log g^2 - S/(h g^2),  S = sum (dX)^2,
  // so the marginal over a box is a closed-form 1d integral we can evaluate
  // against with an independent fine Simpson rule.
  const Path p = ou_path(800, 0.01, 1);
  const double S = increments(p).squaredNorm();
  const double n = static_cast<double>(p.scheme.n);
  const ParameterDomain box = uniform_box(1, 0.5, 2.0);
  const PriorDensity prior = uniform_prior(box);

  const double lm =
      log_marginal_scale(p, constant_scale(), box, prior);

  const auto g1 = [&](double g) {
    return -n * std::log(g * g) - S / (p.scheme.h * g * g);
  };
  const double shift = g1(std::sqrt(S / (n * p.scheme.h)));
  const int panels = 200001;  // fine Simpson oracle
  double acc = 0.0;
  const double width = (2.0 - 0.5) / (panels - 1);
  for (int i = 0; i < panels; ++i) {
    const double g = 0.5 + i * width;
    const double w = (i == 0 || i == panels - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::exp(g1(g) - shift);
  }
  acc *= width / 3.0 * prior.sup_bound;
  CHECK(lm == doctest::Approx(shift + std::log(acc)).epsilon(1e-7));
}

TEST_CASE("drift marginal equals the truncated-Gaussian closed form") {
  // Linear-in-alpha drift: the contrast is exactly quadratic, so the
  // marginal is a Gaussian integral truncated to the box (erf closed form).
  const Path p = ou_path(1500, 0.01, 2);
  const auto& d2 = find_drift("drift2");
  const CoefficientFunction c = constant_scale();
  const Vector gamma = Vector::Ones(1);
  const ParameterDomain box = d2.domain;  // [0.1, 10]
  const PriorDensity prior = uniform_prior(box);

  const double lm = log_marginal_drift(p, d2.fn, box, prior, c, gamma);

  // Quadratic coefficients of G2(alpha) via three exact evaluations.
  const auto g2 = [&](double a) {
    return drift_contrast(p, d2.fn, Vector::Constant(1, a), c, gamma);
  };
  const double f0 = g2(0.0), f1 = g2(1.0), fm1 = g2(-1.0);
  const double quad = 0.5 * (f1 + fm1) - f0;       // -H/2
  const double lin = 0.5 * (f1 - fm1);
  const double H = -2.0 * quad;
  const double center = lin / H;
  const double peak = f0 + 0.5 * H * center * center;
  const auto Phi = [](double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
  };
  const double mass = Phi((box.upper[0] - center) * std::sqrt(H)) -
                      Phi((box.lower[0] - center) * std::sqrt(H));
  const double exact = peak + 0.5 * std::log(2 * std::numbers::pi / H) +
                       std::log(prior.sup_bound) + std::log(mass);
  CHECK(lm == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("a prior supported away from the fit loses the peak mass") {
  const Path p = ou_path(1000, 0.01, 3);
  const CoefficientFunction c = constant_scale();
  const ParameterDomain box = uniform_box(1, 0.5, 2.0);
  const ScaleFit fit = fit_scale(p, c, box);
  REQUIRE(fit.gamma_hat[0] < 1.4);  // the peak sits near 1

  // Uniform prior on [1.5, 2] only.
  PriorDensity away;
  away.density = [](const Vector& g) {
    return (g[0] >= 1.5 && g[0] <= 2.0) ? 2.0 : 0.0;
  };
  away.sup_bound = 2.0;
  const double lm = log_marginal_scale(p, c, box, away);

  const auto pi0 = StationaryDistribution::standard_normal();
  const Matrix fisher =
      fisher_scale(c, Vector::Ones(1), [](double) { return 1.0; }, pi0);
  const double prediction = expansion_prediction_scale(
      fit.g1_at_max, 1, p.scheme.n, away.sup_bound, fisher);
  CHECK(lm < prediction);
}

TEST_CASE("expansion residual shrinks with T for the drift step") {
  // a == A case: drift2 under a constant scale on exact OU data; the
  // Laplace residual at T = 50 should sit well below the one at T = 10
  // for most draws. One seeded draw keeps the unit test deterministic;
  // the statistical version lives in the acceptance suite.
  const auto& d2 = find_drift("drift2");
  const CoefficientFunction c = constant_scale();
  const ParameterDomain box = d2.domain;
  const PriorDensity prior = uniform_prior(box);
  const auto pi0 = StationaryDistribution::standard_normal();
  const Matrix fisher = fisher_drift(d2.fn, Vector::Constant(1, 0.5), c,
                                     Vector::Ones(1),
                                     [](double x) { return -0.5 * x; }, pi0);

  double residual[2];
  int k = 0;
  for (double T : {10.0, 50.0}) {
    const Path p = ou_path(static_cast<std::size_t>(T / 0.01), 0.01, 17);
    const ScaleFit sf = fit_scale(p, c, uniform_box(1, 0.05, 10));
    const DriftFit df = fit_drift(p, d2.fn, box, c, sf.gamma_hat);
    const double lm = log_marginal_drift(p, d2.fn, box, prior, c, sf.gamma_hat);
    const double pred = expansion_prediction_drift(df.g2_at_max, 1, T,
                                                   prior.sup_bound, fisher);
    residual[k++] = std::abs(lm - pred);
  }
  CHECK(residual[1] < residual[0]);
}
