#include "sdeqbic/gql.hpp"

#include "sdeqbic/errors.hpp"
#include "sdeqbic/registry.hpp"
#include "sdeqbic/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sdeqbic;

namespace {

CoefficientFunction constant_scale() {
  CoefficientFunction fn;
  fn.evaluate = [](double, const Vector& g) { return g[0]; };
  fn.gradient = [](double, const Vector&) { return Vector(Vector::Ones(1)); };
  fn.hessian = [](double, const Vector&) { return Matrix(Matrix::Zero(1, 1)); };
  return fn;
}

CoefficientFunction constant_drift() {  // a(x, alpha) = alpha
  return make_linear_drift({[](double) { return 1.0; }});
}

Path ou_path(std::size_t n, double h, std::uint64_t stream) {
  TrueModel m;
  m.drift_fn = [](double x) { return -0.5 * x; };
  m.scale_fn = [](double) { return 1.0; };
  m.noise = NoiseSpec::wiener();
  m.x0 = 0.0;
  return euler_path(m, make_scheme(n, h), 10, RngStream{20240708, stream});
}

}  // namespace

TEST_CASE("scale contrast closed forms for a constant scale") {
  const Path p = ou_path(500, 0.01, 1);
  const Vector dx = increments(p);
  const double ss = dx.squaredNorm();
  const CoefficientFunction c = constant_scale();

  // gamma = 1: the log term vanishes.
  CHECK(scale_contrast(p, c, Vector::Ones(1)) ==
        doctest::Approx(-ss / p.scheme.h).epsilon(1e-12));

  // General closed form: -n log g^2 - ss / (h g^2).
  const double g = 1.7;
  CHECK(scale_contrast(p, c, Vector::Constant(1, g)) ==
        doctest::Approx(-static_cast<double>(p.scheme.n) * std::log(g * g) -
                        ss / (p.scheme.h * g * g))
            .epsilon(1e-12));
}

TEST_CASE("single-increment path of two equal points") {
  Path p;
  p.scheme = SamplingScheme{1, 0.25, 0.25};  // n = 1 by direct construction
  p.values = Vector::Constant(2, 3.0);
  CHECK(scale_contrast(p, constant_scale(), Vector::Constant(1, 2.0)) ==
        doctest::Approx(-std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("fit_scale matches the closed-form maximizer") {
  const Path p = ou_path(2000, 0.01, 2);
  const double gamma_closed =
      std::sqrt(increments(p).squaredNorm() /
                (static_cast<double>(p.scheme.n) * p.scheme.h));
  const ScaleFit fit =
      fit_scale(p, constant_scale(), uniform_box(1, 0.05, 10));
  CHECK(fit.gamma_hat[0] == doctest::Approx(gamma_closed).epsilon(1e-6));
  CHECK(fit.diag.converged);
  CHECK_FALSE(fit.diag.boundary_contact);
}

TEST_CASE("a domain excluding the optimum pins the fit to the boundary") {
  const Path p = ou_path(2000, 0.01, 3);
  // True optimum is near 1; the box stops at 0.5.
  const ScaleFit fit =
      fit_scale(p, constant_scale(), uniform_box(1, 0.05, 0.5));
  CHECK(fit.gamma_hat[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fit.diag.boundary_contact);
}

TEST_CASE("drift contrast: perfect fit, non-positivity, closed form") {
  const Path p = ou_path(300, 0.01, 4);
  const CoefficientFunction c = constant_scale();
  const Vector gamma = Vector::Ones(1);
  const CoefficientFunction a = constant_drift();

  // Any alpha keeps the contrast non-positive.
  for (double alpha : {-2.0, 0.0, 0.5, 3.0})
    CHECK(drift_contrast(p, a, Vector::Constant(1, alpha), c, gamma) <= 0.0);

  // Perfect fit: a drift reproducing every increment attains the maximum 0.
  CoefficientFunction oracle;
  const Vector dx = increments(p);
  oracle.evaluate = [&p, dx](double x, const Vector&) {
    for (Eigen::Index j = 0; j < dx.size(); ++j)
      if (p.values[j] == x) return dx[j] / p.scheme.h;
    return 0.0;
  };
  CHECK(drift_contrast(p, oracle, Vector::Zero(1), c, gamma) ==
        doctest::Approx(0.0).epsilon(1e-20));

  // Constant drift maximizer: alpha_hat = (X_T - X_0)/T.
  const DriftFit fit =
      fit_drift(p, a, uniform_box(1, -10, 10), c, gamma);
  CHECK(fit.used_wls);
  CHECK(fit.alpha_hat[0] ==
        doctest::Approx((p.values[p.values.size() - 1] - p.values[0]) /
                        p.scheme.T)
            .epsilon(1e-9));
}

TEST_CASE("WLS and the numerical optimizer agree to 1e-6") {
  const Path p = ou_path(1000, 0.01, 5);
  const ScaleCandidate& s1 = find_scale("scale1");
  const ScaleFit sf = fit_scale(p, s1.fn, s1.domain);
  const DriftCandidate& d2 = find_drift("drift2");

  const DriftFit wls = fit_drift(p, d2.fn, d2.domain, s1.fn, sf.gamma_hat);
  REQUIRE(wls.used_wls);
  FitOptions numeric;
  numeric.force_numeric_drift = true;
  const DriftFit nm =
      fit_drift(p, d2.fn, d2.domain, s1.fn, sf.gamma_hat, numeric);
  REQUIRE_FALSE(nm.used_wls);
  CHECK((wls.alpha_hat - nm.alpha_hat).norm() <= 1e-6);
}

TEST_CASE("joint contrast reduces to the stepwise pieces") {
  const Path p = ou_path(400, 0.01, 6);
  const ScaleCandidate& s1 = find_scale("scale1");
  Vector gamma(2);
  gamma << -0.2, 0.1;

  // a == 0 reduces the joint contrast to the scale contrast.
  ModelSpec zero_drift{make_linear_drift({[](double) { return 0.0; }}),
                       uniform_box(1, -1, 1), s1.fn, s1.domain, "zd"};
  CHECK(joint_contrast(p, zero_drift, gamma, Vector::Zero(1)) ==
        doctest::Approx(scale_contrast(p, s1.fn, gamma)).epsilon(1e-12));

  // c == 1 reduces it to the drift contrast (gamma irrelevant).
  const DriftCandidate& d1 = find_drift("drift1");
  ModelSpec unit_scale{d1.fn, d1.domain, constant_scale(),
                       uniform_box(1, 0.5, 2), "us"};
  const Vector alpha = Vector::Constant(1, 0.4);
  CHECK(joint_contrast(p, unit_scale, Vector::Ones(1), alpha) ==
        doctest::Approx(
            drift_contrast(p, d1.fn, alpha, constant_scale(), Vector::Ones(1)))
            .epsilon(1e-12));
}

TEST_CASE("joint and stepwise estimates agree at the O(h) level") {
  // The two estimators differ by O_p(h) in finite samples (the drift term
  // perturbs the scale objective at relative order h), so the comparison
  // tolerance is statistical, not the optimizer tolerance.
  const Path p = ou_path(5000, 0.01, 7);
  const ScaleCandidate& s1 = find_scale("scale1");
  const DriftCandidate& d1 = find_drift("drift1");

  const ScaleFit sf = fit_scale(p, s1.fn, s1.domain);
  const DriftFit df = fit_drift(p, d1.fn, d1.domain, s1.fn, sf.gamma_hat);

  ModelSpec model{d1.fn, d1.domain, s1.fn, s1.domain, "s1d1"};
  const ParameterDomain joint_box =
      make_domain((Vector(3) << -10, -10, -10).finished(),
                  (Vector(3) << 10, 10, 10).finished());
  const OptimizeResult joint = maximize_box(
      [&](const Vector& t) {
        try {
          return joint_contrast(p, model, t.head(2), t.tail(1));
        } catch (const DegenerateScaleError&) {
          return -std::numeric_limits<double>::infinity();
        }
      },
      joint_box);

  // gamma: the objectives differ at relative order h. alpha: the two
  // estimates differ through the reweighting by gamma, bounded well below
  // one sampling standard deviation 1/sqrt(T I_alpha) ~ 0.09 at T = 50.
  CHECK((joint.x.head(2) - sf.gamma_hat).norm() <= 0.05);
  CHECK((joint.x.tail(1) - df.alpha_hat).norm() <= 0.18);
}

TEST_CASE("analytic contrast gradients match finite differences") {
  const Path p = ou_path(300, 0.01, 8);
  const ScaleCandidate& s1 = find_scale("scale1");
  const DriftCandidate& d1 = find_drift("drift1");
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.5, 1.5);

  for (int i = 0; i < 20; ++i) {
    Vector gamma(2);
    gamma << u(gen), u(gen);
    const Vector grad = scale_contrast_gradient(p, s1.fn, gamma);
    Vector fd(2);
    for (int k = 0; k < 2; ++k) {
      const double step = 1e-6 * (1.0 + std::abs(gamma[k]));
      Vector gp = gamma, gm = gamma;
      gp[k] += step;
      gm[k] -= step;
      fd[k] = (scale_contrast(p, s1.fn, gp) - scale_contrast(p, s1.fn, gm)) /
              (2 * step);
    }
    CHECK((grad - fd).norm() <= 1e-5 * (1.0 + grad.norm()));

    const Vector gamma_hat = Vector::Zero(2);
    Vector alpha = Vector::Constant(1, 0.5 + 0.3 * u(gen));
    const Vector dgrad =
        drift_contrast_gradient(p, d1.fn, alpha, s1.fn, gamma_hat);
    const double step = 1e-6 * (1.0 + std::abs(alpha[0]));
    Vector ap = alpha, am = alpha;
    ap[0] += step;
    am[0] -= step;
    const double dfd = (drift_contrast(p, d1.fn, ap, s1.fn, gamma_hat) -
                        drift_contrast(p, d1.fn, am, s1.fn, gamma_hat)) /
                       (2 * step);
    CHECK(std::abs(dgrad[0] - dfd) <= 1e-5 * (1.0 + std::abs(dgrad[0])));
  }
}

TEST_CASE("location shift leaves the constant-drift estimate unchanged") {
  // Data with a real trend so the estimate is interior.
  TrueModel m;
  m.drift_fn = [](double) { return 0.8; };
  m.scale_fn = [](double) { return 1.0; };
  m.noise = NoiseSpec::wiener();
  m.x0 = 0.0;
  const Path p = euler_path(m, make_scheme(2000, 0.01), 5, RngStream{55, 9});
  Path shifted = p;
  shifted.values.array() += 4.25;

  const CoefficientFunction c = constant_scale();
  const CoefficientFunction a = constant_drift();
  const ParameterDomain box = uniform_box(1, -10, 10);
  const ScaleFit sc = fit_scale(p, c, uniform_box(1, 0.05, 10));
  const ScaleFit sc2 = fit_scale(shifted, c, uniform_box(1, 0.05, 10));
  const DriftFit f1 = fit_drift(p, a, box, c, sc.gamma_hat);
  const DriftFit f2 = fit_drift(shifted, a, box, c, sc2.gamma_hat);
  CHECK(f1.alpha_hat[0] == doctest::Approx(f2.alpha_hat[0]).epsilon(1e-10));
}

TEST_CASE("degenerate scale raises the dedicated error") {
  const Path p = ou_path(100, 0.01, 10);
  CoefficientFunction vanishing;
  vanishing.evaluate = [](double, const Vector&) { return 0.0; };
  CHECK_THROWS_AS(scale_contrast(p, vanishing, Vector::Ones(1)),
                  DegenerateScaleError);
}
