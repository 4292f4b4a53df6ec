#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "bicens/ggp.hpp"
#include "bicens/simulation.hpp"
#include "bicens/sieve.hpp"
#include "support/helpers.hpp"

using namespace bicens;

namespace {

SieveSpec toy_spec() {  // p = q = 1, order 1: constant basis only
  return make_sieve_spec(make_knots({}, 1, 0.0, 5.0),
                         make_knots({}, 1, 0.0, 5.0));
}

SieveSpec small_spec() {  // p = q = 2
  return make_sieve_spec(make_knots({}, 2, 0.0, 5.0),
                         make_knots({}, 2, 0.0, 5.0));
}

SieveSpec cubic_spec() {  // p = q = 5
  return make_sieve_spec(make_knots({2.5}, 4, 0.0, 5.0),
                         make_knots({1.8}, 4, 0.0, 5.0));
}

Dataset mixed_dataset(int n, Rng& rng) {
  Dataset data;
  for (int k = 0; k < n; ++k) {
    Observation obs;
    obs.c1 = rng.uniform(0.3, 4.7);
    obs.c2 = rng.uniform(0.3, 4.7);
    obs.d1 = rng.uniform() < 0.5;
    obs.d2 = rng.uniform() < 0.5;
    data.push_back(obs);
  }
  return data;
}

ThetaVector random_theta(const SieveSpec& spec, double total, Rng& rng) {
  return ThetaVector::from_flat(
      spec.p(), spec.q(),
      testsupport::random_interior_theta(spec.dim(), total, rng));
}

// Straight-line reimplementation of the four-quadrant log-likelihood from
// basis sums, independent of DesignRow and AffineLogLikelihood.
double direct_loglik(const SieveSpec& spec, const ThetaVector& theta,
                     const Dataset& data) {
  double total = 0.0;
  for (const Observation& obs : data) {
    double f = 0.0, f1 = 0.0, f2 = 0.0;
    for (int i = 0; i < spec.p(); ++i) {
      double bi = ispline_eval(spec.basis1.knots, spec.basis1.knots.order, i,
                               obs.c1);
      double row = 0.0;
      for (int j = 0; j < spec.q(); ++j) {
        double bj = ispline_eval(spec.basis2.knots, spec.basis2.knots.order, j,
                                 obs.c2);
        f += theta.eta(i, j) * bi * bj;
        row += theta.eta(i, j);
      }
      f1 += (row + theta.omega(i)) * bi;
    }
    for (int j = 0; j < spec.q(); ++j) {
      double bj = ispline_eval(spec.basis2.knots, spec.basis2.knots.order, j,
                               obs.c2);
      double col = 0.0;
      for (int i = 0; i < spec.p(); ++i) col += theta.eta(i, j);
      f2 += (col + theta.pi(j)) * bj;
    }
    if (obs.d1 && obs.d2) total += std::log(f);
    if (obs.d1 && !obs.d2) total += std::log(f1 - f);
    if (!obs.d1 && obs.d2) total += std::log(f2 - f);
    if (!obs.d1 && !obs.d2) total += std::log(1.0 - f1 - f2 + f);
  }
  return total;
}

}  // namespace

TEST_SUITE("sieve") {

TEST_CASE("design row at the lower corner keeps only the constant basis") {
  SieveSpec spec = cubic_spec();
  DesignRow row = design_row(spec, {0.0, 0.0, true, true});
  const int p = spec.p(), q = spec.q();
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      double expected = (i == 0 && j == 0) ? 1.0 : 0.0;
      CHECK(row.a_joint[i * q + j] == expected);
      CHECK(row.a_marg1[i * q + j] == (i == 0 ? 1.0 : 0.0));
      CHECK(row.a_marg2[i * q + j] == (j == 0 ? 1.0 : 0.0));
    }
  }
  for (int i = 0; i < p; ++i) CHECK(row.a_marg1[p * q + i] == (i == 0 ? 1.0 : 0.0));
  for (int j = 0; j < q; ++j) CHECK(row.a_marg2[p * q + p + j] == (j == 0 ? 1.0 : 0.0));
}

TEST_CASE("design row at the upper corner is all ones where it matters") {
  SieveSpec spec = cubic_spec();
  DesignRow row = design_row(spec, {5.0, 5.0, false, false});
  const int p = spec.p(), q = spec.q();
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) CHECK(row.a_joint[i * q + j] == 1.0);
    CHECK(row.a_marg1[p * q + i] == 1.0);
  }
  // Zeros on the omega and pi blocks of the joint row.
  for (int k = p * q; k < spec.dim(); ++k) CHECK(row.a_joint[k] == 0.0);
}

TEST_CASE("design row entries are basis products (spline oracle)") {
  SieveSpec spec = small_spec();
  Observation obs{1.3, 3.6, true, false};
  DesignRow row = design_row(spec, obs);
  for (int i = 0; i < 2; ++i) {
    double bi = ispline_eval(spec.basis1.knots, 2, i, obs.c1);
    for (int j = 0; j < 2; ++j) {
      double bj = ispline_eval(spec.basis2.knots, 2, j, obs.c2);
      CHECK(row.a_joint[i * 2 + j] == doctest::Approx(bi * bj).epsilon(1e-15));
      CHECK(row.a_marg1[i * 2 + j] == doctest::Approx(bi).epsilon(1e-15));
      CHECK(row.a_marg2[i * 2 + j] == doctest::Approx(bj).epsilon(1e-15));
    }
  }
  for (Eigen::Index k = 0; k < row.a_joint.size(); ++k) {
    CHECK(row.a_joint[k] >= 0.0);
    CHECK(row.a_joint[k] <= 1.0);
    CHECK(row.a_marg1[k] >= 0.0);
    CHECK(row.a_marg1[k] <= 1.0);
  }
  CHECK_THROWS_AS(design_row(spec, {9.0, 1.0, true, true}),
                  std::invalid_argument);
}

TEST_CASE("cdf_eval basics") {
  SieveSpec spec = cubic_spec();
  ThetaVector zero = ThetaVector::zero(spec.p(), spec.q());
  CdfValue at_zero = cdf_eval(spec, zero, 2.0, 2.0);
  CHECK(at_zero.joint == 0.0);
  CHECK(at_zero.marg1 == 0.0);
  CHECK(at_zero.marg2 == 0.0);

  Rng rng(7);
  ThetaVector theta = random_theta(spec, 0.8, rng);
  CdfValue corner = cdf_eval(spec, theta, 5.0, 5.0);
  double eta_sum = 0.0, omega_sum = 0.0, pi_sum = 0.0;
  for (int i = 0; i < spec.p(); ++i) {
    omega_sum += theta.omega(i);
    for (int j = 0; j < spec.q(); ++j) eta_sum += theta.eta(i, j);
  }
  for (int j = 0; j < spec.q(); ++j) pi_sum += theta.pi(j);
  CHECK(corner.joint == doctest::Approx(eta_sum).epsilon(1e-12));
  CHECK(corner.marg1 == doctest::Approx(eta_sum + omega_sum).epsilon(1e-12));
  CHECK(corner.marg2 == doctest::Approx(eta_sum + pi_sum).epsilon(1e-12));

  ThetaVector single = ThetaVector::zero(spec.p(), spec.q());
  single.eta(0, 0) = 0.5;
  CdfValue mid = cdf_eval(spec, single, 1.9, 2.4);
  double expected = 0.5 * ispline_eval(spec.basis1.knots, 4, 0, 1.9) *
                    ispline_eval(spec.basis2.knots, 4, 0, 2.4);
  CHECK(mid.joint == doctest::Approx(expected).epsilon(1e-14));

  ThetaVector bad = ThetaVector::zero(spec.p(), spec.q());
  bad.coeffs[0] = -1e-6;
  CHECK_THROWS_AS(cdf_eval(spec, bad, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("cdf_eval keeps the CDF ordering constraints") {
  SieveSpec spec = cubic_spec();
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    ThetaVector theta = random_theta(spec, 0.99, rng);
    double s = rng.uniform(0.0, 5.0);
    double t = rng.uniform(0.0, 5.0);
    CdfValue v = cdf_eval(spec, theta, s, t);
    CHECK(v.joint >= -1e-12);
    CHECK(v.joint <= 1.0 + 1e-12);
    CHECK(v.marg1 >= v.joint - 1e-12);
    CHECK(v.marg2 >= v.joint - 1e-12);
    CHECK(v.marg1 + v.marg2 - v.joint <= 1.0 + 1e-12);
  }
}

TEST_CASE("loglik single-observation and additivity cases") {
  SieveSpec spec = toy_spec();
  ThetaVector theta = ThetaVector::zero(1, 1);
  theta.eta(0, 0) = 0.5;
  theta.omega(0) = 0.2;
  theta.pi(0) = 0.2;
  Dataset one = {{1.0, 1.0, true, true}};
  CHECK(loglik(spec, theta, one) == doctest::Approx(std::log(0.5)).epsilon(1e-14));

  Dataset two = {one[0], one[0]};
  CHECK(loglik(spec, theta, two) ==
        doctest::Approx(2.0 * loglik(spec, theta, one)).epsilon(1e-14));
}

TEST_CASE("loglik matches a straight-line reimplementation") {
  SieveSpec spec = small_spec();
  Rng rng(99);
  Dataset data = mixed_dataset(5, rng);
  for (int trial = 0; trial < 10; ++trial) {
    ThetaVector theta = random_theta(spec, 0.85, rng);
    CHECK(loglik(spec, theta, data) ==
          doctest::Approx(direct_loglik(spec, theta, data)).epsilon(1e-12));
  }
}

TEST_CASE("loglik error carries the offending observation") {
  SieveSpec spec = toy_spec();
  ThetaVector theta = ThetaVector::zero(1, 1);  // F identically zero
  Dataset data = {{1.0, 1.0, false, false}, {2.0, 2.0, true, true}};
  try {
    loglik(spec, theta, data);
    FAIL("expected nonfinite_likelihood");
  } catch (const nonfinite_likelihood& err) {
    CHECK(err.observation() == 1);
  }
}

TEST_CASE("gradient of a single joint observation is a_F / F") {
  SieveSpec spec = small_spec();
  Rng rng(4);
  ThetaVector theta = random_theta(spec, 0.8, rng);
  Observation obs{2.2, 3.1, true, true};
  DesignRow row = design_row(spec, obs);
  double f = row.a_joint.dot(theta.coeffs);
  Eigen::VectorXd grad = loglik_grad(spec, theta, {obs});
  Eigen::VectorXd expected = row.a_joint / f;
  CHECK((grad - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("constant-probability rows contribute a zero gradient") {
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(3, 4);
  Eigen::VectorXd constants = Eigen::VectorXd::Constant(3, 0.7);
  AffineLogLikelihood objective(coeffs, constants);
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(4, 0.1);
  CHECK(objective.gradient(theta).norm() == 0.0);
}

TEST_CASE("analytic gradient matches central differences") {
  SieveSpec spec = cubic_spec();
  Rng rng(123);
  Dataset data = mixed_dataset(20, rng);
  AffineLogLikelihood objective = make_sieve_likelihood(spec, data);
  auto value = [&](const Eigen::VectorXd& point) {
    return objective.value_or_throw(point);
  };
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd theta =
        testsupport::random_interior_theta(spec.dim(), 0.7, rng);
    Eigen::VectorXd analytic = objective.gradient(theta);
    Eigen::VectorXd numeric = testsupport::central_diff(value, theta, 1e-6);
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      double scale = std::max(1.0, std::abs(analytic[i]));
      CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-5);
    }
  }
}

TEST_CASE("hessian is symmetric, rank-one for one term, and NSD") {
  SieveSpec spec = small_spec();
  Rng rng(5);
  ThetaVector theta = random_theta(spec, 0.8, rng);
  Observation obs{1.4, 2.9, false, true};
  DesignRow row = design_row(spec, obs);
  Eigen::VectorXd g = row.a_marg2 - row.a_joint;
  double prob = g.dot(theta.coeffs);
  Eigen::MatrixXd hess = loglik_hess(spec, theta, {obs});
  Eigen::MatrixXd expected = -(g * g.transpose()) / (prob * prob);
  CHECK((hess - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((hess - hess.transpose()).cwiseAbs().maxCoeff() == 0.0);

  Dataset data = mixed_dataset(20, rng);
  AffineLogLikelihood objective = make_sieve_likelihood(cubic_spec(), data);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd point =
        testsupport::random_interior_theta(objective.dim(), 0.75, rng);
    Eigen::MatrixXd h = objective.hessian(point);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(h);
    double scale = h.cwiseAbs().maxCoeff();
    CHECK(eigs.eigenvalues().maxCoeff() <= 1e-8 * std::max(1.0, scale));
  }
}

TEST_CASE("check_feasible reports violations") {
  ThetaVector zero = ThetaVector::zero(2, 2);
  CHECK(check_feasible(zero).feasible);

  ThetaVector boundary = ThetaVector::zero(2, 2);
  boundary.coeffs.setConstant(1.0 / boundary.dim());
  CHECK(check_feasible(boundary).feasible);

  ThetaVector negative = ThetaVector::zero(2, 2);
  negative.coeffs[3] = -1e-6;
  FeasibilityReport report = check_feasible(negative);
  CHECK(!report.feasible);
  REQUIRE(report.violated.size() == 1);
  CHECK(report.violated[0] == 3);

  ThetaVector heavy = ThetaVector::zero(2, 2);
  heavy.coeffs.setConstant(0.2);  // sum = 1.6
  report = check_feasible(heavy);
  CHECK(!report.feasible);
  REQUIRE(report.violated.size() == 1);
  CHECK(report.violated[0] == heavy.dim());
}

TEST_CASE("affine consistency between cdf_eval and design rows") {
  SieveSpec spec = cubic_spec();
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    ThetaVector theta = random_theta(spec, 0.9, rng);
    double s = rng.uniform(0.0, 5.0);
    double t = rng.uniform(0.0, 5.0);
    CdfValue v = cdf_eval(spec, theta, s, t);
    DesignRow row = design_row(spec, {s, t, true, true});
    double f = row.a_joint.dot(theta.coeffs);
    double f1 = row.a_marg1.dot(theta.coeffs);
    double f2 = row.a_marg2.dot(theta.coeffs);
    CHECK(std::abs(v.joint - f) < 1e-13);
    CHECK(std::abs(v.marg1 - f1) < 1e-13);
    CHECK(std::abs(v.marg2 - f2) < 1e-13);
    CHECK(std::abs((v.marg1 - v.joint) - (f1 - f)) < 1e-13);
    CHECK(std::abs((1.0 - v.marg1 - v.marg2 + v.joint) -
                   (1.0 - f1 - f2 + f)) < 1e-13);
  }
}

TEST_CASE("feasible theta implies the CDF shape constraints on a grid") {
  SieveSpec spec = cubic_spec();
  Rng rng(57);
  std::vector<double> axis;
  for (int i = 0; i <= 24; ++i) axis.push_back(5.0 * i / 24.0);
  for (int trial = 0; trial < 10; ++trial) {
    ThetaVector theta = random_theta(spec, 1.0, rng);
    GridEval eval = evaluate_on_grid(spec, theta, axis, axis);
    CHECK(count_shape_violations(eval, 1e-10) == 0);
  }
}

TEST_CASE("loglik is concave along segments") {
  SieveSpec spec = small_spec();
  Rng rng(73);
  Dataset data = mixed_dataset(12, rng);
  for (int trial = 0; trial < 20; ++trial) {
    ThetaVector a = random_theta(spec, 0.7, rng);
    ThetaVector b = random_theta(spec, 0.8, rng);
    double lambda = rng.uniform();
    ThetaVector mix = ThetaVector::from_flat(
        spec.p(), spec.q(),
        lambda * a.coeffs + (1.0 - lambda) * b.coeffs);
    double lhs = loglik(spec, mix, data);
    double rhs =
        lambda * loglik(spec, a, data) + (1.0 - lambda) * loglik(spec, b, data);
    CHECK(lhs >= rhs - 1e-9);
  }
}

}  // TEST_SUITE
