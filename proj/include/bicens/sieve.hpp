#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "bicens/data.hpp"
#include "bicens/spline.hpp"

namespace bicens {

// Tensor sieve over two CDF-like (I-spline) basis families.
struct SieveSpec {
  BasisFamily basis1;
  BasisFamily basis2;

  int p() const { return basis1.size(); }
  int q() const { return basis2.size(); }
  int dim() const { return p() * q() + p() + q(); }
  DomainRect domain() const {
    return {basis1.knots.lower, basis1.knots.upper, basis2.knots.lower,
            basis2.knots.upper};
  }
};

SieveSpec make_sieve_spec(KnotVector knots1, KnotVector knots2);

// Coefficient vector for the sieve surface: the p x q tensor block eta
// (row-major), then omega (p), then pi (q). Feasible points have every
// coordinate >= 0 and a total sum <= 1.
struct ThetaVector {
  int p = 0;
  int q = 0;
  Eigen::VectorXd coeffs;

  static ThetaVector zero(int p, int q);
  static ThetaVector from_flat(int p, int q, Eigen::VectorXd flat);

  int dim() const { return p * q + p + q; }
  double eta(int i, int j) const { return coeffs[i * q + j]; }
  double& eta(int i, int j) { return coeffs[i * q + j]; }
  double omega(int i) const { return coeffs[p * q + i]; }
  double& omega(int i) { return coeffs[p * q + i]; }
  double pi(int j) const { return coeffs[p * q + p + j]; }
  double& pi(int j) { return coeffs[p * q + p + j]; }
  double sum() const { return coeffs.sum(); }
};

struct FeasibilityReport {
  bool feasible = true;
  // Violated constraint indices: 0..dim-1 for coordinate nonnegativity,
  // dim for the sum-at-most-one constraint.
  std::vector<int> violated;
};

FeasibilityReport check_feasible(const ThetaVector& theta, double tol = 1e-12);
FeasibilityReport check_feasible_flat(const Eigen::VectorXd& theta,
                                      double tol = 1e-12);

// Per-observation basis products: F, F1 and F2 are affine in theta with
// these coefficient vectors (zero constant term for all three).
struct DesignRow {
  Eigen::VectorXd a_joint;  // F(c1, c2)
  Eigen::VectorXd a_marg1;  // F1(c1)
  Eigen::VectorXd a_marg2;  // F2(c2)
};

DesignRow design_row(const SieveSpec& spec, const Observation& obs);

struct CdfValue {
  double joint = 0.0;
  double marg1 = 0.0;
  double marg2 = 0.0;
};

// Evaluates (F, F1, F2) at (s, t). Throws std::invalid_argument for an
// infeasible theta or a point outside the domain rectangle.
CdfValue cdf_eval(const SieveSpec& spec, const ThetaVector& theta, double s,
                  double t);

class nonfinite_likelihood : public std::runtime_error {
 public:
  nonfinite_likelihood(std::size_t observation, double probability);
  std::size_t observation() const { return observation_; }

 private:
  std::size_t observation_;
};

// Log-likelihood of the form sum_k log(G.row(k) . theta + c[k]). Rows whose
// probability falls at or below the floor make the value undefined.
class AffineLogLikelihood {
 public:
  AffineLogLikelihood(Eigen::MatrixXd coeffs, Eigen::VectorXd constants,
                      double prob_floor = 1e-12);

  int dim() const { return static_cast<int>(coeffs_.cols()); }
  int terms() const { return static_cast<int>(coeffs_.rows()); }
  double prob_floor() const { return prob_floor_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  const Eigen::VectorXd& constants() const { return constants_; }

  // False when some term probability is at or below the floor; the
  // offending row index is reported through bad_row when given.
  bool value(const Eigen::VectorXd& theta, double& out,
             std::size_t* bad_row = nullptr) const;
  double value_or_throw(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& theta) const;

 private:
  Eigen::MatrixXd coeffs_;
  Eigen::VectorXd constants_;
  double prob_floor_;
};

// Builds the likelihood of the observed quadrants: each observation
// contributes log of the probability selected by its (d1, d2) pattern.
AffineLogLikelihood make_sieve_likelihood(const SieveSpec& spec,
                                          const Dataset& data,
                                          double prob_floor = 1e-12);

double loglik(const SieveSpec& spec, const ThetaVector& theta,
              const Dataset& data);
Eigen::VectorXd loglik_grad(const SieveSpec& spec, const ThetaVector& theta,
                            const Dataset& data);
Eigen::MatrixXd loglik_hess(const SieveSpec& spec, const ThetaVector& theta,
                            const Dataset& data);

}  // namespace bicens
