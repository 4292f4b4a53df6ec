#include "bicens/sieve.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace bicens {

SieveSpec make_sieve_spec(KnotVector knots1, KnotVector knots2) {
  if (knots1.order != knots2.order) {
    throw std::invalid_argument("sieve spec needs equal orders on both axes");
  }
  SieveSpec spec;
  spec.basis1 = BasisFamily{std::move(knots1), BasisKind::I};
  spec.basis2 = BasisFamily{std::move(knots2), BasisKind::I};
  return spec;
}

ThetaVector ThetaVector::zero(int p, int q) {
  ThetaVector theta;
  theta.p = p;
  theta.q = q;
  theta.coeffs = Eigen::VectorXd::Zero(p * q + p + q);
  return theta;
}

ThetaVector ThetaVector::from_flat(int p, int q, Eigen::VectorXd flat) {
  if (flat.size() != p * q + p + q) {
    throw std::invalid_argument("theta length does not match (p, q)");
  }
  ThetaVector theta;
  theta.p = p;
  theta.q = q;
  theta.coeffs = std::move(flat);
  return theta;
}

FeasibilityReport check_feasible_flat(const Eigen::VectorXd& theta,
                                      double tol) {
  FeasibilityReport report;
  for (int i = 0; i < theta.size(); ++i) {
    if (theta[i] < -tol) {
      report.feasible = false;
      report.violated.push_back(i);
    }
  }
  if (theta.sum() > 1.0 + tol) {
    report.feasible = false;
    report.violated.push_back(static_cast<int>(theta.size()));
  }
  return report;
}

FeasibilityReport check_feasible(const ThetaVector& theta, double tol) {
  return check_feasible_flat(theta.coeffs, tol);
}

DesignRow design_row(const SieveSpec& spec, const Observation& obs) {
  if (!spec.domain().contains(obs.c1, obs.c2)) {
    throw std::invalid_argument("observation outside the domain rectangle");
  }
  const int p = spec.p();
  const int q = spec.q();
  const int dim = spec.dim();

  Eigen::VectorXd b1(p), b2(q);
  for (int i = 0; i < p; ++i) b1[i] = spec.basis1.eval(i, obs.c1);
  for (int j = 0; j < q; ++j) b2[j] = spec.basis2.eval(j, obs.c2);

  DesignRow row;
  row.a_joint = Eigen::VectorXd::Zero(dim);
  row.a_marg1 = Eigen::VectorXd::Zero(dim);
  row.a_marg2 = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      row.a_joint[i * q + j] = b1[i] * b2[j];
      row.a_marg1[i * q + j] = b1[i];
      row.a_marg2[i * q + j] = b2[j];
    }
  }
  for (int i = 0; i < p; ++i) row.a_marg1[p * q + i] = b1[i];
  for (int j = 0; j < q; ++j) row.a_marg2[p * q + p + j] = b2[j];
  return row;
}

CdfValue cdf_eval(const SieveSpec& spec, const ThetaVector& theta, double s,
                  double t) {
  if (theta.p != spec.p() || theta.q != spec.q()) {
    throw std::invalid_argument("theta dimensions do not match the spec");
  }
  if (!check_feasible(theta).feasible) {
    throw std::invalid_argument("cdf_eval: infeasible theta");
  }
  if (!spec.domain().contains(s, t)) {
    throw std::invalid_argument("cdf_eval: point outside the domain rectangle");
  }
  const int p = theta.p;
  const int q = theta.q;
  Eigen::VectorXd b1(p), b2(q);
  for (int i = 0; i < p; ++i) b1[i] = spec.basis1.eval(i, s);
  for (int j = 0; j < q; ++j) b2[j] = spec.basis2.eval(j, t);

  CdfValue value;
  for (int i = 0; i < p; ++i) {
    double weighted = 0.0;
    double row_sum = 0.0;
    for (int j = 0; j < q; ++j) {
      weighted += theta.eta(i, j) * b2[j];
      row_sum += theta.eta(i, j);
    }
    value.joint += b1[i] * weighted;
    value.marg1 += (row_sum + theta.omega(i)) * b1[i];
  }
  for (int j = 0; j < q; ++j) {
    double col_sum = 0.0;
    for (int i = 0; i < p; ++i) col_sum += theta.eta(i, j);
    value.marg2 += (col_sum + theta.pi(j)) * b2[j];
  }
  return value;
}

nonfinite_likelihood::nonfinite_likelihood(std::size_t observation,
                                           double probability)
    : std::runtime_error("quadrant probability " + std::to_string(probability) +
                         " at observation " + std::to_string(observation) +
                         " is below the likelihood floor"),
      observation_(observation) {}

AffineLogLikelihood::AffineLogLikelihood(Eigen::MatrixXd coeffs,
                                         Eigen::VectorXd constants,
                                         double prob_floor)
    : coeffs_(std::move(coeffs)),
      constants_(std::move(constants)),
      prob_floor_(prob_floor) {
  if (coeffs_.rows() != constants_.size()) {
    throw std::invalid_argument("coefficient rows and constants disagree");
  }
  if (prob_floor_ <= 0.0) {
    throw std::invalid_argument("probability floor must be positive");
  }
}

bool AffineLogLikelihood::value(const Eigen::VectorXd& theta, double& out,
                                std::size_t* bad_row) const {
  Eigen::VectorXd probs = coeffs_ * theta + constants_;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (!(probs[k] > prob_floor_)) {
      if (bad_row) *bad_row = static_cast<std::size_t>(k);
      return false;
    }
    acc += std::log(probs[k]);
  }
  out = acc;
  return true;
}

double AffineLogLikelihood::value_or_throw(const Eigen::VectorXd& theta) const {
  double out = 0.0;
  std::size_t bad = 0;
  if (!value(theta, out, &bad)) {
    double prob = coeffs_.row(static_cast<Eigen::Index>(bad)).dot(theta) +
                  constants_[static_cast<Eigen::Index>(bad)];
    throw nonfinite_likelihood(bad, prob);
  }
  return out;
}

Eigen::VectorXd AffineLogLikelihood::gradient(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd probs = coeffs_ * theta + constants_;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (!(probs[k] > prob_floor_)) {
      throw nonfinite_likelihood(static_cast<std::size_t>(k), probs[k]);
    }
  }
  return coeffs_.transpose() * probs.cwiseInverse();
}

Eigen::MatrixXd AffineLogLikelihood::hessian(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd probs = coeffs_ * theta + constants_;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (!(probs[k] > prob_floor_)) {
      throw nonfinite_likelihood(static_cast<std::size_t>(k), probs[k]);
    }
  }
  Eigen::MatrixXd scaled = probs.cwiseInverse().asDiagonal() * coeffs_;
  return -(scaled.transpose() * scaled);
}

AffineLogLikelihood make_sieve_likelihood(const SieveSpec& spec,
                                          const Dataset& data,
                                          double prob_floor) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  const int dim = spec.dim();
  Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(data.size()), dim);
  Eigen::VectorXd constants(static_cast<Eigen::Index>(data.size()));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const Observation& obs = data[k];
    DesignRow row = design_row(spec, obs);
    Eigen::Index r = static_cast<Eigen::Index>(k);
    if (obs.d1 && obs.d2) {
      coeffs.row(r) = row.a_joint;
      constants[r] = 0.0;
    } else if (obs.d1 && !obs.d2) {
      coeffs.row(r) = row.a_marg1 - row.a_joint;
      constants[r] = 0.0;
    } else if (!obs.d1 && obs.d2) {
      coeffs.row(r) = row.a_marg2 - row.a_joint;
      constants[r] = 0.0;
    } else {
      coeffs.row(r) = row.a_joint - row.a_marg1 - row.a_marg2;
      constants[r] = 1.0;
    }
  }
  return AffineLogLikelihood(std::move(coeffs), std::move(constants), prob_floor);
}

double loglik(const SieveSpec& spec, const ThetaVector& theta,
              const Dataset& data) {
  return make_sieve_likelihood(spec, data).value_or_throw(theta.coeffs);
}

Eigen::VectorXd loglik_grad(const SieveSpec& spec, const ThetaVector& theta,
                            const Dataset& data) {
  return make_sieve_likelihood(spec, data).gradient(theta.coeffs);
}

Eigen::MatrixXd loglik_hess(const SieveSpec& spec, const ThetaVector& theta,
                            const Dataset& data) {
  return make_sieve_likelihood(spec, data).hessian(theta.coeffs);
}

}  // namespace bicens
