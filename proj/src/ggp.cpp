#include "bicens/ggp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bicens {

bool ActiveSet::contains(int idx) const {
  return std::find(indices.begin(), indices.end(), idx) != indices.end();
}

void ActiveSet::add(int idx) {
  if (idx < 0 || idx > dim) throw std::invalid_argument("active index out of range");
  if (!contains(idx)) indices.push_back(idx);
}

void ActiveSet::remove_position(int pos) {
  if (pos < 0 || pos >= size()) throw std::invalid_argument("bad active position");
  indices.erase(indices.begin() + pos);
}

Eigen::MatrixXd ActiveSet::rows() const {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(size(), dim);
  for (int r = 0; r < size(); ++r) {
    if (indices[r] == dim) {
      rows.row(r).setOnes();
    } else {
      rows(r, indices[r]) = -1.0;
    }
  }
  return rows;
}

ProjectionStep project_gradient(const Eigen::VectorXd& grad,
                                const Eigen::MatrixXd& hess, double delta,
                                const ActiveSet& active) {
  const Eigen::Index dim = grad.size();
  Eigen::MatrixXd w = -hess;
  w.diagonal().array() += delta;

  Eigen::LLT<Eigen::MatrixXd> w_llt(w);
  if (w_llt.info() != Eigen::Success) {
    throw std::runtime_error("ggp: W = -H + delta*I is not positive definite");
  }

  ProjectionStep step;
  Eigen::VectorXd unconstrained = w_llt.solve(grad);
  if (active.size() == 0) {
    step.direction = std::move(unconstrained);
    step.multipliers = Eigen::VectorXd(0);
    return step;
  }

  Eigen::MatrixXd xbar = active.rows();
  Eigen::MatrixXd winv_xt = w_llt.solve(xbar.transpose());  // dim x |Λ|
  Eigen::MatrixXd reduced = xbar * winv_xt;                 // |Λ| x |Λ|
  Eigen::LLT<Eigen::MatrixXd> s_llt(reduced);
  if (s_llt.info() != Eigen::Success) {
    std::string which;
    for (int idx : active.indices) which += " " + std::to_string(idx);
    throw std::runtime_error("ggp: singular reduced system for active set{" +
                             which + " }");
  }
  step.multipliers = s_llt.solve(xbar * unconstrained);
  step.direction = unconstrained - winv_xt * step.multipliers;
  (void)dim;
  return step;
}

Eigen::VectorXd search_direction(const Eigen::VectorXd& grad,
                                 const Eigen::MatrixXd& hess, double delta,
                                 const ActiveSet& active) {
  return project_gradient(grad, hess, delta, active).direction;
}

Eigen::VectorXd kkt_multipliers(const Eigen::VectorXd& grad,
                                const Eigen::MatrixXd& hess, double delta,
                                const ActiveSet& active) {
  return project_gradient(grad, hess, delta, active).multipliers;
}

double max_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& d,
                const ActiveSet* active) {
  double gamma = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (active && active->contains(static_cast<int>(i))) continue;
    if (d[i] < 0.0 && theta[i] > 0.0) {
      gamma = std::min(gamma, -theta[i] / d[i]);
    }
  }
  bool sum_active = active && active->contains(active->sum_index());
  double sum_d = d.sum();
  if (!sum_active && sum_d > 0.0) {
    double slack = 1.0 - theta.sum();
    if (slack < 0.0) slack = 0.0;
    gamma = std::min(gamma, slack / sum_d);
  }
  return gamma;
}

LineSearchResult line_search(const Eigen::VectorXd& theta, double current,
                             const Eigen::VectorXd& d, double gamma,
                             const LoglikEvaluator& f, int max_halvings) {
  // An unbounded ray only ever steps 0.5*d; any finite stand-in >= 0.5 gives
  // the same accepted points.
  if (!std::isfinite(gamma)) gamma = 1.0;

  LineSearchResult result;
  for (int k = 0; k <= max_halvings; ++k) {
    double trial = std::ldexp(gamma, -k);  // (1/2)^k gamma
    double trial_value = 0.0;
    if (!f(theta + trial * d, trial_value) || !(trial_value >= current)) {
      continue;
    }
    double accepted = std::min(trial, 0.5);
    if (accepted == trial) {
      result.theta = theta + trial * d;
      result.loglik = trial_value;
      result.step = trial;
      result.halvings = k;
      return result;
    }
    double capped_value = 0.0;
    if (f(theta + accepted * d, capped_value) && capped_value >= current) {
      result.theta = theta + accepted * d;
      result.loglik = capped_value;
      result.step = accepted;
      result.halvings = k;
      return result;
    }
  }
  result.theta = theta;
  result.loglik = current;
  result.step = 0.0;
  result.halvings = max_halvings;
  result.stalled = true;
  return result;
}

void update_active(const Eigen::VectorXd& theta, ActiveSet& active,
                   double active_tol) {
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (theta[i] <= active_tol) active.add(static_cast<int>(i));
  }
  if (theta.sum() >= 1.0 - active_tol) active.add(active.sum_index());

  int coord_count = 0;
  for (int idx : active.indices) {
    if (idx != active.sum_index()) ++coord_count;
  }
  if (coord_count == active.dim && active.contains(active.sum_index())) {
    for (int pos = 0; pos < active.size(); ++pos) {
      if (active.indices[pos] == active.sum_index()) {
        active.remove_position(pos);
        break;
      }
    }
  }
}

namespace {

double ridge_for(const Eigen::MatrixXd& hess, const FitOptions& opts) {
  double mean_diag = -hess.diagonal().mean();
  if (!(mean_diag > 0.0)) mean_diag = 0.0;
  return std::max(opts.delta_rel * mean_diag, opts.delta_floor);
}

}  // namespace

FitResult maximize(const AffineLogLikelihood& objective, const FitOptions& opts,
                   const std::optional<Eigen::VectorXd>& theta0) {
  const int dim = objective.dim();
  Eigen::VectorXd theta =
      theta0 ? *theta0
             : Eigen::VectorXd::Constant(dim, 0.9 / static_cast<double>(dim));
  if (theta.size() != dim) {
    throw std::invalid_argument("theta0 has the wrong dimension");
  }
  if (!check_feasible_flat(theta).feasible) {
    throw std::invalid_argument("theta0 is infeasible");
  }

  FitResult result;
  result.active = ActiveSet(dim);
  update_active(theta, result.active, opts.active_tol);

  double current = objective.value_or_throw(theta);
  LoglikEvaluator evaluate = [&objective](const Eigen::VectorXd& point,
                                          double& value) {
    if (!check_feasible_flat(point).feasible) return false;
    return objective.value(point, value);
  };

  while (result.iterations < opts.max_iter) {
    ++result.iterations;
    Eigen::VectorXd grad = objective.gradient(theta);
    Eigen::MatrixXd hess = objective.hessian(theta);
    double delta = ridge_for(hess, opts);
    ProjectionStep step = project_gradient(grad, hess, delta, result.active);
    double dir_norm = step.direction.norm();

    IterationStats stats;
    stats.loglik = current;
    stats.dir_norm = dir_norm;
    stats.active_count = result.active.size();
    if (result.active.size() > 0) {
      stats.active_residual =
          (result.active.rows() * step.direction).cwiseAbs().maxCoeff();
    }
    result.trace.push_back(stats);

    if (dir_norm < opts.epsilon) {
      if (step.multipliers.size() == 0 || step.multipliers.minCoeff() >= 0.0) {
        result.multipliers = step.multipliers;
        result.converged = true;
        break;
      }
      int worst = 0;
      for (int r = 1; r < step.multipliers.size(); ++r) {
        if (step.multipliers[r] < step.multipliers[worst]) worst = r;
      }
      result.active.remove_position(worst);
      continue;
    }

    double gamma = max_step(theta, step.direction, &result.active);
    LineSearchResult moved = line_search(theta, current, step.direction, gamma,
                                         evaluate, opts.max_halvings);
    if (moved.stalled) {
      result.stalled = true;
      break;
    }
    theta = std::move(moved.theta);
    current = moved.loglik;
    update_active(theta, result.active, opts.active_tol);

    FeasibilityReport feasible = check_feasible_flat(theta);
    if (!feasible.feasible) {
      throw std::runtime_error("ggp: iterate left the feasible region");
    }
  }

  result.theta = std::move(theta);
  result.loglik = current;
  return result;
}

SieveFitResult fit(const SieveSpec& spec, const Dataset& data,
                   const FitOptions& opts,
                   const std::optional<ThetaVector>& theta0) {
  AffineLogLikelihood objective = make_sieve_likelihood(spec, data);
  std::optional<Eigen::VectorXd> start;
  if (theta0) {
    if (theta0->p != spec.p() || theta0->q != spec.q()) {
      throw std::invalid_argument("theta0 does not match the spec dimensions");
    }
    start = theta0->coeffs;
  }
  FitResult inner = maximize(objective, opts, start);

  SieveFitResult result;
  result.theta_hat =
      ThetaVector::from_flat(spec.p(), spec.q(), std::move(inner.theta));
  result.loglik = inner.loglik;
  result.active = std::move(inner.active);
  result.multipliers = std::move(inner.multipliers);
  result.iterations = inner.iterations;
  result.converged = inner.converged;
  result.stalled = inner.stalled;
  result.trace = std::move(inner.trace);
  return result;
}

}  // namespace bicens
