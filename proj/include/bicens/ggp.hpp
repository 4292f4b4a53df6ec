#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "bicens/sieve.hpp"

namespace bicens {

// Active constraints of the polytope {theta >= 0, sum(theta) <= 1}.
// Indices 0..dim-1 are coordinate bounds, index dim is the sum bound. The
// order of `indices` is the order of the constraint rows and of the
// multipliers.
struct ActiveSet {
  int dim = 0;
  std::vector<int> indices;

  explicit ActiveSet(int dim_ = 0) : dim(dim_) {}
  int size() const { return static_cast<int>(indices.size()); }
  int sum_index() const { return dim; }
  bool contains(int idx) const;
  void add(int idx);
  void remove_position(int pos);
  // Constraint rows: -e_i for a coordinate bound, all-ones for the sum.
  Eigen::MatrixXd rows() const;
};

struct FitOptions {
  double epsilon = 1e-6;      // stop tolerance on ||d||
  double delta_rel = 1e-3;    // ridge: delta_rel * mean(diag(-H))
  double delta_floor = 1e-10; // absolute ridge floor
  int max_iter = 500;
  double active_tol = 1e-10;  // bound-contact detection
  int max_halvings = 60;
};

struct IterationStats {
  double loglik = 0.0;
  double dir_norm = 0.0;
  int active_count = 0;
  double active_residual = 0.0;  // max |X̄ d| for the step taken
};

struct FitResult {
  Eigen::VectorXd theta;
  double loglik = 0.0;
  ActiveSet active;
  Eigen::VectorXd multipliers;  // aligned with active.indices at convergence
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
  std::vector<IterationStats> trace;
};

struct ProjectionStep {
  Eigen::VectorXd direction;
  Eigen::VectorXd multipliers;
};

// d = {I - W^-1 X̄ᵀ (X̄ W^-1 X̄ᵀ)^-1 X̄} W^-1 grad and the matching
// multipliers lambda = (X̄ W^-1 X̄ᵀ)^-1 X̄ W^-1 grad, with W = -hess + delta I.
// Solved by SPD factorizations; throws std::runtime_error if the reduced
// system is singular.
ProjectionStep project_gradient(const Eigen::VectorXd& grad,
                                const Eigen::MatrixXd& hess, double delta,
                                const ActiveSet& active);

Eigen::VectorXd search_direction(const Eigen::VectorXd& grad,
                                 const Eigen::MatrixXd& hess, double delta,
                                 const ActiveSet& active);
Eigen::VectorXd kkt_multipliers(const Eigen::VectorXd& grad,
                                const Eigen::MatrixXd& hess, double delta,
                                const ActiveSet& active);

// Largest step gamma with theta + gamma d feasible:
// min over d_i < 0 of -theta_i / d_i, and (1 - sum theta) / sum d when
// sum d > 0. When `active` is given, its constraints are treated as exact
// equalities and skipped (they are preserved by construction). Returns
// +infinity when nothing limits the step.
double max_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& d,
                const ActiveSet* active = nullptr);

using LoglikEvaluator =
    std::function<bool(const Eigen::VectorXd& theta, double& value)>;

struct LineSearchResult {
  Eigen::VectorXd theta;
  double loglik = 0.0;
  double step = 0.0;  // accepted multiple of d
  int halvings = 0;
  bool stalled = false;
};

// Step-halving search: smallest k >= 0 with f(theta + (1/2)^k gamma d) no
// worse than f(theta); the accepted update is min{(1/2)^k gamma, 0.5} d and
// must itself not decrease f. Evaluation failures count as decreases.
LineSearchResult line_search(const Eigen::VectorXd& theta, double current,
                             const Eigen::VectorXd& d, double gamma,
                             const LoglikEvaluator& f, int max_halvings = 60);

// Adds coordinate bounds that reached zero (theta_i <= tol) and the sum
// bound when sum(theta) >= 1 - tol. Drops the sum row if every coordinate
// bound is active at the same time, keeping the rows full rank.
void update_active(const Eigen::VectorXd& theta, ActiveSet& active,
                   double active_tol);

// Maximizes the concave log-likelihood over {theta >= 0, sum <= 1}. The
// default start is the strictly interior point with all coordinates equal
// to 0.9 / dim.
FitResult maximize(const AffineLogLikelihood& objective, const FitOptions& opts,
                   const std::optional<Eigen::VectorXd>& theta0 = std::nullopt);

// Sieve front end: builds the likelihood from (spec, data) and runs the
// solver; the result theta is ordered as ThetaVector's flat layout.
struct SieveFitResult {
  ThetaVector theta_hat;
  double loglik = 0.0;
  ActiveSet active;
  Eigen::VectorXd multipliers;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
  std::vector<IterationStats> trace;
};

SieveFitResult fit(const SieveSpec& spec, const Dataset& data,
                   const FitOptions& opts = FitOptions{},
                   const std::optional<ThetaVector>& theta0 = std::nullopt);

}  // namespace bicens
