#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bicens/clayton.hpp"
#include "bicens/data.hpp"
#include "bicens/ggp.hpp"
#include "bicens/rng.hpp"

namespace bicens {

// Clayton-copula benchmark scenario: exponential event-time marginals,
// uniform monitoring times on [censor_lo, censor_hi] inside the domain.
struct SimConfig {
  int n = 100;
  double tau = 0.25;
  double marginal_rate = 0.5;
  double censor_lo = 0.0201;
  double censor_hi = 4.7698;
  DomainRect domain{};
  int reps = 1;
  std::uint64_t seed = 1;
  int order = 4;
  int m_interior = -1;  // < 0: use knot_count(n)
  FitOptions fit{};
  int threads = 0;  // 0: BICENS_THREADS or hardware count
};

void validate(const SimConfig& config);

// Closed-form data-generating distribution.
struct TruthHandle {
  double alpha = 1.0;
  double rate = 0.5;

  double marginal(double s) const;
  double joint(double s, double t) const;
};

// Interior knot count for sample size n: round(n^(1/3)) - 1.
int knot_count(int n);

struct GeneratedData {
  Dataset data;
  TruthHandle truth;
};

// Draw order per observation: copula pair (two uniforms), then c1, then c2.
GeneratedData generate_dataset(const SimConfig& config, Rng& rng);

struct GridEval {
  Eigen::MatrixXd joint;  // |s| x |t|
  Eigen::VectorXd marg1;  // |s|
  Eigen::VectorXd marg2;  // |t|
};

GridEval evaluate_on_grid(const SieveSpec& spec, const ThetaVector& theta,
                          const std::vector<double>& s_grid,
                          const std::vector<double>& t_grid);

// The report axis 0.1, 0.2, ..., 4.7 (47 values) used on both axes.
std::vector<double> report_axis();

// Counts violations of the joint/marginal CDF shape inequalities
// (nonnegativity, axis monotonicity, rectangle mass, marginal dominance,
// total mass at most one) over adjacent grid cells, at tolerance `tol`.
int count_shape_violations(const GridEval& eval, double tol = 1e-10);

struct McReport {
  SimConfig config;
  std::vector<double> grid;  // axis values (both axes)
  Eigen::MatrixXd bias;      // mean(F_hat - F0) per point
  Eigen::MatrixXd rmse;      // sqrt(mean((F_hat - F0)^2)) per point
  Eigen::MatrixXd err_sd;    // sd of the error, 0 when reps_used < 2
  Eigen::MatrixXd sqerr_sd;  // sd of the squared error
  Eigen::VectorXd marg1_bias, marg1_rmse;
  Eigen::VectorXd marg2_bias, marg2_rmse;
  double overall_abs_bias = 0.0;
  double overall_rmse = 0.0;
  int failures = 0;
  int reps_used = 0;
  int interior_knots = 0;
  std::string knot_rule;

  int grid_index(double value) const;  // exact-axis lookup
};

// Runs `reps` independent replications (worker pool, deterministic
// replication streams), excluding non-converged fits from the aggregates.
McReport run_monte_carlo(const SimConfig& config);

void write_mc_points_csv(const std::string& path, const McReport& report);
void write_mc_marginals_csv(const std::string& path, const McReport& report);
void write_mc_summary(const std::string& path, const McReport& report);
std::string mc_summary_text(const McReport& report);

}  // namespace bicens
