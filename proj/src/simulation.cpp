#include "bicens/simulation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bicens {

void validate(const SimConfig& config) {
  if (config.n < 1) throw std::invalid_argument("simulation needs n >= 1");
  if (!(config.tau > 0.0 && config.tau < 1.0)) {
    throw std::invalid_argument("tau must lie in (0, 1)");
  }
  if (!(config.marginal_rate > 0.0)) {
    throw std::invalid_argument("marginal rate must be positive");
  }
  if (!(config.censor_lo < config.censor_hi)) {
    throw std::invalid_argument("censoring interval is empty");
  }
  if (config.censor_lo <= config.domain.lo1 ||
      config.censor_hi >= config.domain.hi1 ||
      config.censor_lo <= config.domain.lo2 ||
      config.censor_hi >= config.domain.hi2) {
    throw std::invalid_argument(
        "censoring interval must lie strictly inside the domain");
  }
  if (config.reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (config.order < 1) throw std::invalid_argument("order must be >= 1");
}

double TruthHandle::marginal(double s) const {
  if (s <= 0.0) return 0.0;
  return 1.0 - std::exp(-rate * s);
}

double TruthHandle::joint(double s, double t) const {
  return clayton_cdf(alpha, marginal(s), marginal(t));
}

int knot_count(int n) {
  return static_cast<int>(std::llround(std::cbrt(static_cast<double>(n)))) - 1;
}

GeneratedData generate_dataset(const SimConfig& config, Rng& rng) {
  validate(config);
  GeneratedData out;
  out.truth.alpha = tau_to_alpha(config.tau);
  out.truth.rate = config.marginal_rate;
  out.data.reserve(static_cast<std::size_t>(config.n));
  for (int k = 0; k < config.n; ++k) {
    auto [u, v] = clayton_sample(out.truth.alpha, rng);
    double t1 = -std::log1p(-u) / config.marginal_rate;
    double t2 = -std::log1p(-v) / config.marginal_rate;
    Observation obs;
    obs.c1 = rng.uniform(config.censor_lo, config.censor_hi);
    obs.c2 = rng.uniform(config.censor_lo, config.censor_hi);
    obs.d1 = t1 <= obs.c1;
    obs.d2 = t2 <= obs.c2;
    out.data.push_back(obs);
  }
  return out;
}

GridEval evaluate_on_grid(const SieveSpec& spec, const ThetaVector& theta,
                          const std::vector<double>& s_grid,
                          const std::vector<double>& t_grid) {
  const int p = spec.p();
  const int q = spec.q();
  if (theta.p != p || theta.q != q) {
    throw std::invalid_argument("theta dimensions do not match the spec");
  }
  const auto ns = static_cast<Eigen::Index>(s_grid.size());
  const auto nt = static_cast<Eigen::Index>(t_grid.size());

  Eigen::MatrixXd basis1(ns, p), basis2(nt, q);
  for (Eigen::Index a = 0; a < ns; ++a) {
    for (int i = 0; i < p; ++i) basis1(a, i) = spec.basis1.eval(i, s_grid[a]);
  }
  for (Eigen::Index b = 0; b < nt; ++b) {
    for (int j = 0; j < q; ++j) basis2(b, j) = spec.basis2.eval(j, t_grid[b]);
  }

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      eta(theta.coeffs.data(), p, q);
  Eigen::VectorXd omega = theta.coeffs.segment(p * q, p);
  Eigen::VectorXd pi = theta.coeffs.segment(p * q + p, q);

  GridEval eval;
  eval.joint = basis1 * eta * basis2.transpose();
  eval.marg1 = basis1 * (eta.rowwise().sum() + omega);
  eval.marg2 = basis2 * (eta.colwise().sum().transpose() + pi);
  return eval;
}

std::vector<double> report_axis() {
  std::vector<double> axis(47);
  for (int i = 0; i < 47; ++i) axis[i] = (i + 1) / 10.0;
  return axis;
}

int count_shape_violations(const GridEval& eval, double tol) {
  const Eigen::Index ns = eval.joint.rows();
  const Eigen::Index nt = eval.joint.cols();
  int bad = 0;
  for (Eigen::Index a = 0; a < ns; ++a) {
    for (Eigen::Index b = 0; b < nt; ++b) {
      double f = eval.joint(a, b);
      double f1 = eval.marg1(a);
      double f2 = eval.marg2(b);
      if (f < -tol) ++bad;
      if (f1 - f < -tol) ++bad;
      if (f2 - f < -tol) ++bad;
      if (1.0 - f1 - (f2 - f) < -tol) ++bad;
      if (a + 1 < ns) {
        if (eval.joint(a + 1, b) - f < -tol) ++bad;
        if ((eval.marg1(a + 1) - f1) - (eval.joint(a + 1, b) - f) < -tol) ++bad;
      }
      if (b + 1 < nt) {
        if (eval.joint(a, b + 1) - f < -tol) ++bad;
        if ((eval.marg2(b + 1) - f2) - (eval.joint(a, b + 1) - f) < -tol) ++bad;
      }
      if (a + 1 < ns && b + 1 < nt) {
        double rect = (eval.joint(a + 1, b + 1) - eval.joint(a, b + 1)) -
                      (eval.joint(a + 1, b) - f);
        if (rect < -tol) ++bad;
      }
    }
  }
  return bad;
}

int McReport::grid_index(double value) const {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - value) < 1e-9) return static_cast<int>(i);
  }
  throw std::invalid_argument("value is not on the report grid");
}

namespace {

int worker_count(const SimConfig& config) {
  int threads = config.threads;
  if (threads <= 0) {
    if (const char* env = std::getenv("BICENS_THREADS")) {
      threads = std::atoi(env);
    }
  }
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (threads < 1) threads = 1;
  return std::min(threads, config.reps);
}

struct RepOutcome {
  bool converged = false;
  GridEval eval;
  std::string error;
};

RepOutcome run_replication(const SimConfig& config, std::uint64_t rep,
                           int m_interior, const std::vector<double>& axis) {
  RepOutcome outcome;
  try {
    Rng rng(Rng::stream_seed(config.seed, rep));
    GeneratedData gen = generate_dataset(config, rng);

    std::vector<double> c1(gen.data.size()), c2(gen.data.size());
    for (std::size_t k = 0; k < gen.data.size(); ++k) {
      c1[k] = gen.data[k].c1;
      c2[k] = gen.data[k].c2;
    }
    SieveSpec spec = make_sieve_spec(
        build_knots(c1, m_interior, config.order, config.domain.lo1,
                    config.domain.hi1),
        build_knots(c2, m_interior, config.order, config.domain.lo2,
                    config.domain.hi2));

    SieveFitResult fitted = fit(spec, gen.data, config.fit);
    if (!fitted.converged) {
      outcome.error = "fit did not converge";
      return outcome;
    }
    outcome.eval = evaluate_on_grid(spec, fitted.theta_hat, axis, axis);
    outcome.converged = true;
  } catch (const std::exception& ex) {
    outcome.error = ex.what();
  }
  return outcome;
}

}  // namespace

McReport run_monte_carlo(const SimConfig& config) {
  validate(config);
  const std::vector<double> axis = report_axis();
  const auto g = static_cast<Eigen::Index>(axis.size());
  const int m_interior =
      config.m_interior >= 0 ? config.m_interior : knot_count(config.n);

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.reps));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      int rep = next.fetch_add(1);
      if (rep >= config.reps) return;
      outcomes[static_cast<std::size_t>(rep)] = run_replication(
          config, static_cast<std::uint64_t>(rep), m_interior, axis);
    }
  };
  int threads = worker_count(config);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  McReport report;
  report.config = config;
  report.grid = axis;
  report.interior_knots = m_interior;
  report.knot_rule = config.m_interior >= 0 ? "fixed by configuration"
                                            : "round(n^(1/3)) - 1";

  TruthHandle truth{tau_to_alpha(config.tau), config.marginal_rate};
  Eigen::MatrixXd truth_joint(g, g);
  Eigen::VectorXd truth_marg(g);
  for (Eigen::Index a = 0; a < g; ++a) {
    truth_marg[a] = truth.marginal(axis[a]);
    for (Eigen::Index b = 0; b < g; ++b) {
      truth_joint(a, b) = truth.joint(axis[a], axis[b]);
    }
  }

  Eigen::MatrixXd sum1 = Eigen::MatrixXd::Zero(g, g);
  Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(g, g);
  Eigen::MatrixXd sum4 = Eigen::MatrixXd::Zero(g, g);
  Eigen::VectorXd m1_sum1 = Eigen::VectorXd::Zero(g), m1_sum2 = m1_sum1;
  Eigen::VectorXd m2_sum1 = m1_sum1, m2_sum2 = m1_sum1;

  std::string first_error;
  for (const RepOutcome& outcome : outcomes) {
    if (!outcome.converged) {
      ++report.failures;
      if (first_error.empty()) first_error = outcome.error;
      continue;
    }
    ++report.reps_used;
    Eigen::MatrixXd err = outcome.eval.joint - truth_joint;
    sum1 += err;
    Eigen::MatrixXd err2 = err.cwiseProduct(err);
    sum2 += err2;
    sum4 += err2.cwiseProduct(err2);
    Eigen::VectorXd e1 = outcome.eval.marg1 - truth_marg;
    Eigen::VectorXd e2 = outcome.eval.marg2 - truth_marg;
    m1_sum1 += e1;
    m1_sum2 += e1.cwiseProduct(e1);
    m2_sum1 += e2;
    m2_sum2 += e2.cwiseProduct(e2);
  }
  if (report.reps_used == 0) {
    throw std::runtime_error("all replications failed; first error: " +
                             first_error);
  }

  const double r = static_cast<double>(report.reps_used);
  report.bias = sum1 / r;
  report.rmse = (sum2 / r).cwiseSqrt();
  if (report.reps_used >= 2) {
    Eigen::MatrixXd var_err =
        (sum2 - sum1.cwiseProduct(sum1) / r).cwiseMax(0.0) / (r - 1.0);
    Eigen::MatrixXd var_sq =
        (sum4 - sum2.cwiseProduct(sum2) / r).cwiseMax(0.0) / (r - 1.0);
    report.err_sd = var_err.cwiseSqrt();
    report.sqerr_sd = var_sq.cwiseSqrt();
  } else {
    report.err_sd = Eigen::MatrixXd::Zero(g, g);
    report.sqerr_sd = Eigen::MatrixXd::Zero(g, g);
  }
  report.marg1_bias = m1_sum1 / r;
  report.marg1_rmse = (m1_sum2 / r).cwiseSqrt();
  report.marg2_bias = m2_sum1 / r;
  report.marg2_rmse = (m2_sum2 / r).cwiseSqrt();
  report.overall_abs_bias = report.bias.cwiseAbs().mean();
  report.overall_rmse = report.rmse.mean();
  return report;
}

void write_mc_points_csv(const std::string& path, const McReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "s,t,bias,rmse\n";
  char buf[128];
  const auto g = static_cast<Eigen::Index>(report.grid.size());
  for (Eigen::Index a = 0; a < g; ++a) {
    for (Eigen::Index b = 0; b < g; ++b) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                    report.grid[a], report.grid[b], report.bias(a, b),
                    report.rmse(a, b));
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_mc_marginals_csv(const std::string& path, const McReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "axis,s,bias,rmse\n";
  char buf[128];
  const auto g = static_cast<Eigen::Index>(report.grid.size());
  for (Eigen::Index a = 0; a < g; ++a) {
    std::snprintf(buf, sizeof(buf), "1,%.17g,%.17g,%.17g\n", report.grid[a],
                  report.marg1_bias[a], report.marg1_rmse[a]);
    out << buf;
  }
  for (Eigen::Index b = 0; b < g; ++b) {
    std::snprintf(buf, sizeof(buf), "2,%.17g,%.17g,%.17g\n", report.grid[b],
                  report.marg2_bias[b], report.marg2_rmse[b]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string mc_summary_text(const McReport& report) {
  std::ostringstream out;
  char buf[160];
  auto put = [&](const char* key, double value) {
    std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, value);
    out << buf;
  };
  out << "n=" << report.config.n << "\n";
  put("tau", report.config.tau);
  out << "reps=" << report.config.reps << "\n";
  out << "reps_used=" << report.reps_used << "\n";
  out << "failures=" << report.failures << "\n";
  out << "seed=" << report.config.seed << "\n";
  out << "order=" << report.config.order << "\n";
  out << "interior_knots=" << report.interior_knots << "\n";
  out << "knot_rule=" << report.knot_rule << "\n";
  put("overall_abs_bias", report.overall_abs_bias);
  put("overall_rmse", report.overall_rmse);
  for (double s : {0.1, 4.6}) {
    for (double t : {0.1, 4.6}) {
      int a = report.grid_index(s);
      int b = report.grid_index(t);
      std::snprintf(buf, sizeof(buf), "point_%.1f_%.1f_bias=%.17g\n", s, t,
                    report.bias(a, b));
      out << buf;
      std::snprintf(buf, sizeof(buf), "point_%.1f_%.1f_rmse=%.17g\n", s, t,
                    report.rmse(a, b));
      out << buf;
    }
  }
  return out.str();
}

void write_mc_summary(const std::string& path, const McReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << mc_summary_text(report);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace bicens
