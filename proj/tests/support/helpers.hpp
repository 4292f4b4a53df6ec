#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bicens/data.hpp"
#include "bicens/rng.hpp"
#include "bicens/sieve.hpp"

namespace testsupport {

// Adaptive Simpson quadrature, used as an independent integration oracle.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-11, int depth = 30) {
  auto simpson = [&](double lo, double hi) {
    double mid = 0.5 * (lo + hi);
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
  };
  std::function<double(double, double, double, int)> recurse =
      [&](double lo, double hi, double whole, int d) -> double {
    double mid = 0.5 * (lo + hi);
    double left = simpson(lo, mid);
    double right = simpson(mid, hi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
      return left + right + (left + right - whole) / 15.0;
    }
    return recurse(lo, mid, left, d - 1) + recurse(mid, hi, right, d - 1);
  };
  return recurse(a, b, simpson(a, b), depth);
}

// Integrates piecewise over the knot intervals so the kinks do not slow the
// adaptive rule down.
inline double integrate_over_knots(const std::function<double(double)>& f,
                                   const std::vector<double>& knots) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    if (knots[k + 1] > knots[k]) {
      total += adaptive_simpson(f, knots[k], knots[k + 1]);
    }
  }
  return total;
}

// Central finite difference of a scalar function of a vector.
inline Eigen::VectorXd central_diff(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    double up = f(probe);
    probe[i] = x[i] - h;
    double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// O(n log n) Kendall tau via merge-sort inversion counting (no ties assumed).
inline std::size_t count_inversions(std::vector<double>& v,
                                    std::vector<double>& scratch,
                                    std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::size_t count =
      count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[a] <= v[b]) {
      scratch[out++] = v[a++];
    } else {
      count += mid - a;
      scratch[out++] = v[b++];
    }
  }
  while (a < mid) scratch[out++] = v[a++];
  while (b < hi) scratch[out++] = v[b++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, v.begin() + lo);
  return count;
}

inline double kendall_tau(std::vector<std::pair<double, double>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  std::vector<double> second(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) second[i] = pairs[i].second;
  std::vector<double> scratch(second.size());
  double inv = static_cast<double>(
      count_inversions(second, scratch, 0, second.size()));
  double n = static_cast<double>(pairs.size());
  return 1.0 - 4.0 * inv / (n * (n - 1.0));
}

// Strictly interior feasible coefficient vector with total mass `total`.
inline Eigen::VectorXd random_interior_theta(int dim, double total,
                                             bicens::Rng& rng) {
  Eigen::VectorXd theta(dim);
  double sum = 0.0;
  for (int i = 0; i < dim; ++i) {
    theta[i] = 0.05 + rng.uniform();
    sum += theta[i];
  }
  return theta * (total / sum);
}

// Exhaustive grid search of sum_k log(G theta + c) over the feasible set
// {theta >= 0, sum(theta) <= 1} with the given step, for dim 2 or 3. The
// inner sweep compares term products (log is monotone); products of up to a
// few dozen probabilities above 1e-12 cannot underflow. The winner is
// re-evaluated with logs.
inline double grid_search_max(const Eigen::MatrixXd& coeffs,
                              const Eigen::VectorXd& constants, double step) {
  const int n = static_cast<int>(coeffs.rows());
  const int dim = static_cast<int>(coeffs.cols());
  const int cells = static_cast<int>(std::llround(1.0 / step));
  if (n > 60) throw std::invalid_argument("grid_search_max: too many terms");

  double best_prod = -1.0;
  Eigen::VectorXd best_point = Eigen::VectorXd::Zero(dim);

  std::vector<double> base(static_cast<std::size_t>(n));
  std::vector<double> slope(static_cast<std::size_t>(n));
  const Eigen::Index last = dim - 1;
  for (int k = 0; k < n; ++k) slope[static_cast<std::size_t>(k)] = coeffs(k, last);

  auto sweep_last = [&](const Eigen::VectorXd& prefix, double budget_left) {
    int top = static_cast<int>(std::floor(budget_left / step + 1e-9));
    for (int a = 0; a <= top; ++a) {
      double x = a * step;
      double prod = 1.0;
      for (int k = 0; k < n; ++k) {
        double prob = base[static_cast<std::size_t>(k)] +
                      slope[static_cast<std::size_t>(k)] * x;
        if (prob <= 0.0) {
          prod = -1.0;
          break;
        }
        prod *= prob;
      }
      if (prod > best_prod) {
        best_prod = prod;
        best_point.head(last) = prefix;
        best_point[last] = x;
      }
    }
  };

  if (dim == 2) {
    Eigen::VectorXd prefix(1);
    for (int a0 = 0; a0 <= cells; ++a0) {
      double x0 = a0 * step;
      for (int k = 0; k < n; ++k) {
        base[static_cast<std::size_t>(k)] = constants[k] + coeffs(k, 0) * x0;
      }
      prefix[0] = x0;
      sweep_last(prefix, 1.0 - x0);
    }
  } else if (dim == 3) {
    Eigen::VectorXd prefix(2);
    for (int a0 = 0; a0 <= cells; ++a0) {
      double x0 = a0 * step;
      int top1 = static_cast<int>(std::floor((1.0 - x0) / step + 1e-9));
      for (int a1 = 0; a1 <= top1; ++a1) {
        double x1 = a1 * step;
        for (int k = 0; k < n; ++k) {
          base[static_cast<std::size_t>(k)] =
              constants[k] + coeffs(k, 0) * x0 + coeffs(k, 1) * x1;
        }
        prefix[0] = x0;
        prefix[1] = x1;
        sweep_last(prefix, 1.0 - x0 - x1);
      }
    }
  } else {
    throw std::invalid_argument("grid_search_max supports dim 2 or 3");
  }

  if (best_prod <= 0.0) {
    throw std::runtime_error("grid_search_max: no feasible grid point");
  }
  double value = 0.0;
  for (int k = 0; k < n; ++k) {
    value += std::log(constants[k] + coeffs.row(k).dot(best_point));
  }
  return value;
}

}  // namespace testsupport
