#include "bicens/spline.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace bicens {

namespace {

void check_index(const KnotVector& knots, int order, int i) {
  int len = static_cast<int>(knots.extended.size());
  if (order < 1 || order > len - 1) {
    throw std::invalid_argument("spline order " + std::to_string(order) +
                                " invalid for " + std::to_string(len) + " knots");
  }
  if (i < 0 || i >= len - order) {
    throw std::invalid_argument("basis index " + std::to_string(i) +
                                " out of range [0, " +
                                std::to_string(len - order) + ")");
  }
}

// Index j with u[j] <= s < u[j+1]; for s == upper, the last nondegenerate
// interval. Requires lower <= s <= upper.
int interval_index(const KnotVector& knots, double s) {
  const auto& u = knots.extended;
  if (s >= knots.upper) return knots.order + knots.interior_count() - 1;
  auto it = std::upper_bound(u.begin(), u.end(), s);
  return static_cast<int>(it - u.begin()) - 1;
}

double mspline_rec(const std::vector<double>& u, int order, int i, double s) {
  if (s < u[i] || s >= u[i + order]) return 0.0;
  if (order == 1) {
    double w = u[i + 1] - u[i];
    return w > 0.0 ? 1.0 / w : 0.0;
  }
  double den = (order - 1) * (u[i + order] - u[i]);
  if (den == 0.0) return 0.0;
  return order *
         ((s - u[i]) * mspline_rec(u, order - 1, i, s) +
          (u[i + order] - s) * mspline_rec(u, order - 1, i + 1, s)) /
         den;
}

// Cox-de Boor with the first-order indicator taken from the interval index,
// so that s == upper yields the limit from the left.
double bspline_rec(const std::vector<double>& u, int order, int i, double s,
                   int j) {
  if (order == 1) return i == j ? 1.0 : 0.0;
  if (j < i || j >= i + order) return 0.0;
  double value = 0.0;
  double den1 = u[i + order - 1] - u[i];
  if (den1 > 0.0) {
    value += (s - u[i]) / den1 * bspline_rec(u, order - 1, i, s, j);
  }
  double den2 = u[i + order] - u[i + 1];
  if (den2 > 0.0) {
    value += (u[i + order] - s) / den2 * bspline_rec(u, order - 1, i + 1, s, j);
  }
  return value;
}

}  // namespace

int basis_count(const KnotVector& knots, int order) {
  int len = static_cast<int>(knots.extended.size());
  if (order < 1 || order > len - 1) {
    throw std::invalid_argument("spline order " + std::to_string(order) +
                                " invalid for " + std::to_string(len) + " knots");
  }
  return len - order;
}

double mspline_eval(const KnotVector& knots, int order, int i, double s) {
  check_index(knots, order, i);
  if (s < knots.lower || s >= knots.upper) return 0.0;
  return mspline_rec(knots.extended, order, i, s);
}

double bspline_eval(const KnotVector& knots, int order, int i, double s) {
  check_index(knots, order, i);
  if (s < knots.lower || s > knots.upper) return 0.0;
  return bspline_rec(knots.extended, order, i, s, interval_index(knots, s));
}

double ispline_eval(const KnotVector& knots, int order, int i, double s) {
  check_index(knots, order, i);
  if (s >= knots.upper) return 1.0;
  if (s < knots.lower) s = knots.lower;

  // On u[j] <= s < u[j+1]: zero above the interval, one below the local
  // band, otherwise a partial sum of scaled M-splines over the band.
  int j = interval_index(knots, s);
  if (i > j) return 0.0;
  if (i <= j - order + 1) return 1.0;
  const auto& u = knots.extended;
  double acc = 0.0;
  for (int m = i; m <= j; ++m) {
    acc += (u[m + order] - u[m]) * mspline_rec(u, order, m, s);
  }
  return acc / order;
}

double BasisFamily::eval(int i, double s) const {
  switch (kind) {
    case BasisKind::M:
      return mspline_eval(knots, knots.order, i, s);
    case BasisKind::B:
      return bspline_eval(knots, knots.order, i, s);
    case BasisKind::I:
    default:
      return ispline_eval(knots, knots.order, i, s);
  }
}

}  // namespace bicens
