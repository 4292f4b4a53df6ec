#pragma once

#include <vector>

namespace bicens {

// Extended knot sequence for one spline basis family: the lower bound
// repeated `order` times, then strictly increasing interior knots, then the
// upper bound repeated `order` times.
struct KnotVector {
  int order = 0;  // l >= 1
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> interior;
  std::vector<double> extended;  // size interior.size() + 2 * order
  bool collapsed_duplicates = false;

  int interior_count() const { return static_cast<int>(interior.size()); }
  // Number of basis functions in the family of order `order`.
  int basis_count() const { return interior_count() + order; }
};

// Assembles a KnotVector from explicit interior knots. Interior knots that
// are not strictly inside (lower, upper) or that duplicate a previous knot
// are dropped, with collapsed_duplicates set.
KnotVector make_knots(std::vector<double> interior, int order, double lower,
                      double upper);

// Places the interior knots at the k/(m+1) empirical quantiles of `samples`
// for k = 1..m, using linear interpolation between adjacent order statistics.
KnotVector build_knots(const std::vector<double>& samples, int m, int order,
                       double lower, double upper);

}  // namespace bicens
