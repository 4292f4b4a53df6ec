#pragma once

#include "bicens/knots.hpp"

namespace bicens {

enum class BasisKind { M, I, B };

// Number of basis functions of the given order on the extended sequence.
int basis_count(const KnotVector& knots, int order);

// M-spline of the given order, index i in [0, basis_count). Zero outside
// [lower, upper); recursion terms with a zero denominator are taken as zero.
double mspline_eval(const KnotVector& knots, int order, int i, double s);

// Normalized B-spline (partition of unity). Zero outside [lower, upper),
// except s == upper evaluates to the limit from the left.
double bspline_eval(const KnotVector& knots, int order, int i, double s);

// CDF-like basis: the running sum of the order-`order` normalized B-splines
// from index i upward, i.e. the integrated M-spline family of degree
// order - 1. Computed from scaled partial sums of order-`order` M-splines.
// Nondecreasing, 0 at the lower bound (except index 0, which is identically
// one), 1 at the upper bound; the argument is clamped to [lower, upper].
double ispline_eval(const KnotVector& knots, int order, int i, double s);

struct BasisFamily {
  KnotVector knots;
  BasisKind kind = BasisKind::I;

  int size() const { return knots.basis_count(); }
  double eval(int i, double s) const;
};

}  // namespace bicens
