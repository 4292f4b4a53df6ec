#include "bicens/knots.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bicens {

KnotVector make_knots(std::vector<double> interior, int order, double lower,
                      double upper) {
  if (order < 1) throw std::invalid_argument("knot order must be >= 1");
  if (!(lower < upper)) throw std::invalid_argument("knot bounds need lower < upper");
  for (double v : interior) {
    if (!std::isfinite(v)) throw std::invalid_argument("interior knot is not finite");
  }
  std::sort(interior.begin(), interior.end());

  KnotVector kv;
  kv.order = order;
  kv.lower = lower;
  kv.upper = upper;
  for (double v : interior) {
    if (v <= lower || v >= upper ||
        (!kv.interior.empty() && v == kv.interior.back())) {
      kv.collapsed_duplicates = true;
      continue;
    }
    kv.interior.push_back(v);
  }

  kv.extended.reserve(kv.interior.size() + 2 * order);
  kv.extended.insert(kv.extended.end(), order, lower);
  kv.extended.insert(kv.extended.end(), kv.interior.begin(), kv.interior.end());
  kv.extended.insert(kv.extended.end(), order, upper);
  return kv;
}

namespace {

// Quantile by linear interpolation between adjacent order statistics.
double sorted_quantile(const std::vector<double>& sorted, double prob) {
  const auto n = sorted.size();
  if (n == 1) return sorted[0];
  double h = prob * static_cast<double>(n - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= n - 1) return sorted[n - 1];
  double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

KnotVector build_knots(const std::vector<double>& samples, int m, int order,
                       double lower, double upper) {
  if (samples.empty()) throw std::invalid_argument("build_knots: empty sample");
  if (m < 0) throw std::invalid_argument("build_knots: m must be >= 0");
  if (order < 1) throw std::invalid_argument("build_knots: order must be >= 1");
  if (!(lower < upper)) throw std::invalid_argument("build_knots: lower >= upper");
  for (double s : samples) {
    if (!(s >= lower && s <= upper)) {
      throw std::invalid_argument("build_knots: sample value " +
                                  std::to_string(s) + " outside [lower, upper]");
    }
  }

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> interior;
  interior.reserve(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) {
    interior.push_back(sorted_quantile(sorted, static_cast<double>(k) / (m + 1)));
  }
  return make_knots(std::move(interior), order, lower, upper);
}

}  // namespace bicens
