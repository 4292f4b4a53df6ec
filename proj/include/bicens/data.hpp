#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bicens {

// One bivariate current-status record: monitoring times (c1, c2) and the
// event indicators d1 = 1{T1 <= c1}, d2 = 1{T2 <= c2}.
struct Observation {
  double c1 = 0.0;
  double c2 = 0.0;
  bool d1 = false;
  bool d2 = false;
};

using Dataset = std::vector<Observation>;

struct DomainRect {
  double lo1 = 0.0;
  double hi1 = 5.0;
  double lo2 = 0.0;
  double hi2 = 5.0;

  bool contains(double s, double t) const {
    return s >= lo1 && s <= hi1 && t >= lo2 && t <= hi2;
  }
};

// CSV schema: header "c1,c2,delta1,delta2", '#' starts a comment line,
// deltas strictly 0/1. Throws std::runtime_error naming the bad line.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const std::string& path, const Dataset& data);

// Index of the first observation outside the rectangle, if any.
std::optional<std::size_t> first_out_of_domain(const Dataset& data,
                                               const DomainRect& rect);

}  // namespace bicens
