#include <doctest.h>

#include <stdexcept>

#include "bicens/knots.hpp"

using bicens::build_knots;
using bicens::KnotVector;

TEST_SUITE("knots") {

TEST_CASE("median interior knot for a symmetric sample") {
  KnotVector kv = build_knots({1, 2, 3, 4}, 1, 4, 0.0, 5.0);
  REQUIRE(kv.interior_count() == 1);
  CHECK(kv.interior[0] == doctest::Approx(2.5).epsilon(1e-15));
  std::vector<double> expected = {0, 0, 0, 0, 2.5, 5, 5, 5, 5};
  REQUIRE(kv.extended.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(kv.extended[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  }
  CHECK(kv.basis_count() == 5);
}

TEST_CASE("no interior knots") {
  KnotVector kv = build_knots({0.5, 1.5}, 0, 3, 0.0, 2.0);
  CHECK(kv.interior_count() == 0);
  REQUIRE(kv.extended.size() == 6);
  CHECK(kv.extended[0] == 0.0);
  CHECK(kv.extended[2] == 0.0);
  CHECK(kv.extended[3] == 2.0);
  CHECK(kv.extended[5] == 2.0);
  CHECK(kv.basis_count() == 3);
}

TEST_CASE("m = 4 on a sample of 100 gives 8 basis functions at order 4") {
  std::vector<double> samples;
  for (int i = 0; i < 100; ++i) samples.push_back(0.1 + 4.5 * i / 99.0);
  KnotVector kv = build_knots(samples, 4, 4, 0.0, 5.0);
  CHECK(kv.interior_count() == 4);
  CHECK(kv.basis_count() == 8);
  for (int k = 1; k < kv.interior_count(); ++k) {
    CHECK(kv.interior[k] > kv.interior[k - 1]);
  }
}

TEST_CASE("quantile interpolation matches hand values") {
  // Sample {10, 20}: the 1/3 and 2/3 quantiles interpolate the two order
  // statistics at h = 1/3 and 2/3.
  KnotVector kv = build_knots({10, 20}, 2, 2, 0.0, 30.0);
  REQUIRE(kv.interior_count() == 2);
  CHECK(kv.interior[0] == doctest::Approx(10 + 10.0 / 3.0).epsilon(1e-14));
  CHECK(kv.interior[1] == doctest::Approx(10 + 20.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("duplicate quantiles collapse with a warning flag") {
  std::vector<double> samples(50, 2.0);  // constant sample
  samples.push_back(1.0);
  samples.push_back(3.0);
  KnotVector kv = build_knots(samples, 5, 4, 0.0, 5.0);
  CHECK(kv.collapsed_duplicates);
  CHECK(kv.interior_count() < 5);
  for (int k = 1; k < kv.interior_count(); ++k) {
    CHECK(kv.interior[k] > kv.interior[k - 1]);
  }
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(build_knots({}, 1, 4, 0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(build_knots({1.0}, -1, 4, 0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(build_knots({1.0}, 1, 0, 0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(build_knots({1.0}, 1, 4, 5.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(build_knots({7.0}, 1, 4, 0.0, 5.0), std::invalid_argument);
}

}  // TEST_SUITE
