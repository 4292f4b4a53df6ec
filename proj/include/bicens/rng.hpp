#pragma once

#include <cstdint>
#include <random>

namespace bicens {

// Seedable generator with open-interval uniforms. Replication streams are
// split deterministically with stream_seed so parallel and serial runs
// produce identical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on the open interval (0, 1), 52-bit resolution.
  double uniform() {
    return (static_cast<double>(gen_() >> 12) + 0.5) * 0x1p-52;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 gen_;
};

}  // namespace bicens
