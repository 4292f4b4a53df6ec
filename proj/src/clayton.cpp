#include "bicens/clayton.hpp"

#include <cmath>
#include <stdexcept>

namespace bicens {

std::uint64_t Rng::stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 of (seed + golden-ratio spaced stream offset)
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double tau_to_alpha(double tau) {
  if (!(tau >= 0.0) || tau >= 1.0) {
    throw std::invalid_argument("tau must lie in [0, 1)");
  }
  return (1.0 + tau) / (1.0 - tau);
}

double clayton_cdf(double alpha, double u, double v) {
  if (u <= 0.0 || v <= 0.0) return 0.0;
  if (u >= 1.0 && v >= 1.0) return 1.0;
  double s = std::pow(u, 1.0 - alpha) + std::pow(v, 1.0 - alpha) - 1.0;
  return std::pow(s, 1.0 / (1.0 - alpha));
}

double clayton_conditional_inverse(double alpha, double u, double w) {
  double t = std::pow(w, (1.0 - alpha) / alpha) - 1.0;
  return std::pow(t * std::pow(u, 1.0 - alpha) + 1.0, 1.0 / (1.0 - alpha));
}

std::pair<double, double> clayton_sample(double alpha, Rng& rng) {
  double u = rng.uniform();
  double w = rng.uniform();
  return {u, clayton_conditional_inverse(alpha, u, w)};
}

}  // namespace bicens
