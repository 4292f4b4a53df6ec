#pragma once

#include <utility>

#include "bicens/rng.hpp"

namespace bicens {

// Kendall's tau -> Clayton association parameter, alpha = (1 + tau)/(1 - tau).
double tau_to_alpha(double tau);

// C_alpha(u, v) = (u^(1-alpha) + v^(1-alpha) - 1)^(1/(1-alpha)), alpha > 1.
double clayton_cdf(double alpha, double u, double v);

// Inverse of the conditional CDF w = dC/du at fixed u.
double clayton_conditional_inverse(double alpha, double u, double w);

// Conditional-inversion draw: u and w uniform, v from the conditional
// inverse; (u, v) then has uniform marginals and copula C_alpha.
std::pair<double, double> clayton_sample(double alpha, Rng& rng);

}  // namespace bicens
