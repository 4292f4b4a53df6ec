#pragma once

#include <string>

#include "bicens/ggp.hpp"
#include "bicens/sieve.hpp"

namespace bicens {

// Human-readable result file with a machine-parsable coefficient block
// (lines "eta I J VALUE", "omega I VALUE", "pi J VALUE" between theta_begin
// and theta_end). Numeric values carry 17 significant digits.
void save_fit_result(const std::string& path, const SieveSpec& spec,
                     const SieveFitResult& result);

// Reads the coefficient block back.
ThetaVector load_fit_result_theta(const std::string& path);

}  // namespace bicens
