#include "bicens/result_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bicens {

void save_fit_result(const std::string& path, const SieveSpec& spec,
                     const SieveFitResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[160];

  out << "# bicens fit result\n";
  out << "status " << (result.converged ? "converged" : "not-converged")
      << (result.stalled ? " stalled" : "") << "\n";
  std::snprintf(buf, sizeof(buf), "loglik %.17g\n", result.loglik);
  out << buf;
  out << "iterations " << result.iterations << "\n";
  out << "p " << spec.p() << "\n";
  out << "q " << spec.q() << "\n";
  out << "order " << spec.basis1.knots.order << "\n";
  std::snprintf(buf, sizeof(buf), "domain %.17g %.17g %.17g %.17g\n",
                spec.basis1.knots.lower, spec.basis1.knots.upper,
                spec.basis2.knots.lower, spec.basis2.knots.upper);
  out << buf;
  for (int axis = 0; axis < 2; ++axis) {
    const auto& knots = axis == 0 ? spec.basis1.knots : spec.basis2.knots;
    out << "knots" << (axis + 1);
    for (double v : knots.interior) {
      std::snprintf(buf, sizeof(buf), " %.17g", v);
      out << buf;
    }
    out << "\n";
  }
  if (!result.trace.empty()) {
    std::snprintf(buf, sizeof(buf), "final_dir_norm %.17g\n",
                  result.trace.back().dir_norm);
    out << buf;
  }
  out << "active";
  for (int idx : result.active.indices) out << " " << idx;
  out << "\n";
  out << "multipliers";
  for (Eigen::Index r = 0; r < result.multipliers.size(); ++r) {
    std::snprintf(buf, sizeof(buf), " %.17g", result.multipliers[r]);
    out << buf;
  }
  out << "\n";

  const ThetaVector& theta = result.theta_hat;
  out << "theta_begin\n";
  for (int i = 0; i < theta.p; ++i) {
    for (int j = 0; j < theta.q; ++j) {
      std::snprintf(buf, sizeof(buf), "eta %d %d %.17g\n", i, j, theta.eta(i, j));
      out << buf;
    }
  }
  for (int i = 0; i < theta.p; ++i) {
    std::snprintf(buf, sizeof(buf), "omega %d %.17g\n", i, theta.omega(i));
    out << buf;
  }
  for (int j = 0; j < theta.q; ++j) {
    std::snprintf(buf, sizeof(buf), "pi %d %.17g\n", j, theta.pi(j));
    out << buf;
  }
  out << "theta_end\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

ThetaVector load_fit_result_theta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  int p = -1, q = -1;
  std::string line;
  bool in_theta = false;
  ThetaVector theta;
  bool sized = false;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "p") ss >> p;
    if (key == "q") ss >> q;
    if (key == "theta_begin") {
      if (p <= 0 || q <= 0) {
        throw std::runtime_error(path + ": theta block before dimensions");
      }
      theta = ThetaVector::zero(p, q);
      sized = true;
      in_theta = true;
      continue;
    }
    if (key == "theta_end") {
      in_theta = false;
      continue;
    }
    if (!in_theta) continue;
    if (key == "eta") {
      int i, j;
      double v;
      if (!(ss >> i >> j >> v)) throw std::runtime_error(path + ": bad eta line");
      theta.eta(i, j) = v;
    } else if (key == "omega") {
      int i;
      double v;
      if (!(ss >> i >> v)) throw std::runtime_error(path + ": bad omega line");
      theta.omega(i) = v;
    } else if (key == "pi") {
      int j;
      double v;
      if (!(ss >> j >> v)) throw std::runtime_error(path + ": bad pi line");
      theta.pi(j) = v;
    }
  }
  if (!sized) throw std::runtime_error(path + ": no theta block found");
  return theta;
}

}  // namespace bicens
