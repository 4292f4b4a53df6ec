#include "bicens/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bicens {

namespace {

[[noreturn]] void bad_line(const std::string& path, int line_no,
                           const std::string& why) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + why);
}

bool parse_fields(const std::string& line, std::string out[4]) {
  std::stringstream ss(line);
  int k = 0;
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (k >= 4) return false;
    out[k++] = field;
  }
  return k == 4;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  Dataset data;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "c1,c2,delta1,delta2") {
        bad_line(path, line_no, "expected header 'c1,c2,delta1,delta2'");
      }
      header_seen = true;
      continue;
    }
    std::string f[4];
    if (!parse_fields(line, f)) bad_line(path, line_no, "expected 4 fields");

    Observation obs;
    try {
      std::size_t used = 0;
      obs.c1 = std::stod(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument(f[0]);
      obs.c2 = std::stod(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument(f[1]);
    } catch (const std::exception&) {
      bad_line(path, line_no, "bad numeric field");
    }
    if (!std::isfinite(obs.c1) || !std::isfinite(obs.c2)) {
      bad_line(path, line_no, "nonfinite monitoring time");
    }
    for (int k = 2; k < 4; ++k) {
      if (f[k] != "0" && f[k] != "1") {
        bad_line(path, line_no, "delta fields must be 0 or 1");
      }
    }
    obs.d1 = f[2] == "1";
    obs.d2 = f[3] == "1";
    data.push_back(obs);
  }
  if (!header_seen) throw std::runtime_error(path + ": empty dataset file");
  return data;
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << "c1,c2,delta1,delta2\n";
  char buf[80];
  for (const Observation& obs : data) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%d\n", obs.c1, obs.c2,
                  obs.d1 ? 1 : 0, obs.d2 ? 1 : 0);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::optional<std::size_t> first_out_of_domain(const Dataset& data,
                                               const DomainRect& rect) {
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!rect.contains(data[k].c1, data[k].c2)) return k;
  }
  return std::nullopt;
}

}  // namespace bicens
