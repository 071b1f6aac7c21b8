#pragma once

// Line-oriented configuration:
//
//   # comment
//   key = value
//
// Keys are fixed (see config_keys()); lists are comma separated; booleans
// are true/false. Tolerance overrides use tol_abs.<check id> and
// tol_rel.<check id>. Unknown keys, duplicates and malformed values are
// errors that carry the line and column.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvkit/error.hpp"

namespace curvkit {

class ConfigError : public Error {
 public:
  ConfigError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ToleranceOverride {
  std::optional<double> abs;
  std::optional<double> rel;
};

struct SuiteConfig {
  std::string suite = "all";
  bool fast = false;
  int threads = 0;  // 0: environment default
  std::uint64_t seed = 20240611;
  std::string output;  // stdout when empty
  std::string format = "json";
  std::vector<std::string> checks;  // check groups to run; all when empty

  int tensors_points = 100;
  int conformal_fields = 50;
  int gbc_nodes = 0;  // atlas default when 0
  int gbc6_nodes = 12;
  std::vector<double> expansion_radii = {0.05, 0.1, 0.2};
  int expansion_radial_nodes = 12;
  int expansion_angular_nodes = 12;
  std::vector<double> oneill_epsilons = {0.1, 0.5, 1.3};
  int stereographic_points = 1000;
  int sobolev_samples = 100;
  int sobolev_nodes = 16;
  int yamabe_nodes = 16;
  int yamabe_iterations = 200;
  // Generators as "translation:<axis>:<length>" (attracting +e_axis,
  // repelling -e_axis) or "rotation:<i>:<j>:<angle>"; when empty, one
  // translation of kleinian_length along each of the first two axes.
  std::vector<std::string> kleinian_generators;
  int kleinian_dim = 3;
  double kleinian_length = 3.0;
  int kleinian_max_length = 11;
  int kleinian_points = 10000;
  int kleinian_word_length = 14;
  double kleinian_cyclic_length = 1.0;
  int kleinian_cyclic_max_length = 300;

  std::map<std::string, ToleranceOverride> tolerances;
};

std::vector<std::string> config_keys();
SuiteConfig parse_config(std::istream& in);
SuiteConfig parse_config_text(const std::string& text);
// "-" reads standard input.
SuiteConfig parse_config_file(const std::string& path);

}  // namespace curvkit
