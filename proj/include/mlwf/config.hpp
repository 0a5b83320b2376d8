#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlwf/fiber.hpp"
#include "mlwf/optimizer.hpp"

namespace mlwf {

/// Flat INI-style file: [section] headers, key = value lines, '#' comments.
/// Keys may repeat (potential coefficient lines do).
struct RawConfig {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;

  bool has(const std::string& section) const { return sections.count(section) > 0; }
};

RawConfig parse_ini(std::istream& in, const std::string& filename = "<config>");
RawConfig parse_ini_file(const std::string& path);

/// Typed run configuration. Unknown keys are rejected; a command asks for
/// the sections it needs and missing ones raise ConfigError by name.
struct RunConfig {
  // [lattice]
  int dim = 0;
  Eigen::MatrixXd basis;

  // [potential]
  PotentialSpec potential;

  // [window]
  int first_band = 0;
  int band_count = 1;
  double gap_tol = 1e-8;

  // [grid]
  std::vector<int> nk;
  double cutoff = 0.0;
  std::vector<int> samples_per_cell;

  // [optimizer]
  OptimizerConfig optimizer;

  // [output]
  std::string output_dir = "out";

  static RunConfig load(const RawConfig& raw, const std::vector<std::string>& required);
};

}  // namespace mlwf
