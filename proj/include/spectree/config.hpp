#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spectree/halfline.hpp"
#include "spectree/potentials.hpp"
#include "spectree/tree_model.hpp"

namespace spectree {

// Flat sectioned key-value config ("[section]" headers, "key = value" lines,
// '#' comments). Parse errors carry line and field information.
struct Config {
  RegularTree tree;
  double dimension = 1.0;  // d used by the analysis (declared or estimated)
  RadialPotential potential;
  Numerics numerics;

  struct Sweep {
    double lambda_min = 1e-3;
    double lambda_max = 1e-2;
    int points_per_decade = 8;
    double lambda = 0.0;  // single-point commands
  } sweep;

  struct BS {
    int nodes_per_panel = 24;
    std::vector<double> kappas{0.5, 0.1, 0.02};
  } bs;

  int k_max = -1;  // -1 = certified automatically

  // Raw key-value view for echoing the effective settings into reports.
  std::map<std::string, std::string> raw;
};

Config parse_config_file(const std::string& path);
Config parse_config_text(const std::string& text,
                         const std::string& origin = "<string>");

}  // namespace spectree
