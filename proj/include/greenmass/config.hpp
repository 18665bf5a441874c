#pragma once

#include "greenmass/elliptic_green.hpp"
#include "greenmass/levelset_geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace greenmass {

struct FunctionalConfig {
  double s0 = 0.05;
  std::vector<double> t_grid{2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  std::vector<double> a_grid{4, 8, 16, 32, 64};
  double monotone_tol = 1e-3;
  double d_tolerance = 1e-2;
  bool cross_check = true;
};

struct AsymptoticsConfig {
  bool enabled = true;
  std::vector<double> R{8, 16, 32, 64, 128};
  double q = 1.0;
  double p = 4.0;
};

struct OutputConfig {
  std::string dir;
  bool checkpoint = true;
};

// Sections: [model] [grid] [solver] [functionals] [asymptotics] [output].
// [model] and [grid] are required; the rest fall back to defaults.
struct RunConfig {
  std::map<std::string, std::string> model_keys;
  MetricModel model = MetricModel::euclidean();
  GridSpec grid;
  SolverOptions solver;
  bool oracle = false;  // radial models only
  SmearOptions smear;
  FunctionalConfig functionals;
  AsymptoticsConfig asymptotics;
  OutputConfig output;

  // canonical text of every resolved setting; the config hash is taken over it
  std::string canonical() const;
  std::string hash() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// "1, 2, 4" -> {1, 2, 4}
std::vector<double> parse_list(const std::string& s);

}  // namespace greenmass
