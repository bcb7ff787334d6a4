#pragma once

#include "homog/experiments.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace homog {

// Scenario configuration read from an INI file with sections
// [scenario] [force] [grid] [solver] [experiment] [output].
struct RunConfig {
  // [scenario]
  std::string name = "default";
  unsigned seed = 0;
  // [force]
  ForceDescriptor force;
  double delta = 0.1;
  std::optional<double> gradient_bound;
  // [grid]
  int points = 256;
  double half_extent = 2.0;
  Topology topology = Topology::box;
  // [solver]
  double stop_tol = 1e-8;
  std::vector<double> lambdas{1e-2, 5e-3, 2.5e-3};
  double theta_pad = 1.2;
  double cfl_safety = 0.9;
  // [experiment]
  std::vector<double> eps_list{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  double horizon = 1.0;
  std::optional<double> coverage;
  int samples_per_axis = 81;
  std::optional<double> window;
  std::string initial = "flat";
  int points_per_eps = 16;
  int effective_refinement = 2;
  int cell_points = 256;
  std::vector<int> resolutions{256, 512, 1024};
  double expander_half_extent = 4.0;
  double eps_half_extent = 1.0;
  std::vector<double> momentum{0.0};
  double fit_window = 0.1;
  // [output]
  std::string output_dir;

  bool operator==(const RunConfig&) const = default;
};

/// Parses INI text; overrides are "section.key=value" applied before
/// validation. Unknown sections or keys are rejected with a parse error.
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Full INI text with every key; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Resolved configuration embedded in reports. The output directory is left
/// out so that reports do not depend on where they are written.
nlohmann::json config_json(const RunConfig& config);

ForcingField make_force(const RunConfig& config);
InitialProfile make_initial(const RunConfig& config);
RateSweepSettings rate_settings(const RunConfig& config, int jobs);
ConeSettings cone_settings(const RunConfig& config, int jobs);
MonitorSettings monitor_settings(const RunConfig& config);

}  // namespace homog
