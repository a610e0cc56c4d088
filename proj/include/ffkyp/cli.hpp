#pragma once

#include "ffkyp/core_model.hpp"
#include "ffkyp/system_io.hpp"
#include "ffkyp/trajectory.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ffkyp {

/// Settings shared by the CLI commands; a JSON config file may provide any
/// subset of these keys (unknown keys are rejected).
struct AnalysisConfig {
  std::string system = "example1";
  std::string range = "low:1";
  std::string mode = "lpv_ff";
  double bisect_tol = 1e-4;
  int verify_density = 11;
  int grid_density = 11;
  int quad_nodes = 201;
  std::string schedule;
  double t_end = 60.0;
  double step = 1e-3;
  std::string out = "ffkyp-out";
  std::optional<std::vector<double>> frozen_p;
};

AnalysisConfig config_from_json(const Json& j, AnalysisConfig base = {});

/// `example1` names the built-in system; anything else is a file path.
LpvSystem resolve_system(const std::string& spec);

/// Midpoint + half-width · sin(4t) on every axis (0.15 + 0.05 sin 4t for the
/// built-in example); constant for parameter-free systems.
ScheduleTrajectory default_schedule(const ParameterBox& box);

/// Entry point behind the `ffkyp` executable. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ffkyp
