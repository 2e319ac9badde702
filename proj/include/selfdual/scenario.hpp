#pragma once

#include <map>
#include <optional>
#include <string>

#include "selfdual/optimizer.hpp"
#include "selfdual/stepper.hpp"

namespace selfdual {

/// Parsed and validated run configuration (JSON with a versioned schema).
struct RunConfig {
  std::string scenario;  // gradient_flow_1mode | stokes_decay | ns2d | ns3d | ns_stationary
  int d = 2;
  int n = 32;
  double nu = 0.1;
  double T = 1.0;
  int N = 64;

  std::string boundary_kind = "initial_value";
  double alpha = 0.0;            // alpha_periodic input; lambda = (1+a)/(1-a)
  std::optional<double> lambda;  // direct lambda input

  std::string initial_preset = "taylor_green";
  double initial_amplitude = 1.0;
  std::uint64_t initial_seed = 1;

  std::string forcing_preset = "zero";
  double forcing_amplitude = 0.0;
  std::uint64_t forcing_seed = 7;

  std::string initial_path = "default";  // default | zero
  SolveOptions solver;
  std::map<std::string, double> thresholds;  // scenario acceptance thresholds
  std::string output_dir = "out";
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the JSON file; throws config_error with a location-anchored
/// message on schema violations.
RunConfig load_config(const std::string& filename);

struct RunOutcome {
  int exit_code = 1;  // 0: thresholds hold, 1: solver ran but missed them
  bool pass = false;
  std::string report_json;  // written to run_report.json
};

/// Builds the functional from the config, runs the minimizer and (when
/// applicable) the time-stepping oracle, writes run_report.json, trace.csv
/// and the solution path, and returns the threshold verdict.
RunOutcome run_scenario(const RunConfig& cfg);

/// CLI entry points. run_solve returns 0/1/2 per the documented contract.
int run_solve(const std::string& config_path, const std::optional<std::string>& output_dir,
              const std::optional<std::uint64_t>& seed);
int run_verify(const std::string& suite);

}  // namespace selfdual
