#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cli/run_config.h"

namespace wavecrn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitNumericalFailure = 3,
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  /// One-line human summary for stdout.
  std::string message;
};

/// triads.json: lattice summary, rays, triad list for the configured mode, thresholds.
CommandResult cmd_triads(const RunConfig& config);

/// trajectory.csv + summary.json. Divergence is a normal outcome; a stalled
/// integrator yields kExitNumericalFailure after writing both files.
CommandResult cmd_simulate(const RunConfig& config);

/// network_ray_NNN.{txt,json} per ray plus network_report.json.
CommandResult cmd_network(const RunConfig& config);

/// regime.json, optionally with a confirming near/exact comparison run.
CommandResult cmd_classify(const RunConfig& config);

/// Dispatches by name and maps library exceptions to exit codes. Messages
/// for failures go to `err`.
int run_command(const std::string& name, const RunConfig& config, std::ostream& out,
                std::ostream& err);

/// CSV header name of a lattice mode: p_(ix,iy,iz).
std::string mode_column_name(const LatticePoint& p);

/// Shortest round-trip formatting, for messages.
std::string format_short(double v);

/// 17-significant-digit formatting used for every CSV value.
std::string format_csv_value(double v);

}  // namespace wavecrn::cli
