#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavecrn/integrator.h"
#include "wavecrn/lattice.h"

namespace wavecrn::cli {

enum class Mode { kExact, kNear };

std::string_view to_string(Mode mode);

struct InitialCondition {
  enum class Kind { kConstant, kList, kRandom };
  Kind kind = Kind::kConstant;
  double value = 1.0;           // kConstant
  std::vector<double> values;   // kList, one entry per mode
  double lo = 0.1, hi = 10.0;   // kRandom, log-uniform
};

/// Everything a command needs. Loaded from a JSON document; see
/// docs/config.md for the field list and defaults.
struct RunConfig {
  double radius = 3.5;
  Dimension dimension = Dimension::kThree;
  double lambda_broadening = 0.0;
  KernelParams kernel;
  Mode mode = Mode::kExact;
  /// Restricts simulate/network to the ray with this primitive generator.
  std::optional<LatticePoint> ray;
  InitialCondition initial;
  IntegratorConfig integrator = default_integrator();
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  /// classify: also run a confirming broadened simulation.
  bool confirm = false;
  /// network: random states per ray for the equivalence report.
  int network_samples = 200;

  static IntegratorConfig default_integrator();

  /// Throws ConfigError on any inconsistent field.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Parses a config document; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda_broadening;
  std::optional<double> radius;
  std::optional<Mode> mode;
  std::optional<int> dimension;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Output directory precedence: config/flag, then $WAVECRN_OUT_DIR, then ".".
std::filesystem::path resolve_output_dir(const RunConfig& config);

inline constexpr const char* kOutputDirEnv = "WAVECRN_OUT_DIR";

/// Deterministic initial state of length n for the configured initial condition.
std::vector<double> make_initial_state(const RunConfig& config, std::size_t n);

}  // namespace wavecrn::cli
