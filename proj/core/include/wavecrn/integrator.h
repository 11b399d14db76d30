#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wavecrn {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double t_end = 1.0;
  double max_step = 1.0;
  double initial_step = 1e-3;
  double sample_interval = 0.1;
  double divergence_ceiling = 1e9;

  /// Throws ConfigError on any non-positive field, rel_tol >= 1, or
  /// sample_interval > t_end.
  void validate() const;
};

enum class Termination { kReachedTEnd, kDiverged, kStalled };

std::string_view to_string(Termination reason);

/// Values computed by a Monitor at each emitted sample.
struct MonitorValues {
  double lyapunov_log = 0.0;
  double lyapunov_prod = 0.0;
  std::optional<double> energy;
  std::optional<std::array<double, 3>> momentum;
};

struct TrajectorySample {
  double t = 0.0;
  std::vector<double> state;
  MonitorValues monitors;
  std::size_t step_count = 0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Termination reason = Termination::kReachedTEnd;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Steps rejected because a trial state had a non-positive component.
  std::size_t positivity_rejections = 0;
  /// Sum of accepted local error estimates (max-norm, absolute units); an
  /// upper estimate of the global error for contracting dynamics.
  double error_estimate = 0.0;
};

/// dfdt = F(f). dfdt arrives zero-filled.
using RhsFunction = std::function<void(std::span<const double> f, std::span<double> dfdt)>;

/// Observation hook evaluated at every emitted sample.
using Monitor = std::function<void(double t, std::span<const double> f, MonitorValues& out)>;

/// Adaptive Dormand-Prince 5(4) integration of df/dt = F(f) on [0, t_end].
///
/// Steps are controlled on max_i |err_i| / (abs_tol + rel_tol |f_i|). A trial
/// step yielding any non-positive component is rejected and retried at half
/// the step. Samples are emitted at t = 0, at every multiple of
/// sample_interval, and at the final time. The run stops early as kDiverged
/// once some |f_i| exceeds divergence_ceiling, or as kStalled when the step
/// falls below 1e-14 t_end.
Trajectory integrate(const RhsFunction& rhs, std::vector<double> f0,
                     const IntegratorConfig& config, const Monitor& monitor = {});

}  // namespace wavecrn
