#include "wavecrn/integrator.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavecrn/errors.h"

namespace wavecrn {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
constexpr double kStallFraction = 1e-14;

class DormandPrince {
 public:
  DormandPrince(const RhsFunction& rhs, std::size_t n) : rhs_(rhs), n_(n) {
    for (auto& k : k_) k.assign(n, 0.0);
    tmp_.assign(n, 0.0);
  }

  void eval(std::span<const double> f, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    rhs_(f, out);
  }

  /// Takes a trial step from f (with k_[0] = F(f)); writes the 5th order
  /// solution to next and the error estimate to err.
  void trial(std::span<const double> f, double h, std::vector<double>& next,
             std::vector<double>& err) {
    auto& [k1, k2, k3, k4, k5, k6, k7] = k_;
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = f[i] + h * a21 * k1[i];
    eval(tmp_, k2);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = f[i] + h * (a31 * k1[i] + a32 * k2[i]);
    eval(tmp_, k3);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = f[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval(tmp_, k4);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = f[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    eval(tmp_, k5);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = f[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    eval(tmp_, k6);
    for (std::size_t i = 0; i < n_; ++i)
      next[i] = f[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    eval(next, k7);
    for (std::size_t i = 0; i < n_; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }

  std::vector<double>& first() { return k_[0]; }
  void accept() { std::swap(k_[0], k_[6]); }  // FSAL

 private:
  const RhsFunction& rhs_;
  std::size_t n_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> tmp_;
};

}  // namespace

void IntegratorConfig::validate() const {
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(rel_tol) || rel_tol >= 1.0) throw ConfigError("rel_tol must lie in (0, 1)");
  if (!positive(abs_tol)) throw ConfigError("abs_tol must be positive");
  if (!positive(t_end)) throw ConfigError("t_end must be positive");
  if (!positive(max_step)) throw ConfigError("max_step must be positive");
  if (!positive(initial_step)) throw ConfigError("initial_step must be positive");
  if (!positive(sample_interval)) throw ConfigError("sample_interval must be positive");
  if (sample_interval > t_end) throw ConfigError("sample_interval must not exceed t_end");
  if (!positive(divergence_ceiling)) throw ConfigError("divergence_ceiling must be positive");
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::kReachedTEnd:
      return "reached_t_end";
    case Termination::kDiverged:
      return "diverged";
    case Termination::kStalled:
      return "stalled";
  }
  return "unknown";
}

Trajectory integrate(const RhsFunction& rhs, std::vector<double> f0,
                     const IntegratorConfig& config, const Monitor& monitor) {
  config.validate();
  if (f0.empty()) throw ShapeError("initial state is empty");
  for (double v : f0) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("initial state must be strictly positive");
  }

  const std::size_t n = f0.size();
  Trajectory traj;
  std::vector<double> f = std::move(f0);
  std::vector<double> next(n), err(n);
  DormandPrince stepper(rhs, n);

  const auto emit = [&](double t) {
    TrajectorySample s;
    s.t = t;
    s.state = f;
    s.step_count = traj.accepted_steps;
    if (monitor) monitor(t, s.state, s.monitors);
    traj.samples.push_back(std::move(s));
  };

  double t = 0.0;
  emit(t);
  stepper.eval(f, stepper.first());

  const double min_step = kStallFraction * config.t_end;
  const double interval = config.sample_interval;
  std::size_t next_sample_index = 1;
  const auto sample_time = [&](std::size_t k) {
    const double tk = static_cast<double>(k) * interval;
    return config.t_end - tk <= 1e-9 * interval ? config.t_end : tk;
  };

  double h = std::min(config.initial_step, config.max_step);
  while (true) {
    const double target = sample_time(next_sample_index);
    const double h_try = std::min(h, target - t);
    const bool lands = h_try >= target - t;
    if (h_try < min_step && !lands) {
      traj.reason = Termination::kStalled;
      break;
    }

    stepper.trial(f, h_try, next, err);

    bool positive = true;
    bool finite = true;
    double err_norm = 0.0;
    double err_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(next[i]) || !std::isfinite(err[i])) finite = false;
      if (!(next[i] > 0.0)) positive = false;
      const double scale = config.abs_tol + config.rel_tol * std::max(std::abs(f[i]), std::abs(next[i]));
      err_norm = std::max(err_norm, std::abs(err[i]) / scale);
      err_abs = std::max(err_abs, std::abs(err[i]));
    }

    if (!finite || !positive) {
      ++traj.rejected_steps;
      if (finite) ++traj.positivity_rejections;
      h = 0.5 * h_try;
      if (h < min_step) {
        traj.reason = Termination::kStalled;
        break;
      }
      continue;
    }

    if (err_norm > 1.0) {
      ++traj.rejected_steps;
      h = h_try * std::max(kMinFactor, kSafety * std::pow(err_norm, -0.2));
      if (h < min_step) {
        traj.reason = Termination::kStalled;
        break;
      }
      continue;
    }

    // Accept.
    t = lands ? target : t + h_try;
    std::swap(f, next);
    stepper.accept();
    ++traj.accepted_steps;
    traj.error_estimate += err_abs;

    const double factor =
        err_norm == 0.0 ? kMaxFactor
                        : std::clamp(kSafety * std::pow(err_norm, -0.2), kMinFactor, kMaxFactor);
    // A step shortened only to land on a sample time leaves the controller alone.
    if (!(lands && h_try < h)) h = std::min(config.max_step, h_try * factor);

    bool diverged = false;
    for (double v : f) {
      if (std::abs(v) > config.divergence_ceiling) diverged = true;
    }
    if (diverged) {
      emit(t);
      traj.reason = Termination::kDiverged;
      break;
    }
    if (lands) {
      emit(t);
      if (t >= config.t_end) {
        traj.reason = Termination::kReachedTEnd;
        break;
      }
      ++next_sample_index;
    }
  }
  if (traj.reason == Termination::kStalled && traj.samples.back().t < t) emit(t);
  return traj;
}

}  // namespace wavecrn
