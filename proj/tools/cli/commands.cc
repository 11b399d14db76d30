#include "cli/commands.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "wavecrn/wavecrn.h"

namespace wavecrn::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path prepare_output_dir(const RunConfig& config) {
  const fs::path dir = resolve_output_dir(config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

json lattice_summary(const RunConfig& config, const Lattice& lattice, const RayDecomposition& rays) {
  return {{"radius", config.radius},
          {"dimension", static_cast<int>(config.dimension)},
          {"point_count", lattice.size()},
          {"ray_count", rays.rays.size()}};
}

const Ray& find_ray(const RayDecomposition& rays, const LatticePoint& generator) {
  for (const auto& r : rays.rays) {
    if (r.generator == generator) return r;
  }
  throw ConfigError("ray (" + std::to_string(generator.ix()) + "," + std::to_string(generator.iy()) +
                    "," + std::to_string(generator.iz()) +
                    ") is not a primitive generator of this lattice");
}

// One integrable system: either a single ray in local coordinates k = 1..I or
// the whole lattice.
struct System {
  bool single_ray = false;
  const Ray* ray = nullptr;
  std::vector<Triad> triads;
  std::vector<std::string> mode_names;
};

System build_system(const RunConfig& config, const Lattice& lattice, const RayDecomposition& rays) {
  System s;
  if (config.ray) {
    s.single_ray = true;
    s.ray = &find_ray(rays, *config.ray);
    s.triads = ray_triads(*s.ray, config.kernel);
    for (int k = 1; k <= s.ray->mode_count; ++k) s.mode_names.push_back("k_" + std::to_string(k));
    return s;
  }
  s.triads = config.mode == Mode::kExact
                 ? enumerate_exact_triads(lattice, rays, config.kernel)
                 : enumerate_near_triads(lattice, config.lambda_broadening, config.kernel);
  for (const auto& p : lattice.points()) s.mode_names.push_back(mode_column_name(p));
  return s;
}

Trajectory run_system(const System& s, const Lattice& lattice, std::vector<double> f0,
                      const IntegratorConfig& integrator) {
  const RhsFunction rhs = [&s](std::span<const double> f, std::span<double> dfdt) {
    accumulate_collisions(f, s.triads, dfdt);
  };
  const Monitor monitor = [&s, &lattice](double, std::span<const double> f, MonitorValues& m) {
    m.lyapunov_log = lyapunov_log(f);
    m.lyapunov_prod = lyapunov_prod(f);
    if (s.single_ray) {
      m.energy = conserved_energy_ray(f);
    } else {
      m.momentum = conserved_momentum(f, lattice);
    }
  };
  return integrate(rhs, std::move(f0), integrator, monitor);
}

std::string trajectory_csv(const System& s, const Trajectory& traj) {
  std::string out = "t";
  for (const auto& name : s.mode_names) {
    out += ",";
    out += name.find(',') != std::string::npos ? "\"" + name + "\"" : name;
  }
  out += ",lyapunov_log,lyapunov_prod";
  out += s.single_ray ? ",energy" : ",momentum_x,momentum_y,momentum_z";
  out += "\n";
  for (const auto& sample : traj.samples) {
    out += format_csv_value(sample.t);
    for (double v : sample.state) out += "," + format_csv_value(v);
    out += "," + format_csv_value(sample.monitors.lyapunov_log);
    out += "," + format_csv_value(sample.monitors.lyapunov_prod);
    if (s.single_ray) {
      out += "," + format_csv_value(sample.monitors.energy.value_or(NAN));
    } else {
      const auto m = sample.monitors.momentum.value_or(std::array<double, 3>{NAN, NAN, NAN});
      for (double c : m) out += "," + format_csv_value(c);
    }
    out += "\n";
  }
  return out;
}

// Relative drift of the conserved monitors between the first and last sample.
json conservation_block(const System& s, const Trajectory& traj, const Lattice& lattice) {
  const auto& first = traj.samples.front();
  const auto& last = traj.samples.back();
  if (s.single_ray) {
    const double e0 = *first.monitors.energy;
    return {{"energy_initial", e0},
            {"energy_final", *last.monitors.energy},
            {"energy_drift_relative", std::abs(*last.monitors.energy - e0) / std::abs(e0)}};
  }
  // Normalized by sum |p| f so that a zero net momentum does not blow up the ratio.
  double scale = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) scale += lattice[i].norm() * first.state[i];
  double drift = 0.0;
  for (int c = 0; c < 3; ++c) {
    drift = std::max(drift, std::abs((*last.monitors.momentum)[c] - (*first.monitors.momentum)[c]));
  }
  return {{"momentum_initial", *first.monitors.momentum},
          {"momentum_final", *last.monitors.momentum},
          {"momentum_drift_relative", drift / scale}};
}

json equilibrium_block(const System& s, const RayDecomposition& rays, std::span<const double> f0,
                       const Trajectory& traj, json& rate_out, json& rate_note) {
  std::vector<double> f_star;
  json block;
  std::vector<Eigen::VectorXd> conserved;
  if (s.single_ray) {
    auto eq = equilibrium_ray(f0);
    block["rho"] = eq.rho;
    if (s.ray->mode_count >= 3) block["spectrum_slope"] = spectrum_slope(eq.f_star);
    f_star = std::move(eq.f_star);
    conserved.push_back(ray_energy_weights(s.ray->mode_count));
  } else {
    auto eq = equilibrium_lattice(f0, rays);
    block["rho"] = eq.rho;
    f_star = std::move(eq.f_star);
    conserved = lattice_energy_weights(rays, f_star.size());
  }
  block["f_star"] = f_star;
  const auto& final_state = traj.samples.back().state;
  double dev = 0.0;
  for (std::size_t i = 0; i < f_star.size(); ++i) dev = std::max(dev, std::abs(final_state[i] - f_star[i]));
  block["max_deviation"] = dev;

  std::optional<double> abscissa;
  try {
    abscissa = projected_spectral_abscissa(jacobian_at(f_star, s.triads), conserved);
  } catch (const DomainError&) {
  }
  try {
    rate_out = fit_decay_rate(traj.samples, f_star, abscissa);
  } catch (const InsufficientDataError& e) {
    rate_note = e.what();
    if (abscissa) rate_out = {{"jacobian_abscissa", *abscissa}};
  }
  return block;
}

}  // namespace

std::string mode_column_name(const LatticePoint& p) {
  return "p_(" + std::to_string(p.ix()) + "," + std::to_string(p.iy()) + "," + std::to_string(p.iz()) + ")";
}

std::string format_short(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_csv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CommandResult cmd_triads(const RunConfig& config) {
  config.validate();
  const fs::path dir = prepare_output_dir(config);
  const Lattice lattice = build_lattice(config.radius, config.dimension);
  const RayDecomposition rays = decompose_rays(lattice);
  const auto triads = config.mode == Mode::kExact
                          ? enumerate_exact_triads(lattice, rays, config.kernel)
                          : enumerate_near_triads(lattice, config.lambda_broadening, config.kernel);
  const Thresholds thresholds = compute_thresholds(lattice);

  json doc;
  doc["lattice"] = lattice_summary(config, lattice, rays);
  doc["rays"] = rays.rays;
  doc["mode"] = std::string(to_string(config.mode));
  doc["lambda_broadening"] = config.mode == Mode::kNear ? json(config.lambda_broadening) : json(nullptr);
  doc["triad_count"] = triads.size();
  doc["triads"] = triads;
  doc["thresholds"] = thresholds;

  CommandResult result;
  result.files.push_back(dir / "triads.json");
  write_json(result.files.back(), doc);
  result.message = std::to_string(triads.size()) + " triads on " + std::to_string(lattice.size()) +
                   " points -> " + result.files.back().string();
  return result;
}

CommandResult cmd_simulate(const RunConfig& config) {
  config.validate();
  const fs::path dir = prepare_output_dir(config);
  const Lattice lattice = build_lattice(config.radius, config.dimension);
  const RayDecomposition rays = decompose_rays(lattice);
  const System system = build_system(config, lattice, rays);
  const std::vector<double> f0 = make_initial_state(config, system.mode_names.size());
  const Trajectory traj = run_system(system, lattice, f0, config.integrator);

  json summary;
  summary["command"] = "simulate";
  summary["config"] = config.to_json();
  summary["system"] = {{"kind", system.single_ray ? "ray" : "lattice"},
                       {"mode_count", system.mode_names.size()},
                       {"triad_count", system.triads.size()}};
  summary["termination"] = std::string(to_string(traj.reason));
  summary["final_time"] = traj.samples.back().t;
  summary["sample_count"] = traj.samples.size();
  summary["accepted_steps"] = traj.accepted_steps;
  summary["rejected_steps"] = traj.rejected_steps;
  summary["positivity_rejections"] = traj.positivity_rejections;
  summary["error_estimate"] = traj.error_estimate;
  summary["initial_state"] = f0;
  summary["final_state"] = traj.samples.back().state;
  summary["final_max_norm"] = max_norm(traj.samples.back().state);
  summary["conservation"] = conservation_block(system, traj, lattice);

  json rate = nullptr, rate_note = nullptr;
  if (config.mode == Mode::kExact) {
    summary["equilibrium"] = equilibrium_block(system, rays, f0, traj, rate, rate_note);
    summary["divergence_certificate"] = nullptr;
    summary["regime"] = nullptr;
  } else {
    summary["equilibrium"] = nullptr;
    const auto cert = certify_divergence(traj);
    summary["divergence_certificate"] = cert ? json(*cert) : json(nullptr);
    summary["regime"] = classify_regime(config.lambda_broadening, compute_thresholds(lattice));
  }
  summary["rate_estimate"] = rate;
  summary["rate_estimate_note"] = rate_note;

  CommandResult result;
  result.files = {dir / "trajectory.csv", dir / "summary.json"};
  write_text(result.files[0], trajectory_csv(system, traj));
  write_json(result.files[1], summary);
  result.message = "termination " + std::string(to_string(traj.reason)) + " at t = " +
                   format_short(traj.samples.back().t) + " -> " + dir.string();
  if (traj.reason == Termination::kStalled) result.exit_code = kExitNumericalFailure;
  return result;
}

CommandResult cmd_network(const RunConfig& config) {
  config.validate();
  const fs::path dir = prepare_output_dir(config);
  const Lattice lattice = build_lattice(config.radius, config.dimension);
  const RayDecomposition rays = decompose_rays(lattice);
  std::vector<const Ray*> selected;
  if (config.ray) {
    selected.push_back(&find_ray(rays, *config.ray));
  } else {
    for (const auto& r : rays.rays) selected.push_back(&r);
  }

  // Sample states are log-uniform over the random initial-condition range.
  const double lo = config.initial.kind == InitialCondition::Kind::kRandom ? config.initial.lo : 0.1;
  const double hi = config.initial.kind == InitialCondition::Kind::kRandom ? config.initial.hi : 10.0;
  std::mt19937_64 rng(config.seed);
  auto draw = [&] {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
  };

  CommandResult result;
  json entries = json::array();
  double worst = 0.0;
  for (std::size_t idx = 0; idx < selected.size(); ++idx) {
    const Ray& ray = *selected[idx];
    const ReactionNetwork net = build_network(ray, config.kernel);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "network_ray_%03zu", idx);
    const fs::path txt = dir / (std::string(stem) + ".txt");
    const fs::path js = dir / (std::string(stem) + ".json");
    write_text(txt, export_network(net, ExportFormat::kText));
    write_text(js, export_network(net, ExportFormat::kJson));
    result.files.push_back(txt);
    result.files.push_back(js);

    double dev = 0.0;
    std::vector<double> x(static_cast<std::size_t>(ray.mode_count));
    for (int s = 0; s < config.network_samples; ++s) {
      for (auto& v : x) v = draw();
      const auto a = mass_action_rhs(net, x);
      const auto b = rhs_exact_ray(x, ray, config.kernel);
      // Relative to the term magnitudes: a single I = 2 flux can cancel to ~0.
      const double scale = max_norm(mass_action_scale(net, x));
      double diff = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
      if (diff > 0.0) dev = std::max(dev, scale > 0.0 ? diff / scale : INFINITY);
    }
    worst = std::max(worst, dev);
    entries.push_back({{"index", idx},
                       {"generator", ray.generator},
                       {"mode_count", ray.mode_count},
                       {"reaction_count", net.reactions.size()},
                       {"text_file", txt.filename().string()},
                       {"json_file", js.filename().string()},
                       {"max_relative_deviation", dev}});
  }

  constexpr double kTolerance = 1e-12;
  json report = {{"lattice", lattice_summary(config, lattice, rays)},
                 {"lambda_coupling", config.kernel.lambda_coupling},
                 {"samples_per_ray", config.network_samples},
                 {"tolerance", kTolerance},
                 {"max_relative_deviation", worst},
                 {"equivalent", worst <= kTolerance},
                 {"rays", entries}};
  result.files.push_back(dir / "network_report.json");
  write_json(result.files.back(), report);
  result.message = std::to_string(selected.size()) + " ray networks, max relative deviation " +
                   format_short(worst) + " -> " + dir.string();
  return result;
}

CommandResult cmd_classify(const RunConfig& config) {
  config.validate();
  const fs::path dir = prepare_output_dir(config);
  const Lattice lattice = build_lattice(config.radius, config.dimension);
  const RayDecomposition rays = decompose_rays(lattice);
  const RegimeReport report = classify_regime(config.lambda_broadening, compute_thresholds(lattice));

  json doc = report;
  doc["lattice"] = lattice_summary(config, lattice, rays);
  doc["confirmation"] = nullptr;
  CommandResult result;
  if (config.confirm) {
    // Same initial state and sample grid for the broadened and the exact system.
    RunConfig near_cfg = config;
    near_cfg.ray.reset();
    near_cfg.mode = Mode::kNear;
    RunConfig exact_cfg = near_cfg;
    exact_cfg.mode = Mode::kExact;
    const System near_sys = build_system(near_cfg, lattice, rays);
    const System exact_sys = build_system(exact_cfg, lattice, rays);
    const auto f0 = make_initial_state(config, lattice.size());
    const Trajectory near = run_system(near_sys, lattice, f0, config.integrator);
    const Trajectory exact = run_system(exact_sys, lattice, f0, config.integrator);

    double gap = 0.0;
    const std::size_t n = std::min(near.samples.size(), exact.samples.size());
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t i = 0; i < lattice.size(); ++i) {
        gap = std::max(gap, std::abs(near.samples[s].state[i] - exact.samples[s].state[i]));
      }
    }
    const auto cert = certify_divergence(near);
    doc["confirmation"] = {{"near_triad_count", near_sys.triads.size()},
                           {"exact_triad_count", exact_sys.triads.size()},
                           {"near_termination", std::string(to_string(near.reason))},
                           {"near_final_time", near.samples.back().t},
                           {"exact_termination", std::string(to_string(exact.reason))},
                           {"compared_samples", n},
                           {"max_near_exact_gap", gap},
                           {"divergence_certificate", cert ? json(*cert) : json(nullptr)}};
    if (near.reason == Termination::kStalled || exact.reason == Termination::kStalled) {
      result.exit_code = kExitNumericalFailure;
    }
  }
  result.files.push_back(dir / "regime.json");
  write_json(result.files.back(), doc);
  result.message = "lambda = " + format_short(config.lambda_broadening) + ": " +
                   std::string(to_string(report.classification)) + " -> " +
                   result.files.back().string();
  return result;
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  try {
    CommandResult r;
    if (name == "triads") {
      r = cmd_triads(config);
    } else if (name == "simulate") {
      r = cmd_simulate(config);
    } else if (name == "network") {
      r = cmd_network(config);
    } else if (name == "classify") {
      r = cmd_classify(config);
    } else {
      err << "error: unknown command '" << name << "'\n";
      return kExitConfigError;
    }
    out << r.message << "\n";
    if (r.exit_code == kExitNumericalFailure) err << "error: integrator stalled\n";
    return r.exit_code;
  } catch (const std::invalid_argument& e) {
    // ConfigError and ShapeError
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}

}  // namespace wavecrn::cli
