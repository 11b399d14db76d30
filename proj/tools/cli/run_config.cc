#include "cli/run_config.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>

#include "wavecrn/errors.h"
#include "wavecrn/serialization.h"

namespace wavecrn::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

Mode parse_mode(const std::string& s) {
  if (s == "exact") return Mode::kExact;
  if (s == "near") return Mode::kNear;
  throw ConfigError("mode must be 'exact' or 'near', got '" + s + "'");
}

Dimension parse_dimension(int d) {
  if (d == 1) return Dimension::kOne;
  if (d == 3) return Dimension::kThree;
  throw ConfigError("dimension must be 1 or 3");
}

InitialCondition parse_initial(const json& j) {
  InitialCondition ic;
  const auto type = j.at("type").get<std::string>();
  if (type == "constant") {
    reject_unknown(j, {"type", "value"}, "initial_condition");
    ic.kind = InitialCondition::Kind::kConstant;
    ic.value = j.value("value", 1.0);
  } else if (type == "list") {
    reject_unknown(j, {"type", "values"}, "initial_condition");
    ic.kind = InitialCondition::Kind::kList;
    ic.values = j.at("values").get<std::vector<double>>();
  } else if (type == "random") {
    reject_unknown(j, {"type", "lo", "hi"}, "initial_condition");
    ic.kind = InitialCondition::Kind::kRandom;
    ic.lo = j.value("lo", ic.lo);
    ic.hi = j.value("hi", ic.hi);
  } else {
    throw ConfigError("initial_condition.type must be constant, list or random");
  }
  return ic;
}

json initial_to_json(const InitialCondition& ic) {
  switch (ic.kind) {
    case InitialCondition::Kind::kConstant:
      return {{"type", "constant"}, {"value", ic.value}};
    case InitialCondition::Kind::kList:
      return {{"type", "list"}, {"values", ic.values}};
    case InitialCondition::Kind::kRandom:
      return {{"type", "random"}, {"lo", ic.lo}, {"hi", ic.hi}};
  }
  return {};
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::kExact ? "exact" : "near"; }

IntegratorConfig RunConfig::default_integrator() {
  IntegratorConfig c;
  c.t_end = 10.0;
  c.sample_interval = 0.1;
  c.max_step = 1.0;
  c.initial_step = 1e-4;
  return c;
}

void RunConfig::validate() const {
  if (!std::isfinite(radius) || radius <= 1.0) throw ConfigError("empty lattice");
  if (!(lambda_broadening >= 0.0) || !std::isfinite(lambda_broadening)) {
    throw ConfigError("lambda_broadening must be a nonnegative finite number");
  }
  kernel.validate();
  integrator.validate();
  if (ray) {
    if (ray->is_origin()) throw ConfigError("ray generator must be nonzero");
    if (mode != Mode::kExact) throw ConfigError("a single-ray run requires mode 'exact'");
  }
  switch (initial.kind) {
    case InitialCondition::Kind::kConstant:
      if (!(initial.value > 0.0) || !std::isfinite(initial.value)) {
        throw ConfigError("initial constant must be positive");
      }
      break;
    case InitialCondition::Kind::kList:
      for (double v : initial.values) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("initial values must be positive");
      }
      break;
    case InitialCondition::Kind::kRandom:
      if (!(initial.lo > 0.0) || !(initial.hi >= initial.lo) || !std::isfinite(initial.hi)) {
        throw ConfigError("random initial range must satisfy 0 < lo <= hi");
      }
      break;
  }
  if (network_samples < 1) throw ConfigError("network_samples must be >= 1");
}

json RunConfig::to_json() const {
  json j = {{"radius", radius},
            {"dimension", static_cast<int>(dimension)},
            {"lambda_broadening", lambda_broadening},
            {"lambda_coupling", kernel.lambda_coupling},
            {"mode", std::string(cli::to_string(mode))},
            {"ray", ray ? json(*ray) : json(nullptr)},
            {"initial_condition", initial_to_json(initial)},
            {"integrator", integrator},
            {"seed", seed},
            {"confirm", confirm},
            {"network_samples", network_samples}};
  return j;
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"radius", "dimension", "lambda_broadening", "lambda_coupling", "mode", "ray",
                  "initial_condition", "integrator", "output_dir", "seed", "confirm",
                  "network_samples"},
                 "config");
  RunConfig c;
  try {
    c.radius = doc.value("radius", c.radius);
    c.dimension = parse_dimension(doc.value("dimension", 3));
    c.lambda_broadening = doc.value("lambda_broadening", c.lambda_broadening);
    c.kernel.lambda_coupling = doc.value("lambda_coupling", c.kernel.lambda_coupling);
    c.mode = parse_mode(doc.value("mode", std::string("exact")));
    if (doc.contains("ray") && !doc.at("ray").is_null()) c.ray = doc.at("ray").get<LatticePoint>();
    if (doc.contains("initial_condition")) c.initial = parse_initial(doc.at("initial_condition"));
    if (doc.contains("integrator")) {
      reject_unknown(doc.at("integrator"),
                     {"rel_tol", "abs_tol", "t_end", "max_step", "initial_step", "sample_interval",
                      "divergence_ceiling"},
                     "integrator");
      c.integrator = doc.at("integrator").get<IntegratorConfig>();
    }
    if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
    c.seed = doc.value("seed", c.seed);
    c.confirm = doc.value("confirm", c.confirm);
    c.network_samples = doc.value("network_samples", c.network_samples);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config file " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.output_dir) config.output_dir = *o.output_dir;
  if (o.seed) config.seed = *o.seed;
  if (o.lambda_broadening) config.lambda_broadening = *o.lambda_broadening;
  if (o.radius) config.radius = *o.radius;
  if (o.mode) config.mode = *o.mode;
  if (o.dimension) config.dimension = parse_dimension(*o.dimension);
}

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

std::vector<double> make_initial_state(const RunConfig& config, std::size_t n) {
  const auto& ic = config.initial;
  switch (ic.kind) {
    case InitialCondition::Kind::kConstant:
      return std::vector<double>(n, ic.value);
    case InitialCondition::Kind::kList:
      if (ic.values.size() != n) {
        throw ConfigError("initial_condition.values has " + std::to_string(ic.values.size()) +
                          " entries, system has " + std::to_string(n) + " modes");
      }
      return ic.values;
    case InitialCondition::Kind::kRandom: {
      // Raw 53-bit draws keep the stream identical across standard libraries.
      std::mt19937_64 rng(config.seed);
      const double a = std::log(ic.lo), b = std::log(ic.hi);
      std::vector<double> f(n);
      for (auto& v : f) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = std::exp(a + u * (b - a));
      }
      return f;
    }
  }
  return {};
}

}  // namespace wavecrn::cli
