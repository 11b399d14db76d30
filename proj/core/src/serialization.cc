#include "wavecrn/serialization.h"

#include <cmath>

namespace wavecrn {
namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void to_json(nlohmann::json& j, const LatticePoint& p) { j = {p.ix(), p.iy(), p.iz()}; }

void from_json(const nlohmann::json& j, LatticePoint& p) {
  if (!j.is_array() || j.size() != 3) throw nlohmann::json::type_error::create(302, "lattice point must be [ix, iy, iz]", &j);
  p = LatticePoint(j[0].get<int>(), j[1].get<int>(), j[2].get<int>());
}

void to_json(nlohmann::json& j, const Triad& t) {
  j = {{"p1", t.p1}, {"p2", t.p2}, {"p3", t.p3}, {"defect", t.defect}, {"kernel", t.kernel}};
}

void to_json(nlohmann::json& j, const Ray& r) {
  j = {{"generator", r.generator}, {"mode_count", r.mode_count}};
}

void to_json(nlohmann::json& j, const Thresholds& t) {
  j = {{"lambda_star", t.lambda_star ? nlohmann::json(*t.lambda_star) : nlohmann::json(nullptr)},
       {"lambda_star_upper", t.lambda_star_upper},
       {"two_lambda_star_upper", t.two_lambda_star_upper}};
}

void to_json(nlohmann::json& j, const EquilibriumResult& e) {
  j = {{"rho", e.rho}, {"f_star", e.f_star}};
}

void to_json(nlohmann::json& j, const RateEstimate& r) {
  j = {{"fitted_rate", r.fitted_rate},
       {"prefactor", r.prefactor},
       {"jacobian_abscissa", finite_or_null(r.jacobian_abscissa)},
       {"fit_window", {r.window_start, r.window_end}},
       {"fit_samples", r.window_samples},
       {"fit_residual", r.fit_residual}};
}

void to_json(nlohmann::json& j, const RegimeReport& r) {
  j = {{"lambda", r.lambda},
       {"thresholds", r.thresholds},
       {"classification", std::string(to_string(r.classification))},
       {"note", r.note}};
}

void to_json(nlohmann::json& j, const DivergenceCertificate& c) {
  j = {{"product_monotone", c.product_monotone},
       {"initial_max_norm", c.initial_max_norm},
       {"growth_factor", c.growth_factor},
       {"exit_time", c.exit_time},
       {"exit_max_norm", c.exit_max_norm},
       {"termination", std::string(to_string(c.reason))}};
}

void to_json(nlohmann::json& j, const IntegratorConfig& c) {
  j = {{"rel_tol", c.rel_tol},
       {"abs_tol", c.abs_tol},
       {"t_end", c.t_end},
       {"max_step", c.max_step},
       {"initial_step", c.initial_step},
       {"sample_interval", c.sample_interval},
       {"divergence_ceiling", c.divergence_ceiling}};
}

void from_json(const nlohmann::json& j, IntegratorConfig& c) {
  c.rel_tol = j.value("rel_tol", c.rel_tol);
  c.abs_tol = j.value("abs_tol", c.abs_tol);
  c.t_end = j.value("t_end", c.t_end);
  c.max_step = j.value("max_step", c.max_step);
  c.initial_step = j.value("initial_step", c.initial_step);
  c.sample_interval = j.value("sample_interval", c.sample_interval);
  c.divergence_ceiling = j.value("divergence_ceiling", c.divergence_ceiling);
}

}  // namespace wavecrn
