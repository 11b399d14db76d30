#pragma once

// JSON encodings of the library's result types. Field names are documented in
// docs/json_schema.md.

#include <nlohmann/json.hpp>

#include "wavecrn/analysis.h"
#include "wavecrn/integrator.h"
#include "wavecrn/lattice.h"

namespace wavecrn {

void to_json(nlohmann::json& j, const LatticePoint& p);
void from_json(const nlohmann::json& j, LatticePoint& p);
void to_json(nlohmann::json& j, const Triad& t);
void to_json(nlohmann::json& j, const Ray& r);
void to_json(nlohmann::json& j, const Thresholds& t);
void to_json(nlohmann::json& j, const EquilibriumResult& e);
void to_json(nlohmann::json& j, const RateEstimate& r);
void to_json(nlohmann::json& j, const RegimeReport& r);
void to_json(nlohmann::json& j, const DivergenceCertificate& c);
void to_json(nlohmann::json& j, const IntegratorConfig& c);
void from_json(const nlohmann::json& j, IntegratorConfig& c);

}  // namespace wavecrn
