#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavecrn/lattice.h"

namespace wavecrn {

/// Formal nonnegative combination of species; keys are 0-based species indices.
struct Complex {
  std::map<int, int> stoichiometry;

  int total() const;
  friend bool operator==(const Complex&, const Complex&) = default;
};

struct Reaction {
  Complex reactant;
  Complex product;
  double rate_constant = 0.0;

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

struct ReactionNetwork {
  /// Species names; for a ray network "A_1" .. "A_I" in mode order.
  std::vector<std::string> species;
  std::vector<Reaction> reactions;

  /// Throws DomainError if any reaction violates the Complex/Reaction invariants.
  void validate() const;
  friend bool operator==(const ReactionNetwork&, const ReactionNetwork&) = default;
};

/// Mass-action network whose dynamics equal the exact-resonance ray system.
///
/// Per triad k2 + k3 = k1 (ray_triads order):
///   k2 != k3:  A_k2 + A_k3 -> A_k1,  A_k2 + A_k1 -> 2A_k2 + A_k3,
///              A_k3 + A_k1 -> 2A_k3 + A_k2,   all at rate 2V;
///   k2 == k3:  2A_k2 -> A_k1 at rate V,  A_k2 + A_k1 -> 3A_k2 at rate 2V.
ReactionNetwork build_network(const Ray& ray, const KernelParams& params = {});

/// sum_j rate_j X^alpha_j (beta_j - alpha_j), accumulated in reaction order.
std::vector<double> mass_action_rhs(const ReactionNetwork& network,
                                    std::span<const double> concentrations);

/// sum_j |rate_j X^alpha_j| (alpha_j + beta_j): the magnitude of the terms
/// summed by mass_action_rhs, used to scale rounding-level comparisons.
std::vector<double> mass_action_scale(const ReactionNetwork& network,
                                      std::span<const double> concentrations);

enum class ExportFormat { kText, kJson };

/// Parses "text" or "json"; anything else throws ConfigError.
ExportFormat parse_export_format(std::string_view token);

/// Text: one line per reaction, e.g. "2A_1 -> A_2 ; rate = 2".
/// JSON: {"species": [...], "reactions": [{"reactant": {...}, "product": {...}, "rate": r}]}.
std::string export_network(const ReactionNetwork& network, ExportFormat format);

/// Inverse of export_network. The text format does not list species, so the
/// species count is the largest index seen unless species_count is given.
ReactionNetwork import_network(std::string_view document, ExportFormat format,
                               std::size_t species_count = 0);

}  // namespace wavecrn
