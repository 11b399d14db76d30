#include "wavecrn/network.h"

#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "wavecrn/errors.h"

namespace wavecrn {
namespace {

std::string species_name(int index) { return "A_" + std::to_string(index + 1); }

std::string format_rate(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Complex single(int a) { return Complex{{{a, 1}}}; }

Complex pair(int a, int b) {
  Complex c;
  ++c.stoichiometry[a];
  ++c.stoichiometry[b];
  return c;
}

Complex with(Complex c, int species, int count) {
  c.stoichiometry[species] += count;
  return c;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(std::string_view s, std::string_view what) {
  int value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return value;
}

int parse_species(std::string_view name) {
  name = trim(name);
  if (name.size() < 3 || name.substr(0, 2) != "A_") {
    throw ConfigError("malformed species name '" + std::string(name) + "'");
  }
  const int index = parse_int(name.substr(2), "species index");
  if (index < 1) throw ConfigError("species index must be >= 1");
  return index - 1;
}

std::string format_complex(const Complex& c, const std::vector<std::string>& species) {
  std::string out;
  for (const auto& [idx, coeff] : c.stoichiometry) {
    if (coeff == 0) continue;
    if (!out.empty()) out += " + ";
    if (coeff > 1) out += std::to_string(coeff);
    out += species.at(static_cast<std::size_t>(idx));
  }
  return out;
}

Complex parse_complex(std::string_view text) {
  Complex c;
  while (true) {
    const auto plus = text.find(" + ");
    auto term = trim(text.substr(0, plus));
    std::size_t digits = 0;
    while (digits < term.size() && term[digits] >= '0' && term[digits] <= '9') ++digits;
    const int coeff = digits == 0 ? 1 : parse_int(term.substr(0, digits), "coefficient");
    c.stoichiometry[parse_species(term.substr(digits))] += coeff;
    if (plus == std::string_view::npos) break;
    text = text.substr(plus + 3);
  }
  return c;
}

}  // namespace

int Complex::total() const {
  int sum = 0;
  for (const auto& [idx, coeff] : stoichiometry) sum += coeff;
  return sum;
}

void ReactionNetwork::validate() const {
  const int n = static_cast<int>(species.size());
  for (const auto& r : reactions) {
    if (!(r.rate_constant > 0.0) || !std::isfinite(r.rate_constant)) {
      throw DomainError("reaction rate constant must be positive");
    }
    if (r.reactant == r.product) throw DomainError("reaction has identical sides");
    for (const Complex* c : {&r.reactant, &r.product}) {
      if (c->total() < 1) throw DomainError("reaction complex is empty");
      for (const auto& [idx, coeff] : c->stoichiometry) {
        if (idx < 0 || idx >= n) throw DomainError("reaction references unknown species");
        if (coeff < 0) throw DomainError("negative stoichiometric coefficient");
      }
    }
  }
}

ReactionNetwork build_network(const Ray& ray, const KernelParams& params) {
  params.validate();
  ReactionNetwork net;
  for (int k = 0; k < ray.mode_count; ++k) net.species.push_back(species_name(k));

  for (const auto& t : ray_triads(ray, params)) {
    const int big = static_cast<int>(t.i1);
    const int a = static_cast<int>(t.i2);
    const int b = static_cast<int>(t.i3);
    const double v = t.kernel;
    if (a != b) {
      net.reactions.push_back({pair(a, b), single(big), 2.0 * v});
      net.reactions.push_back({pair(a, big), with(pair(a, b), a, 1), 2.0 * v});
      net.reactions.push_back({pair(b, big), with(pair(a, b), b, 1), 2.0 * v});
    } else {
      net.reactions.push_back({Complex{{{a, 2}}}, single(big), v});
      net.reactions.push_back({pair(a, big), Complex{{{a, 3}}}, 2.0 * v});
    }
  }
  return net;
}

namespace {

void check_species(const ReactionNetwork& network, std::span<const double> concentrations) {
  if (concentrations.size() != network.species.size()) {
    throw ShapeError("concentration vector has " + std::to_string(concentrations.size()) +
                     " entries, network has " + std::to_string(network.species.size()) +
                     " species");
  }
}

double propensity(const Reaction& r, std::span<const double> x) {
  double flux = r.rate_constant;
  for (const auto& [idx, coeff] : r.reactant.stoichiometry) {
    for (int c = 0; c < coeff; ++c) flux *= x[static_cast<std::size_t>(idx)];
  }
  return flux;
}

}  // namespace

std::vector<double> mass_action_rhs(const ReactionNetwork& network,
                                    std::span<const double> concentrations) {
  check_species(network, concentrations);
  std::vector<double> out(concentrations.size(), 0.0);
  for (const auto& r : network.reactions) {
    const double flux = propensity(r, concentrations);
    for (const auto& [idx, coeff] : r.reactant.stoichiometry) {
      out[static_cast<std::size_t>(idx)] -= coeff * flux;
    }
    for (const auto& [idx, coeff] : r.product.stoichiometry) {
      out[static_cast<std::size_t>(idx)] += coeff * flux;
    }
  }
  return out;
}

std::vector<double> mass_action_scale(const ReactionNetwork& network,
                                      std::span<const double> concentrations) {
  check_species(network, concentrations);
  std::vector<double> out(concentrations.size(), 0.0);
  for (const auto& r : network.reactions) {
    const double flux = std::abs(propensity(r, concentrations));
    for (const auto& [idx, coeff] : r.reactant.stoichiometry) {
      out[static_cast<std::size_t>(idx)] += coeff * flux;
    }
    for (const auto& [idx, coeff] : r.product.stoichiometry) {
      out[static_cast<std::size_t>(idx)] += coeff * flux;
    }
  }
  return out;
}

ExportFormat parse_export_format(std::string_view token) {
  if (token == "text") return ExportFormat::kText;
  if (token == "json") return ExportFormat::kJson;
  throw ConfigError("unknown export format '" + std::string(token) + "'");
}

std::string export_network(const ReactionNetwork& network, ExportFormat format) {
  if (format == ExportFormat::kText) {
    std::string out;
    for (const auto& r : network.reactions) {
      out += format_complex(r.reactant, network.species) + " -> " +
             format_complex(r.product, network.species) +
             " ; rate = " + format_rate(r.rate_constant) + "\n";
    }
    return out;
  }

  const auto complex_json = [&](const Complex& c) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [idx, coeff] : c.stoichiometry) {
      j[network.species.at(static_cast<std::size_t>(idx))] = coeff;
    }
    return j;
  };
  nlohmann::ordered_json doc;
  doc["species"] = network.species;
  doc["reactions"] = nlohmann::ordered_json::array();
  for (const auto& r : network.reactions) {
    doc["reactions"].push_back({{"reactant", complex_json(r.reactant)},
                                {"product", complex_json(r.product)},
                                {"rate", r.rate_constant}});
  }
  return doc.dump(2) + "\n";
}

ReactionNetwork import_network(std::string_view document, ExportFormat format,
                               std::size_t species_count) {
  ReactionNetwork net;
  if (format == ExportFormat::kText) {
    int max_index = -1;
    std::istringstream in{std::string(document)};
    std::string line;
    while (std::getline(in, line)) {
      const std::string_view view = trim(line);
      if (view.empty()) continue;
      const auto arrow = view.find(" -> ");
      const auto semi = view.find(" ; rate = ");
      if (arrow == std::string_view::npos || semi == std::string_view::npos || semi < arrow) {
        throw ConfigError("malformed reaction line '" + std::string(view) + "'");
      }
      Reaction r;
      r.reactant = parse_complex(view.substr(0, arrow));
      r.product = parse_complex(view.substr(arrow + 4, semi - arrow - 4));
      const auto rate = view.substr(semi + 10);
      const auto res = std::from_chars(rate.data(), rate.data() + rate.size(), r.rate_constant);
      if (res.ec != std::errc{} || res.ptr != rate.data() + rate.size()) {
        throw ConfigError("malformed rate '" + std::string(rate) + "'");
      }
      for (const Complex* c : {&r.reactant, &r.product}) {
        for (const auto& [idx, coeff] : c->stoichiometry) max_index = std::max(max_index, idx);
      }
      net.reactions.push_back(std::move(r));
    }
    const std::size_t count =
        std::max(species_count, static_cast<std::size_t>(max_index + 1));
    for (std::size_t k = 0; k < count; ++k) net.species.push_back(species_name(static_cast<int>(k)));
  } else {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(document);
      net.species = doc.at("species").get<std::vector<std::string>>();
      std::map<std::string, int> index;
      for (std::size_t i = 0; i < net.species.size(); ++i) {
        index[net.species[i]] = static_cast<int>(i);
      }
      const auto read_complex = [&](const nlohmann::json& j) {
        Complex c;
        for (const auto& [name, coeff] : j.items()) {
          const auto it = index.find(name);
          if (it == index.end()) throw ConfigError("unknown species '" + name + "'");
          c.stoichiometry[it->second] = coeff.get<int>();
        }
        return c;
      };
      for (const auto& rj : doc.at("reactions")) {
        net.reactions.push_back({read_complex(rj.at("reactant")), read_complex(rj.at("product")),
                                 rj.at("rate").get<double>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed network JSON: ") + e.what());
    }
  }
  net.validate();
  return net;
}

}  // namespace wavecrn
