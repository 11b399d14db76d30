#include "wavecrn/network.h"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "test_util.h"
#include "wavecrn/errors.h"
#include "wavecrn/kinetics.h"

namespace wavecrn {
namespace {

using testing::make_ray;
using testing::random_state;

Complex cx(std::map<int, int> m) { return Complex{std::move(m)}; }

TEST(BuildNetwork, ThreeModeRay) {
  const auto net = build_network(make_ray(LatticePoint(1, 0, 0), 3));
  ASSERT_EQ(net.species, (std::vector<std::string>{"A_1", "A_2", "A_3"}));
  const std::vector<Reaction> expected{
      {cx({{0, 2}}), cx({{1, 1}}), 2.0},
      {cx({{0, 1}, {1, 1}}), cx({{0, 3}}), 4.0},
      {cx({{0, 1}, {1, 1}}), cx({{2, 1}}), 12.0},
      {cx({{0, 1}, {2, 1}}), cx({{0, 2}, {1, 1}}), 12.0},
      {cx({{1, 1}, {2, 1}}), cx({{0, 1}, {1, 2}}), 12.0},
  };
  EXPECT_EQ(net.reactions, expected);
}

TEST(BuildNetwork, SmallRays) {
  EXPECT_TRUE(build_network(make_ray(LatticePoint(1, 1, 0), 1)).reactions.empty());
  EXPECT_EQ(build_network(make_ray(LatticePoint(1, 1, 0), 1)).species.size(), 1u);
  EXPECT_EQ(build_network(make_ray(LatticePoint(1, 0, 0), 2)).reactions.size(), 2u);
}

TEST(BuildNetwork, StoichiometryOrthogonalToEnergy) {
  for (int modes = 1; modes <= 10; ++modes) {
    const auto net = build_network(make_ray(LatticePoint(1, 1, 1), modes));
    for (const auto& r : net.reactions) {
      int dot = 0;
      for (const auto& [i, c] : r.product.stoichiometry) dot += (i + 1) * c;
      for (const auto& [i, c] : r.reactant.stoichiometry) dot -= (i + 1) * c;
      EXPECT_EQ(dot, 0);
    }
  }
}

TEST(BuildNetwork, RateConstantAudit) {
  // Summing the reactions of each triad must reproduce the kinetic
  // coefficients: 2V on gain terms with k2 < k3, V when 2 k2 = k1, and a net
  // -2V on every loss pairing.
  for (int modes = 2; modes <= 8; ++modes) {
    const auto ray = make_ray(LatticePoint(1, 2, 0), modes);
    const auto net = build_network(ray);
    const auto triads = ray_triads(ray);
    std::size_t next = 0;
    for (const auto& t : triads) {
      const int k1 = static_cast<int>(t.i1), k2 = static_cast<int>(t.i2),
                k3 = static_cast<int>(t.i3);
      if (k2 != k3) {
        ASSERT_LE(next + 3, net.reactions.size());
        const auto& gain = net.reactions[next];
        EXPECT_EQ(gain.reactant, cx({{k2, 1}, {k3, 1}}));
        EXPECT_EQ(gain.product, cx({{k1, 1}}));
        EXPECT_DOUBLE_EQ(gain.rate_constant, 2.0 * t.kernel);
        EXPECT_DOUBLE_EQ(net.reactions[next + 1].rate_constant, 2.0 * t.kernel);
        EXPECT_DOUBLE_EQ(net.reactions[next + 2].rate_constant, 2.0 * t.kernel);
        next += 3;
      } else {
        ASSERT_LE(next + 2, net.reactions.size());
        EXPECT_EQ(net.reactions[next].reactant, cx({{k2, 2}}));
        EXPECT_DOUBLE_EQ(net.reactions[next].rate_constant, t.kernel);
        EXPECT_EQ(net.reactions[next + 1].product, cx({{k2, 3}}));
        EXPECT_DOUBLE_EQ(net.reactions[next + 1].rate_constant, 2.0 * t.kernel);
        next += 2;
      }
    }
    EXPECT_EQ(next, net.reactions.size());
  }
}

TEST(MassAction, Examples) {
  const auto net = build_network(make_ray(LatticePoint(1, 0, 0), 3));
  EXPECT_EQ(mass_action_rhs(net, std::vector<double>{1.0, 1.0, 1.0}),
            (std::vector<double>{16.0, 10.0, -12.0}));
  for (double v : mass_action_rhs(net, std::vector<double>{2.0, 1.0, 2.0 / 3.0}))
    EXPECT_LE(std::abs(v), 1e-12);

  ReactionNetwork empty;
  empty.species = {"A_1", "A_2"};
  EXPECT_EQ(mass_action_rhs(empty, std::vector<double>{1.0, 2.0}), (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(mass_action_rhs(net, std::vector<double>{1.0}), ShapeError);
}

TEST(MassAction, EqualsKineticRhs) {
  std::mt19937_64 rng(29);
  for (const LatticePoint g : {LatticePoint(1, 0, 0), LatticePoint(1, 1, 0), LatticePoint(1, 1, 1)}) {
    for (int modes = 1; modes <= 10; ++modes) {
      const auto ray = make_ray(g, modes);
      const auto net = build_network(ray, KernelParams{0.8});
      for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_state(rng, static_cast<std::size_t>(modes));
        const auto a = mass_action_rhs(net, f);
        const auto b = rhs_exact_ray(f, ray, KernelParams{0.8});
        for (std::size_t i = 0; i < a.size(); ++i) {
          EXPECT_LE(std::abs(a[i] - b[i]), 1e-12 * std::max(1.0, std::abs(b[i])));
        }
      }
    }
  }
}

TEST(Export, TextFormat) {
  const auto two = build_network(make_ray(LatticePoint(1, 0, 0), 2));
  const auto text = export_network(two, ExportFormat::kText);
  EXPECT_EQ(text, "2A_1 -> A_2 ; rate = 2\nA_1 + A_2 -> 3A_1 ; rate = 4\n");

  const auto three = build_network(make_ray(LatticePoint(1, 0, 0), 3));
  const auto lines = export_network(three, ExportFormat::kText);
  EXPECT_NE(lines.find("A_2 + A_3 -> A_1 + 2A_2 ; rate = 12\n"), std::string::npos);
}

TEST(Export, JsonFormat) {
  const auto net = build_network(make_ray(LatticePoint(1, 0, 0), 3));
  const auto doc = nlohmann::json::parse(export_network(net, ExportFormat::kJson));
  EXPECT_EQ(doc.at("species").size(), 3u);
  ASSERT_EQ(doc.at("reactions").size(), 5u);
  EXPECT_EQ(doc["reactions"][0]["reactant"]["A_1"], 2);
  EXPECT_EQ(doc["reactions"][0]["product"]["A_2"], 1);
  EXPECT_EQ(doc["reactions"][0]["rate"], 2.0);
}

TEST(Export, RoundTripIsByteIdentical) {
  for (const LatticePoint g : {LatticePoint(1, 0, 0), LatticePoint(1, 1, 0), LatticePoint(1, 1, 1)}) {
    for (int modes = 1; modes <= 7; ++modes) {
      const auto net = build_network(make_ray(g, modes), KernelParams{1.3});
      for (auto format : {ExportFormat::kText, ExportFormat::kJson}) {
        const auto first = export_network(net, format);
        const auto back = import_network(first, format, net.species.size());
        EXPECT_EQ(back, net);
        EXPECT_EQ(export_network(back, format), first);
      }
    }
  }
}

TEST(Export, UnknownFormatAndMalformedInput) {
  EXPECT_EQ(parse_export_format("text"), ExportFormat::kText);
  EXPECT_EQ(parse_export_format("json"), ExportFormat::kJson);
  EXPECT_THROW(parse_export_format("sbml"), ConfigError);
  EXPECT_THROW(import_network("A_1 + A_2 => A_3", ExportFormat::kText), ConfigError);
  EXPECT_THROW(import_network("{\"species\": 3}", ExportFormat::kJson), ConfigError);
  EXPECT_THROW(import_network("A_1 -> A_1 ; rate = 1", ExportFormat::kText), DomainError);
}

TEST(MassActionScale, BoundsRhsAndSumsTerms) {
  const auto net = build_network(make_ray(LatticePoint(1, 0, 0), 2));
  // V = 2: 2A_1 -> A_2 at rate 2 and A_1 + A_2 -> 3A_1 at rate 4. Both
  // propensities are 8 at (2, 1), which is the equilibrium ratio f1 = 2 f2.
  const std::vector<double> x{2.0, 1.0};
  const auto rhs = mass_action_rhs(net, x);
  const auto scale = mass_action_scale(net, x);
  EXPECT_EQ(rhs[0], 0.0);
  EXPECT_EQ(rhs[1], 0.0);
  EXPECT_EQ(scale[0], 2 * 8.0 + 8.0 + 3 * 8.0);
  EXPECT_EQ(scale[1], 8.0 + 8.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LE(std::abs(rhs[i]), scale[i]);
}

}  // namespace
}  // namespace wavecrn
