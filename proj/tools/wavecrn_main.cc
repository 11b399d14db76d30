#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.h"
#include "cli/run_config.h"
#include "wavecrn/errors.h"

namespace {

struct Flags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> radius;
  std::string mode;
  std::optional<int> dim;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out_dir, "output directory (default $WAVECRN_OUT_DIR or .)");
  cmd->add_option("--seed", f.seed, "seed for random initial conditions and samples");
  cmd->add_option("--lambda", f.lambda, "broadening width Lambda")->check(CLI::NonNegativeNumber);
  cmd->add_option("--radius", f.radius, "lattice radius R");
  cmd->add_option("--mode", f.mode, "resonance mode")->check(CLI::IsMember({"exact", "near"}));
  cmd->add_option("--dim", f.dim, "lattice dimension")->check(CLI::IsMember({1, 3}));
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wavecrn::cli;

  CLI::App app{"Discrete 3-wave kinetic equation and its reaction network"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& [name, help] :
       {std::pair{"triads", "enumerate rays, resonant triads and thresholds"},
        std::pair{"simulate", "integrate the kinetic equation and write trajectory.csv + summary.json"},
        std::pair{"network", "export per-ray reaction networks and check equivalence"},
        std::pair{"classify", "classify a broadening width against the lattice thresholds"}}) {
    add_common_flags(app.add_subcommand(name, help), flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  RunConfig config;
  try {
    if (!flags.config_path.empty()) config = load_config(flags.config_path);
    Overrides o;
    if (!flags.out_dir.empty()) o.output_dir = flags.out_dir;
    o.seed = flags.seed;
    o.lambda_broadening = flags.lambda;
    o.radius = flags.radius;
    if (!flags.mode.empty()) o.mode = flags.mode == "exact" ? Mode::kExact : Mode::kNear;
    o.dimension = flags.dim;
    apply_overrides(config, o);
  } catch (const wavecrn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  return run_command(app.get_subcommands().front()->get_name(), config, std::cout, std::cerr);
}
