#include "bench/cli.hpp"

#include <utility>
#include <vector>

namespace bench {

namespace {

struct FlagKey {
  const char* flag;
  const char* key;
  std::string CliFlags::*field;
};

const std::vector<FlagKey>& flag_keys() {
  static const std::vector<FlagKey> v{
      {"--units", "units", &CliFlags::units},
      {"--node-size", "node_size", &CliFlags::node_size},
      {"--blades-per-chassis", "blades_per_chassis", &CliFlags::blades_per_chassis},
      {"--chassis-per-group", "chassis_per_group", &CliFlags::chassis_per_group},
      {"--grid", "grid", &CliFlags::grid},
      {"--iters", "iters", &CliFlags::iters},
      {"--mode", "mode", &CliFlags::mode},
      {"--reps", "reps", &CliFlags::reps},
      {"--seed", "seed", &CliFlags::seed},
      {"--csv", "csv", &CliFlags::csv},
      {"--dump-field", "dump_field", &CliFlags::dump_field},
  };
  return v;
}

}  // namespace

void add_options(CLI::App& app, CliFlags& flags) {
  app.add_option("--config", flags.config, "key = value file; flags override it");
  app.add_option("--units", flags.units, "number of units");
  app.add_option("--node-size", flags.node_size, "units per node");
  app.add_option("--blades-per-chassis", flags.blades_per_chassis, "nodes per chassis");
  app.add_option("--chassis-per-group", flags.chassis_per_group, "chassis per group");
  app.add_option("--grid", flags.grid, "global interior cells, NXxNYxNZ");
  app.add_option("--iters", flags.iters, "iterations per run");
  app.add_option("--mode", flags.mode, "locality_aware or oblivious");
  app.add_option("--reps", flags.reps, "repetitions");
  app.add_option("--seed", flags.seed, "seed of the random initial interior");
  app.add_option("--csv", flags.csv, "write result rows here (default stdout)");
  app.add_option("--dump-field", flags.dump_field, "write the final field of the first run here");
  app.add_flag("--weak", flags.weak_grid, "size the grid as 32^3 cells per unit");
}

Experiment resolve(const CLI::App& app, const CliFlags& flags) {
  Experiment e;
  if (!flags.config.empty()) e = parse_config(flags.config, e);
  for (const auto& fk : flag_keys()) {
    if (app.count(fk.flag) > 0) apply_setting(e, fk.key, flags.*fk.field);
  }
  if (flags.weak_grid) {
    if (app.count("--grid") > 0) throw ConfigError("--weak and --grid are mutually exclusive");
    set_weak_scaling_grid(e);
  }
  return e;
}

}  // namespace bench
