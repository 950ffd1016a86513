#pragma once

#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bench/experiment.hpp"

namespace bench {

/// Raw command-line values; only options actually given override the
/// config file.
struct CliFlags {
  std::string config;
  std::string units, node_size, blades_per_chassis, chassis_per_group;
  std::string grid, iters, mode, reps, seed, csv, dump_field;
  bool weak_grid = false;
};

void add_options(CLI::App& app, CliFlags& flags);

/// Defaults, then the config file, then the given flags.
Experiment resolve(const CLI::App& app, const CliFlags& flags);

}  // namespace bench
