#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heat3d/field.hpp"
#include "heat3d/grid.hpp"
#include "pgas/config.hpp"

namespace bench {

using ConfigError = heat3d::ConfigError;

struct Experiment {
  std::int64_t nx = 64, ny = 64, nz = 128;
  std::uint32_t units = 16;
  std::uint32_t node_size = 16;
  std::uint32_t blades_per_chassis = 16;
  std::uint32_t chassis_per_group = 1;
  pgas::RoutingMode mode = pgas::RoutingMode::LocalityAware;
  std::int64_t iterations = 5000;
  int repetitions = 25;
  std::uint64_t seed = 42;
  pgas::LatencyModel latency;

  // Physics; dt defaults to the stability limit.
  std::optional<double> dt;
  double dx = 1.0, dy = 1.0, dz = 1.0;
  double alpha0 = 1.0;
  double alpha_slope = 0.0;
  double boundary_temp = 0.0;
  double initial_temp = 1.0;
  std::int64_t check_interval = 100;
  std::optional<double> convergence_eps;

  // Outputs.
  std::string csv_path;
  std::string dump_field_path;

  heat3d::GridSpec grid() const;
  heat3d::SolverParams params() const;
  pgas::RuntimeConfig runtime() const;
  /// Throws ConfigError, including for a decomposition that does not fit.
  void validate() const;
};

std::string_view mode_name(pgas::RoutingMode m);
pgas::RoutingMode parse_mode(std::string_view s);

/// Every key accepted by the config file, in documentation order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value. Throws ConfigError for an unknown
/// key (listing the valid ones) or a malformed value.
void apply_setting(Experiment& e, std::string_view key, std::string_view value);

/// Line-oriented `key = value` text; `#` starts a comment.
Experiment parse_config_text(std::string_view text, Experiment base = {});
Experiment parse_config(const std::filesystem::path& path, Experiment base = {});

/// Weak scaling: a fixed per-unit block times the chosen process grid.
void set_weak_scaling_grid(Experiment& e, std::int64_t per_unit_edge = 32);

struct ResultRow {
  std::string run;  // repetition index, "mean" or "stddev"
  std::uint32_t units = 0, node_size = 0, blades_per_chassis = 0, chassis_per_group = 0;
  pgas::RoutingMode mode = pgas::RoutingMode::LocalityAware;
  std::int64_t nx = 0, ny = 0, nz = 0, iters = 0;
  double compute_s = 0.0;
  double exchange_s = 0.0;
  double sync_s = 0.0;
  double pure_exchange_s = 0.0;

  // Not part of the CSV.
  std::uint64_t envelopes = 0;
  std::uint64_t gets = 0;
  std::uint64_t barriers = 0;
};

struct ExperimentResult {
  /// One row per repetition, then the mean and the sample standard deviation.
  std::vector<ResultRow> rows;
  /// Final field of the first repetition, when a dump was requested.
  std::optional<heat3d::Field> field;

  const ResultRow& mean() const;
  std::vector<ResultRow> runs() const;
};

ExperimentResult run_experiment(const Experiment& e);

inline constexpr std::string_view kCsvHeader =
    "run,units,node_size,blades_per_chassis,chassis_per_group,mode,nx,ny,nz,iters,compute_s,exchange_s,sync_s,"
    "pure_exchange_s";

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

}  // namespace bench
