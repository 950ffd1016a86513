// heatbench: runs the 3D heat stencil on the simulated runtime and prints
// the timing breakdown as CSV.

#include <iostream>

#include "bench/cli.hpp"
#include "bench/experiment.hpp"
#include "heat3d/field.hpp"

int main(int argc, char** argv) {
  CLI::App app{"3D heat stencil halo-exchange benchmark"};
  bench::CliFlags flags;
  bench::add_options(app, flags);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto e = bench::resolve(app, flags);
    const auto result = bench::run_experiment(e);
    if (e.csv_path.empty()) {
      bench::emit_csv(result.rows, std::cout);
    } else {
      bench::emit_csv(result.rows, e.csv_path);
    }
    if (result.field) heat3d::write_field(e.dump_field_path, *result.field);
  } catch (const std::exception& err) {
    std::cerr << "heatbench: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
