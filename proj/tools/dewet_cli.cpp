#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace dewet::cli;
  CLI::App app{"Strained thin-film island dewetting by minimizing movements"};
  app.set_version_flag("--version", std::string(dewet::version()));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Evolve from an initial profile and write trajectory products");
  run_cmd->add_option("config", run.config_path, "key = value config file")->required();
  run_cmd->add_option("--out", run.out_dir, "output directory")->required();
  run_cmd->add_option("--steps", run.steps, "override max_steps");
  run_cmd->add_option("--initial", run.initial, "initial profile file (default: quartic cap)");
  run_cmd->add_flag("--fields", run.fields, "also write displacement fields");
  run_cmd->add_flag("--quiet", run.quiet, "no per-step output");

  std::string validate_config;
  bool validate_quiet = false;
  auto* val_cmd = app.add_subcommand("validate", "Run the property suite and print a pass/fail table");
  val_cmd->add_option("config", validate_config, "key = value config file")->required();
  val_cmd->add_flag("--quiet", validate_quiet, "print failures only");

  std::string plot_dir, plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "Render a trajectory directory to SVG");
  plot_cmd->add_option("dir", plot_dir, "directory written by run")->required();
  plot_cmd->add_option("--out", plot_out, "output .svg file")->required();

  RefineArgs refine;
  auto* ref_cmd = app.add_subcommand("refine", "Time-step refinement study");
  ref_cmd->add_option("config", refine.config_path, "key = value config file")->required();
  ref_cmd->add_option("--out", refine.out_dir, "directory for refine.csv");
  ref_cmd->add_option("--taus", refine.taus, "time steps, coarse to fine")->expected(2, 16)->delimiter(',');
  ref_cmd->add_option("--final-time", refine.final_time, "comparison time");
  ref_cmd->add_option("--initial", refine.initial, "initial profile file (default: quartic cap)");
  ref_cmd->add_flag("--quiet", refine.quiet, "no table on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  if (*run_cmd) return cmd_run(run, std::cout, std::cerr);
  if (*val_cmd) {
    if (!validate_quiet) return cmd_validate(validate_config, std::cout, std::cerr);
    std::ostringstream sink;
    const int rc = cmd_validate(validate_config, sink, std::cerr);
    if (rc != exit_ok) std::cout << sink.str();
    return rc;
  }
  if (*plot_cmd) return cmd_plot(plot_dir, plot_out, std::cerr);
  if (*ref_cmd) return cmd_refine(refine, std::cout, std::cerr);
  return exit_usage;
}
