#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dewet/evolution.hpp"

namespace dewet::cli {

enum Exit { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

struct RunManifest {
  std::string config_text;  ///< re-parses with parse_config_text
  std::string version;
  double wall_seconds = 0.0;
  std::string stop_reason, stop_detail;
  int steps = 0;
  std::vector<FileRecord> inventory;
};

std::string to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
RunManifest load_manifest(const std::string& path);
/// Paths whose size or checksum no longer match.
std::vector<std::string> verify_inventory(const RunManifest& m, const std::string& dir);

struct RunArgs {
  std::string config_path, out_dir, initial;
  int steps = -1;
  bool quiet = false, fields = false;
};

struct RefineArgs {
  std::string config_path, out_dir, initial;
  std::vector<double> taus{4e-3, 2e-3, 1e-3};
  double final_time = 0.04;
  bool quiet = false;
};

/// Default initial state: quartic cap of half-width 1 centred at 0.
Profile default_initial(const SimConfig& cfg);

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_plot(const std::string& traj_dir, const std::string& out_svg, std::ostream& err);
int cmd_refine(const RefineArgs& args, std::ostream& out, std::ostream& err);

}  // namespace dewet::cli
