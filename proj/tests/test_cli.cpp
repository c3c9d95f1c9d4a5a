#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "svg.hpp"

using namespace dewet;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dewet_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const SimConfig& c) {
  const fs::path p = dir / "sim.cfg";
  std::ofstream(p) << format_config(c);
  return p.string();
}

SimConfig tiny() {
  SimConfig c;
  c.n_profile = 16;
  c.max_steps = 3;
  c.mesh_target = 0.2;
  return c;
}

}  // namespace

TEST_CASE("run writes a trajectory with a verifiable manifest") {
  const fs::path dir = scratch_dir("run");
  cli::RunArgs a;
  a.config_path = write_config(dir, tiny());
  a.out_dir = (dir / "out").string();
  a.quiet = true;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(a, out, err) == cli::exit_ok);
  const cli::RunManifest m = cli::load_manifest((dir / "out" / "manifest.json").string());
  CHECK(m.steps == 3);
  CHECK(m.stop_reason == "completed");
  CHECK(parse_config_text(m.config_text) == tiny());
  bool ledger = false;
  for (const auto& f : m.inventory) ledger = ledger || f.path == "ledger.csv";
  CHECK(ledger);
  CHECK(cli::verify_inventory(m, a.out_dir).empty());

  const cli::RunManifest back = cli::manifest_from_json(cli::to_json(m));
  CHECK(back.inventory.size() == m.inventory.size());
  CHECK(back.version == m.version);

  std::ostringstream pe;
  const fs::path svg = dir / "plot.svg";
  REQUIRE(cli::cmd_plot(a.out_dir, svg.string(), pe) == cli::exit_ok);
  std::ifstream in(svg);
  std::string head;
  std::getline(in, head);
  CHECK(head.find("<svg") != std::string::npos);

  std::ofstream(dir / "out" / "ledger.csv", std::ios::app) << "tampered\n";
  CHECK(cli::verify_inventory(m, a.out_dir) == std::vector<std::string>{"ledger.csv"});
  fs::remove_all(dir);
}

TEST_CASE("config errors exit with the usage code and name the problem") {
  const fs::path dir = scratch_dir("bad");
  cli::RunArgs a;
  a.out_dir = (dir / "out").string();
  {
    std::ofstream(dir / "g.cfg") << format_config(SimConfig{});
    std::ifstream in(dir / "g.cfg");
    std::ostringstream os;
    std::string l;
    while (std::getline(in, l)) os << (l.rfind("gamma0 =", 0) == 0 ? "gamma0 = 1.2" : l) << '\n';
    std::ofstream(dir / "g.cfg") << os.str();
  }
  a.config_path = (dir / "g.cfg").string();
  std::ostringstream out, err;
  CHECK(cli::cmd_run(a, out, err) == cli::exit_usage);
  CHECK(err.str().find("γ > γ₀") != std::string::npos);

  std::ofstream(dir / "t.cfg") << "tau = 0\n";
  a.config_path = (dir / "t.cfg").string();
  std::ostringstream e2;
  CHECK(cli::cmd_run(a, out, e2) == cli::exit_usage);
  CHECK_FALSE(e2.str().empty());

  a.config_path = (dir / "missing.cfg").string();
  std::ostringstream e3;
  CHECK(cli::cmd_run(a, out, e3) != cli::exit_ok);
  std::ostringstream e4;
  CHECK(cli::cmd_validate(a.config_path, out, e4) != cli::exit_ok);
  fs::remove_all(dir);
}

TEST_CASE("plot refuses a directory without a trajectory") {
  const fs::path dir = scratch_dir("empty");
  std::ostringstream err;
  CHECK(cli::cmd_plot(dir.string(), (dir / "x.svg").string(), err) == cli::exit_failure);
  CHECK_FALSE(err.str().empty());
  fs::remove_all(dir);
}

TEST_CASE("validate prints one row per suite and passes at default settings") {
  const fs::path dir = scratch_dir("validate");
  SimConfig c;
  c.n_profile = 16;
  std::ostringstream out, err;
  CHECK(cli::cmd_validate(write_config(dir, c), out, err) == cli::exit_ok);
  const std::string s = out.str();
  CHECK(s.find("INFO  refinement_orders") != std::string::npos);
  CHECK(s.find("all suites passed") != std::string::npos);
  for (const char* name : {"gradient", "ledger", "symmetry", "translation", "elastic_zero", "elastic_bound",
                           "el_manufactured", "young_limit", "circular_cap"})
    CHECK(s.find(std::string("PASS  ") + name) != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("svg renderer emits one polyline per series") {
  svg::Panel p;
  p.title = "t";
  p.series.push_back({{0, 1, 2}, {1, 2, 3}, "#000", "a", 1.0});
  p.series.push_back({{0, 1}, {3, 1}, "#f00", "b", 1.0});
  const std::string s = svg::render({p});
  std::size_t count = 0;
  for (std::size_t k = s.find("<polyline"); k != std::string::npos; k = s.find("<polyline", k + 1)) ++count;
  CHECK(count == 2);
  CHECK(s.rfind("</svg>") != std::string::npos);
}
