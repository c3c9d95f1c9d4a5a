#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "dewet/checks.hpp"
#include "json.hpp"
#include "svg.hpp"

namespace dewet::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_json(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["config"] = m.config_text;
  j["wall_seconds"] = m.wall_seconds;
  j["stop_reason"] = m.stop_reason;
  j["stop_detail"] = m.stop_detail;
  j["steps"] = m.steps;
  json inv = json::array();
  for (const auto& f : m.inventory) inv.push_back({{"path", f.path}, {"bytes", f.bytes}, {"crc32", f.crc32}});
  j["inventory"] = inv;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  m.version = j.at("version").get<std::string>();
  m.config_text = j.at("config").get<std::string>();
  m.wall_seconds = j.at("wall_seconds").get<double>();
  m.stop_reason = j.at("stop_reason").get<std::string>();
  m.stop_detail = j.at("stop_detail").get<std::string>();
  m.steps = j.at("steps").get<int>();
  for (const auto& f : j.at("inventory"))
    m.inventory.push_back({f.at("path").get<std::string>(), f.at("bytes").get<std::uint64_t>(),
                           f.at("crc32").get<std::uint32_t>()});
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

std::vector<std::string> verify_inventory(const RunManifest& m, const std::string& dir) {
  std::vector<std::string> bad;
  for (const auto& f : m.inventory) {
    const fs::path p = fs::path(dir) / f.path;
    std::error_code ec;
    if (!fs::exists(p, ec) || fs::file_size(p, ec) != f.bytes || file_crc32(p.string()) != f.crc32)
      bad.push_back(f.path);
  }
  return bad;
}

Profile default_initial(const SimConfig& cfg) { return shapes::quartic_cap(1.0, cfg.area0, cfg.n_profile); }

namespace {

bool load(const std::string& path, SimConfig& cfg, std::ostream& err) {
  try {
    cfg = load_config(path);
    return true;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return false;
  }
}

Profile initial_state(const std::string& path, const SimConfig& cfg) {
  if (path.empty()) return default_initial(cfg);
  Profile p = load_profile(path);
  if (p.intervals() != cfg.n_profile)
    throw std::invalid_argument(path + ": profile has " + std::to_string(p.intervals()) +
                                " intervals, config n_profile = " + std::to_string(cfg.n_profile));
  return p;
}

void print_row(std::ostream& out, const LedgerRow& r) {
  out << std::setprecision(6) << "step " << std::setw(5) << r.step << "  t=" << r.t << "  alpha=" << r.alpha
      << "  beta=" << r.beta << "  S+E=" << std::setprecision(10) << r.S + r.E << std::setprecision(3)
      << "  mass_err=" << r.mass_err << '\n';
}

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  if (!load(args.config_path, cfg, err)) return exit_usage;
  if (args.steps > 0) cfg.max_steps = args.steps;
  const auto t0 = std::chrono::steady_clock::now();
  Trajectory traj;
  try {
    const Profile p0 = initial_state(args.initial, cfg);
    RunOptions opts;
    if (!args.quiet) opts.on_step = [&](const LedgerRow& r) { print_row(out, r); };
    traj = run(cfg, p0, opts);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
  RunManifest m;
  m.config_text = format_config(cfg);
  m.version = version();
  m.stop_reason = to_string(traj.stop);
  m.stop_detail = traj.stop_detail;
  m.steps = static_cast<int>(traj.steps.size());
  try {
    PersistOptions po;
    po.write_fields = args.fields;
    m.inventory = write_trajectory(traj, args.out_dir, po);
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream os(fs::path(args.out_dir) / "manifest.json");
    os << to_json(m);
    if (!os) throw std::runtime_error("cannot write manifest.json");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
  if (!args.quiet) out << "stop: " << m.stop_reason << (m.stop_detail.empty() ? "" : " (" + m.stop_detail + ")") << '\n';
  const bool error_stop = traj.stop == StopReason::optimizer_failure || traj.stop == StopReason::elastic_solve_failure;
  if (error_stop) err << "run stopped: " << m.stop_reason << ": " << m.stop_detail << '\n';
  return error_stop ? exit_failure : exit_ok;
}

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  if (!load(config_path, cfg, err)) return exit_usage;
  try {
    const auto results = run_property_suite(cfg);
    out << format_suite(results);
    const bool ok = suite_ok(results);
    out << (ok ? "all suites passed" : "suite failures") << '\n';
    return ok ? exit_ok : exit_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

int cmd_plot(const std::string& traj_dir, const std::string& out_svg, std::ostream& err) {
  try {
    const fs::path root(traj_dir);
    const fs::path ledger = root / "ledger.csv";
    if (!fs::exists(ledger)) throw std::runtime_error("no ledger.csv in " + traj_dir);
    const auto rows = read_ledger(ledger.string());
    if (rows.empty()) throw std::runtime_error(ledger.string() + ": no rows");
    std::vector<fs::path> files;
    if (fs::is_directory(root / "profiles"))
      for (const auto& e : fs::directory_iterator(root / "profiles"))
        if (e.path().extension() == ".txt") files.push_back(e.path());
    if (files.empty()) throw std::runtime_error("no profiles in " + traj_dir);
    std::sort(files.begin(), files.end());

    svg::Panel shapes_p{"profile snapshots", "x", "h", false, {}};
    const int shown = std::min<int>(12, static_cast<int>(files.size()));
    for (int k = 0; k < shown; ++k) {
      const std::size_t i = shown > 1 ? k * (files.size() - 1) / (shown - 1) : 0;
      const Profile p = load_profile(files[i].string());
      svg::Series s{{}, {}, svg::ramp(k, shown), "", 1.0};
      s.x.push_back(p.alpha());
      s.y.push_back(0.0);
      const int fine = 4 * p.intervals();
      for (int j = 0; j <= fine; ++j) {
        const double x = p.alpha() + p.length() * j / fine;
        s.x.push_back(x);
        s.y.push_back(extend_by_zero(p, x));
      }
      shapes_p.series.push_back(std::move(s));
    }
    auto column = [&](auto get) {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(get(r));
      return v;
    };
    const auto t = column([](const LedgerRow& r) { return r.t; });
    svg::Panel energy{"energy ledger", "t", "energy", false, {}};
    energy.series.push_back({t, column([](const LedgerRow& r) { return r.S + r.E; }), "#000", "S+E", 1.6});
    energy.series.push_back({t, column([](const LedgerRow& r) { return r.S; }), "#1f77b4", "S", 1.0});
    svg::Panel elastic{"elastic energy", "t", "E", false, {}};
    elastic.series.push_back({t, column([](const LedgerRow& r) { return r.E; }), "#d62728", "E", 1.2});
    svg::Panel contacts{"contact points", "t", "x", false, {}};
    contacts.series.push_back({t, column([](const LedgerRow& r) { return r.alpha; }), "#1f77b4", "alpha", 1.4});
    contacts.series.push_back({t, column([](const LedgerRow& r) { return r.beta; }), "#d62728", "beta", 1.4});
    svg::Panel resid{"residual histories", "t", "residual", true, {}};
    resid.series.push_back({t, column([](const LedgerRow& r) { return r.el_residual; }), "#2ca02c", "EL weak", 1.2});
    resid.series.push_back({t, column([](const LedgerRow& r) { return r.contact_res_a; }), "#1f77b4", "contact a", 1.2});
    resid.series.push_back({t, column([](const LedgerRow& r) { return r.contact_res_b; }), "#ff7f0e", "contact b", 1.2});
    resid.series.push_back({t, column([](const LedgerRow& r) { return r.mass_err; }), "#7f7f7f", "mass err", 1.0});
    svg::Panel mult{"area multiplier", "t", "m", false, {}};
    mult.series.push_back({t, column([](const LedgerRow& r) { return r.m; }), "#9467bd", "m", 1.2});

    std::ofstream os(out_svg);
    if (!os) throw std::runtime_error("cannot write " + out_svg);
    os << svg::render({shapes_p, energy, contacts, resid, elastic, mult});
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

int cmd_refine(const RefineArgs& args, std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  if (!load(args.config_path, cfg, err)) return exit_usage;
  try {
    const Profile p0 = initial_state(args.initial, cfg);
    const ConvergenceReport rep = refinement_study(cfg, p0, args.taus, args.final_time);
    std::ostringstream table;
    table << "tau_coarse,tau_fine,stop_coarse,stop_fine,l2_diff,contact_diff,order,contact_order\n"
          << std::setprecision(10);
    for (std::size_t k = 0; k < rep.l2_differences.size(); ++k) {
      table << rep.taus[k] << ',' << rep.taus[k + 1] << ',' << to_string(rep.stops[k]) << ','
            << to_string(rep.stops[k + 1]) << ',' << rep.l2_differences[k] << ',' << rep.contact_differences[k];
      if (k > 0) table << ',' << rep.orders[k - 1] << ',' << rep.contact_orders[k - 1];
      else table << ",,";
      table << '\n';
    }
    if (!args.quiet) out << table.str();
    if (!args.out_dir.empty()) {
      fs::create_directories(args.out_dir);
      std::ofstream os(fs::path(args.out_dir) / "refine.csv");
      os << table.str();
      if (!os) throw std::runtime_error("cannot write refine.csv");
    }
    return exit_ok;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

}  // namespace dewet::cli
