#include "dewet/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace dewet {

namespace {

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  is.imbue(std::locale::classic());
  double out = 0.0;
  is >> out;
  if (is.fail() || !is.eof()) throw ConfigError(key, "not a number: '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key, "not an integer: '" + v + "'");
  return out;
}

}  // namespace

void SimConfig::validate() const {
  require(finite_positive(gamma), "gamma", "must be positive");
  require(std::isfinite(gamma0) && gamma0 > 0.0 && gamma0 < gamma, "gamma0",
          "must satisfy γ > γ₀ > 0");
  require(finite_positive(nu0), "nu0", "must be positive");
  require(finite_positive(sigma0), "sigma0", "must be positive");
  require(std::isfinite(e0), "e0", "must be finite");
  require(finite_positive(mu), "mu", "must be positive");
  require(std::isfinite(lambda) && lambda + mu > 0.0, "lambda", "must satisfy lambda + mu > 0");
  require(finite_positive(area0), "area0", "must be positive");
  require(finite_positive(lip0), "lip0", "must be positive");
  require(finite_positive(tau), "tau", "must be positive");
  require(n_profile >= 8, "n_profile", "must be at least 8");
  require(finite_positive(mesh_target), "mesh_target", "must be positive");
  require(std::isfinite(corner_grading_ratio) && corner_grading_ratio > 0.0 &&
              corner_grading_ratio <= 1.0,
          "corner_grading_ratio", "must lie in (0, 1]");
  require(finite_positive(tol_opt), "tol_opt", "must be positive");
  require(finite_positive(tol_lin), "tol_lin", "must be positive");
  require(finite_positive(tol_mass), "tol_mass", "must be positive");
  require(max_steps >= 1, "max_steps", "must be at least 1");
}

double SimConfig::min_support() const { return std::sqrt(2.0 * area0 / lip0); }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "gamma", "gamma0", "nu0",        "sigma0",      "e0",
      "lambda", "mu",    "area0",      "lip0",        "tau",
      "n_profile", "mesh_target", "corner_grading_ratio", "tol_opt",
      "tol_lin", "tol_mass", "max_steps"};
  return keys;
}

SimConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    bool known = false;
    for (const auto& k : config_keys()) known = known || k == key;
    if (!known) throw ConfigError(key, "unknown key");
    if (!values.emplace(key, val).second) throw ConfigError(key, "duplicate key");
  }
  for (const auto& k : config_keys())
    if (!values.count(k)) throw ConfigError(k, "missing key");

  SimConfig c;
  auto d = [&](const char* k) { return to_double(k, values.at(k)); };
  c.gamma = d("gamma");
  c.gamma0 = d("gamma0");
  c.nu0 = d("nu0");
  c.sigma0 = d("sigma0");
  c.e0 = d("e0");
  c.lambda = d("lambda");
  c.mu = d("mu");
  c.area0 = d("area0");
  c.lip0 = d("lip0");
  c.tau = d("tau");
  c.n_profile = to_int("n_profile", values.at("n_profile"));
  c.mesh_target = d("mesh_target");
  c.corner_grading_ratio = d("corner_grading_ratio");
  c.tol_opt = d("tol_opt");
  c.tol_lin = d("tol_lin");
  c.tol_mass = d("tol_mass");
  c.max_steps = to_int("max_steps", values.at("max_steps"));
  c.validate();
  return c;
}

SimConfig parse_config_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  return parse_config(in);
}

std::string format_config(const SimConfig& c) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  os << "gamma = " << c.gamma << '\n'
     << "gamma0 = " << c.gamma0 << '\n'
     << "nu0 = " << c.nu0 << '\n'
     << "sigma0 = " << c.sigma0 << '\n'
     << "e0 = " << c.e0 << '\n'
     << "lambda = " << c.lambda << '\n'
     << "mu = " << c.mu << '\n'
     << "area0 = " << c.area0 << '\n'
     << "lip0 = " << c.lip0 << '\n'
     << "tau = " << c.tau << '\n'
     << "n_profile = " << c.n_profile << '\n'
     << "mesh_target = " << c.mesh_target << '\n'
     << "corner_grading_ratio = " << c.corner_grading_ratio << '\n'
     << "tol_opt = " << c.tol_opt << '\n'
     << "tol_lin = " << c.tol_lin << '\n'
     << "tol_mass = " << c.tol_mass << '\n'
     << "max_steps = " << c.max_steps << '\n';
  return os.str();
}

#ifndef DEWET_VERSION
#define DEWET_VERSION "unknown"
#endif

const char* version() { return DEWET_VERSION; }

}  // namespace dewet
