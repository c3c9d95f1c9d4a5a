#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dewet {

class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

/// Physical and numerical parameters of one run. Immutable once validated.
struct SimConfig {
  double gamma = 1.0;   ///< film surface energy density
  double gamma0 = 0.5;  ///< substrate minus interface energy
  double nu0 = 0.01;    ///< curvature regularization
  double sigma0 = 1.0;  ///< contact-line friction
  double e0 = 0.05;     ///< substrate misfit strain
  double lambda = 1.0;  ///< Lame constants
  double mu = 1.0;
  double area0 = 1.0;   ///< conserved film area
  double lip0 = 5.0;    ///< Lipschitz bound on the profile
  double tau = 1e-3;    ///< time step
  int n_profile = 64;   ///< profile intervals
  double mesh_target = 0.1;
  double corner_grading_ratio = 0.7;
  double tol_opt = 1e-9;
  double tol_lin = 1e-10;
  double tol_mass = 1e-10;
  int max_steps = 100;

  /// Throws ConfigError naming the first offending key.
  void validate() const;

  /// Smallest admissible support length sqrt(2 area0 / lip0).
  double min_support() const;

  bool operator==(const SimConfig&) const = default;
};

/// Field names in file order.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines; `#` starts a comment. Every key must appear once.
SimConfig parse_config(std::istream& in);
SimConfig parse_config_text(const std::string& text);
SimConfig load_config(const std::string& path);

/// Lossless text form (17 significant digits).
std::string format_config(const SimConfig& cfg);

/// git-describe string of the build.
const char* version();

}  // namespace dewet
