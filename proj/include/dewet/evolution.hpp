#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dewet/config.hpp"
#include "dewet/increment.hpp"
#include "dewet/profile.hpp"

namespace dewet {

enum class StopReason {
  completed,
  stationary,
  lipschitz_saturation,
  pinch_off,
  optimizer_failure,
  degenerate_contact,
  elastic_solve_failure
};
const char* to_string(StopReason r);

struct LedgerRow {
  int step = 0;
  double t = 0, alpha = 0, beta = 0, S = 0, E = 0, T = 0, total = 0, m = 0, mass_err = 0, lip_margin = 0,
         el_residual = 0, contact_res_a = 0, contact_res_b = 0, endpoint_h2 = 0, b_tau = 1;
};

/// Column names in file order.
const std::vector<std::string>& ledger_columns();
std::vector<double> ledger_values(const LedgerRow& r);

struct Trajectory {
  SimConfig config;
  Profile initial;
  DisplacementField initial_field;
  std::vector<StepResult> steps;
  std::vector<LedgerRow> ledger;  ///< row 0 is the initial state
  StopReason stop = StopReason::completed;
  std::string stop_detail;

  int states() const { return static_cast<int>(steps.size()) + 1; }
  const Profile& state(int i) const { return i == 0 ? initial : steps[i - 1].profile; }
  double time(int i) const { return i * config.tau; }
  double final_time() const { return time(states() - 1); }
};

struct RunOptions {
  int max_steps = -1;              ///< overrides cfg.max_steps when positive
  bool compute_residuals = true;
  double stop_velocity = 0.0;      ///< stop once nodal and contact speeds fall below this
  std::function<void(const LedgerRow&)> on_step;
};

/// Throws std::invalid_argument if the initial state is not admissible.
Trajectory run(const SimConfig& cfg, const Profile& initial, const RunOptions& opts = {});

/// Relaxes with repeated large steps until speeds drop below `tol`.
Profile find_equilibrium(const SimConfig& cfg, const Profile& initial, double tau_relax, int max_steps, double tol);

struct LedgerCheck {
  int monotone_violations = 0;     ///< S+E increases
  int dissipation_violations = 0;  ///< prefix inequality failures
  int mass_violations = 0;
  int floor_violations = 0;        ///< beta - alpha below the support floor
  double max_mass_error = 0.0;
  double min_floor_margin = 0.0;
  bool ok() const { return !monotone_violations && !dissipation_violations && !mass_violations && !floor_violations; }
};
LedgerCheck check_ledger(const Trajectory& traj);

/// Linear and constant-in-time interpolants of a trajectory.
class Interpolants {
public:
  explicit Interpolants(const Trajectory& traj);

  double alpha_linear(double t) const;
  double beta_linear(double t) const;
  double h_linear(double t, double x) const;
  double alpha_constant(double t) const;
  double beta_constant(double t) const;
  double h_constant(double t, double x) const;

  /// || h_k(t1) - h_k(t2) ||_{L2(R)} for the linear interpolant.
  double l2_distance(double t1, double t2) const;
  /// || h_k(t) - other.h_k(t) ||_{L2(R)}.
  double l2_distance_to(const Interpolants& other, double t) const;

  /// max((1/tau) sum (d alpha)^2, (1/tau) sum (d beta)^2).
  double contact_constant() const;
  /// sum (1/tau) ||h^j - h^{j-1}||^2.
  double profile_constant() const;

private:
  struct Knot {
    int lo, hi;
    double theta;
  };
  Knot bracket(double t) const;
  int right_index(double t) const;
  const Trajectory& traj_;
};

/// Sum of weighted extended profiles in L2(R).
double l2_norm_of_combination(const std::vector<std::pair<double, const Profile*>>& terms);

struct ConvergenceReport {
  std::vector<double> taus;
  double final_time = 0.0;
  std::vector<double> l2_differences;       ///< ||h_tau(T) - h_{tau/2}(T)||
  std::vector<double> contact_differences;  ///< max over matched knots of |alpha| and |beta| differences
  std::vector<double> orders, contact_orders;
  std::vector<StopReason> stops;
};

ConvergenceReport refinement_study(const SimConfig& cfg, const Profile& initial, const std::vector<double>& taus,
                                   double final_time);

// Persistence.
struct FileRecord {
  std::string path;  ///< relative to the output directory
  std::uint64_t bytes;
  std::uint32_t crc32;
};

struct PersistOptions {
  bool write_fields = false;
};

/// Writes ledger.csv, profiles/step_NNNNN.txt and optional fields/; returns the inventory.
std::vector<FileRecord> write_trajectory(const Trajectory& traj, const std::string& dir, const PersistOptions& opts = {});
std::string format_ledger(const Trajectory& traj);
std::vector<LedgerRow> read_ledger(const std::string& path);
std::uint32_t file_crc32(const std::string& path);

}  // namespace dewet
