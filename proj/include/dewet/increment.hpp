#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dewet/config.hpp"
#include "dewet/elasticity.hpp"
#include "dewet/energy.hpp"
#include "dewet/kernels.hpp"
#include "dewet/profile.hpp"

namespace dewet {

/// phi0(x) = psi((x - a0)/(b0 - a0)) / (b0 - a0), unit mass, psi ~ exp(-1/(t(1-t))).
/// `variant` 1 uses the same shape on the sub-support (0.1, 0.7) of the unit interval.
class Bump {
public:
  Bump(double a0, double b0, int variant = 0);
  double a0() const { return a0_; }
  double b0() const { return b0_; }
  /// phi0, phi0', phi0''.
  std::array<double, 3> eval(double x) const;
  double operator()(double x) const { return eval(x)[0]; }
  /// sup |phi0| (attained at the support midpoint).
  double sup() const;

private:
  double a0_, b0_, lo_, hi_;
};

Bump bump_function(double a0, double b0);

struct ELResidualReport {
  double el_weak_residual = 0.0;
  double contact_residual_alpha = 0.0;
  double contact_residual_beta = 0.0;
  double contact_pointwise_alpha = 0.0;  ///< same defect with the one-sided spline third derivative
  double contact_pointwise_beta = 0.0;
  double endpoint_h2 = 0.0;
  double multiplier_stability = 0.0;
};

struct StepResult {
  Profile profile;
  DisplacementField field;
  double m = 0.0;
  EnergyBreakdown energies;
  ELResidualReport residuals;
  int iterations = 0;

  double da = 0.0, db = 0.0;        ///< contact displacements in this step
  double area_multiplier = 0.0;     ///< KKT multiplier of the discrete area constraint
  double opt_residual = 0.0;        ///< final reduced-gradient norm (density units)
  int outer_iterations = 0;         ///< elasticity alternations
  double b_tau = 1.0;
  double mass_error = 0.0;          ///< |area - area0| / area0
  double lip_margin = 0.0;          ///< lip0 - Lip(h)
  double max_velocity = 0.0;        ///< max |h - h0| / tau over prev and current nodes
};

enum class StepFailure { iteration_budget, lipschitz_saturation, pinch_off, degenerate_contact, elastic_solve };
const char* to_string(StepFailure f);

class StepError : public std::runtime_error {
public:
  StepError(StepFailure reason, const std::string& what, std::optional<Profile> best = std::nullopt)
      : std::runtime_error(what), reason_(reason), best_(std::move(best)) {}
  StepFailure reason() const { return reason_; }
  const std::optional<Profile>& best_iterate() const { return best_; }

private:
  StepFailure reason_;
  std::optional<Profile> best_;
};

/// State carried between steps of one run.
struct StepContext {
  std::optional<MeshTopology> topology;  ///< fixed mesh connectivity (set on first use)
  std::optional<DisplacementField> prev_field;
  std::vector<double> hessian;          ///< cached reduced Hessian (row-major)
  int hessian_size = 0;
  bool compute_residuals = true;
  int max_newton = 80;
  int max_outer = 40;
  double min_corner_slope = 0.05;
};

/// Step objective S + T + (E with the elastic trace frozen at `field`) in local
/// variables z = (alpha - alpha0, beta - beta0, h_1 .. h_{n-1}).
class StepObjective {
public:
  StepObjective(const Profile& prev, const SimConfig& cfg, const DisplacementField* field = nullptr);
  ~StepObjective();
  StepObjective(const StepObjective&) = delete;
  StepObjective& operator=(const StepObjective&) = delete;

  int size() const;
  std::vector<double> pack(const Profile& p) const;
  Profile unpack(const std::vector<double>& z) const;
  double value(const std::vector<double>& z, std::vector<double>* grad = nullptr) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Approximate minimizer of S + E + T over (alpha, beta, h) near prev.
StepResult minimize_step(const Profile& prev, const SimConfig& cfg, StepContext& ctx);
StepResult minimize_step(const Profile& prev, const SimConfig& cfg);

/// Equilibrium field on prev's mesh, honouring ctx.topology.
DisplacementField solve_field(const Profile& p, const SimConfig& cfg, StepContext& ctx);

/// Step-local description of a candidate: everything relative to prev's alpha.
struct LocalState {
  kernel::Shape cur, prev;
  kernel::Piecewise wbar;  ///< W on the free surface as a function of local x
  double da = 0.0, db = 0.0;
};
LocalState local_state(const Profile& p, const Profile& prev, const DisplacementField* field);

/// Area multiplier from the bump formula.
double compute_multiplier(const LocalState& s, const SimConfig& cfg, const Bump& bump);
double compute_multiplier(const Profile& p, const Profile& prev, const DisplacementField* field, const SimConfig& cfg,
                          int variant = 0);

/// Weak form defect on a battery of cubic B-spline test functions.
struct WeakProblem {
  /// (h, h', h'') at x
  std::function<std::array<double, 3>(double)> surface;
  /// (h - h0)/(tau J0) restricted to the previous support
  std::function<double(double)> time_term;
  std::function<double(double)> wbar;
  double m = 0.0;
  double a = 0.0, b = 0.0;        ///< test-function window
  std::vector<double> breaks;      ///< integrand kinks to align panels with
};
double weak_residual(const WeakProblem& wp, const SimConfig& cfg, int tests = 8);

/// Residual diagnostics of a computed step.
ELResidualReport el_residual(const StepResult& result, const Profile& prev, const SimConfig& cfg);
ELResidualReport el_residual(const LocalState& s, double m, const SimConfig& cfg);

}  // namespace dewet
