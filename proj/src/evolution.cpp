#include "dewet/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dewet/energy.hpp"
#include "dewet/quadrature.hpp"

namespace dewet {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::completed: return "completed";
    case StopReason::stationary: return "stationary";
    case StopReason::lipschitz_saturation: return "lipschitz_saturation";
    case StopReason::pinch_off: return "pinch_off";
    case StopReason::optimizer_failure: return "optimizer_failure";
    case StopReason::degenerate_contact: return "degenerate_contact";
    case StopReason::elastic_solve_failure: return "elastic_solve_failure";
  }
  return "unknown";
}

const std::vector<std::string>& ledger_columns() {
  static const std::vector<std::string> c = {"step", "t", "alpha", "beta", "S", "E", "T", "total",
                                             "m", "mass_err", "lip_margin", "el_residual", "contact_res_a",
                                             "contact_res_b", "endpoint_h2", "b_tau"};
  return c;
}

std::vector<double> ledger_values(const LedgerRow& r) {
  return {static_cast<double>(r.step), r.t, r.alpha, r.beta, r.S, r.E, r.T, r.total, r.m, r.mass_err,
          r.lip_margin, r.el_residual, r.contact_res_a, r.contact_res_b, r.endpoint_h2, r.b_tau};
}

namespace {

StopReason stop_of(StepFailure f) {
  switch (f) {
    case StepFailure::iteration_budget: return StopReason::optimizer_failure;
    case StepFailure::lipschitz_saturation: return StopReason::lipschitz_saturation;
    case StepFailure::pinch_off: return StopReason::pinch_off;
    case StepFailure::degenerate_contact: return StopReason::degenerate_contact;
    case StepFailure::elastic_solve: return StopReason::elastic_solve_failure;
  }
  return StopReason::optimizer_failure;
}

LedgerRow row_of(int i, double t, const StepResult& r) {
  LedgerRow w;
  w.step = i;
  w.t = t;
  w.alpha = r.profile.alpha();
  w.beta = r.profile.beta();
  w.S = r.energies.surface;
  w.E = r.energies.elastic;
  w.T = r.energies.metric;
  w.total = r.energies.total;
  w.m = r.m;
  w.mass_err = r.mass_error;
  w.lip_margin = r.lip_margin;
  w.el_residual = r.residuals.el_weak_residual;
  w.contact_res_a = r.residuals.contact_residual_alpha;
  w.contact_res_b = r.residuals.contact_residual_beta;
  w.endpoint_h2 = r.residuals.endpoint_h2;
  w.b_tau = r.b_tau;
  return w;
}

}  // namespace

Trajectory run(const SimConfig& cfg, const Profile& initial, const RunOptions& opts) {
  cfg.validate();
  const ValidationReport rep = validate_admissible(initial, cfg);
  if (!rep.ok()) throw std::invalid_argument("run: initial profile is not admissible\n" + rep.summary());
  if (initial.intervals() != cfg.n_profile) throw std::invalid_argument("run: initial profile resolution differs from n_profile");

  Trajectory traj;
  traj.config = cfg;
  traj.initial = initial;
  StepContext ctx;
  ctx.compute_residuals = opts.compute_residuals;
  try {
    traj.initial_field = solve_field(initial, cfg, ctx);
  } catch (const StepError& e) {
    throw std::invalid_argument(std::string("run: initial state rejected: ") + e.what());
  }
  ctx.prev_field = traj.initial_field;

  {
    LedgerRow r0;
    const LocalState ls = local_state(initial, initial, &traj.initial_field);
    r0.S = surface_energy(initial, cfg);
    r0.E = traj.initial_field.energy();
    r0.total = r0.S + r0.E;
    r0.alpha = initial.alpha();
    r0.beta = initial.beta();
    const double L = initial.length();
    r0.m = compute_multiplier(ls, cfg, Bump(0.25 * L, 0.75 * L));
    r0.mass_err = std::abs(initial.area() - cfg.area0) / cfg.area0;
    r0.lip_margin = cfg.lip0 - initial.lipschitz();
    if (opts.compute_residuals) {
      const auto res = el_residual(ls, r0.m, cfg);
      r0.el_residual = res.el_weak_residual;
      r0.contact_res_a = res.contact_residual_alpha;
      r0.contact_res_b = res.contact_residual_beta;
      r0.endpoint_h2 = res.endpoint_h2;
    }
    traj.ledger.push_back(r0);
    if (opts.on_step) opts.on_step(r0);
  }

  const int steps = opts.max_steps > 0 ? opts.max_steps : cfg.max_steps;
  for (int i = 1; i <= steps; ++i) {
    try {
      StepResult r = minimize_step(traj.state(i - 1), cfg, ctx);
      traj.ledger.push_back(row_of(i, i * cfg.tau, r));
      if (opts.on_step) opts.on_step(traj.ledger.back());
      const double speed = std::max({r.max_velocity, std::abs(r.da) / cfg.tau, std::abs(r.db) / cfg.tau});
      traj.steps.push_back(std::move(r));
      if (opts.stop_velocity > 0.0 && speed <= opts.stop_velocity) {
        traj.stop = StopReason::stationary;
        break;
      }
    } catch (const StepError& e) {
      traj.stop = stop_of(e.reason());
      traj.stop_detail = e.what();
      break;
    }
  }
  return traj;
}

Profile find_equilibrium(const SimConfig& cfg, const Profile& initial, double tau_relax, int max_steps, double tol) {
  SimConfig c = cfg;
  c.tau = tau_relax;
  Profile p = initial;
  StepContext ctx;
  ctx.compute_residuals = false;
  for (int i = 0; i < max_steps; ++i) {
    const StepResult r = minimize_step(p, c, ctx);
    p = r.profile;
    const double speed = std::max({r.max_velocity, std::abs(r.da) / c.tau, std::abs(r.db) / c.tau});
    if (speed * c.tau <= tol) return p;
  }
  return p;
}

LedgerCheck check_ledger(const Trajectory& traj) {
  LedgerCheck c;
  const SimConfig& cfg = traj.config;
  const double base = traj.ledger.front().S + traj.ledger.front().E;
  double prev = base, dissipated = 0.0;
  c.min_floor_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.ledger.size(); ++i) {
    const LedgerRow& r = traj.ledger[i];
    const double se = r.S + r.E;
    if (i > 0) {
      if (se > prev) ++c.monotone_violations;
      dissipated += r.T;
      if (se + dissipated > base) ++c.dissipation_violations;
    }
    prev = se;
    c.max_mass_error = std::max(c.max_mass_error, r.mass_err);
    if (r.mass_err > cfg.tol_mass) ++c.mass_violations;
    const double margin = (r.beta - r.alpha) - cfg.min_support();
    c.min_floor_margin = std::min(c.min_floor_margin, margin);
    if (margin < 0.0) ++c.floor_violations;
  }
  return c;
}

// ---------------------------------------------------------------------------

double l2_norm_of_combination(const std::vector<std::pair<double, const Profile*>>& terms) {
  std::vector<double> pts;
  for (const auto& [c, p] : terms)
    for (int j = 0; j <= p->intervals(); ++j) pts.push_back(p->node_x(j));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const GaussRule g = gauss_rule(5);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double w = pts[k + 1] - pts[k];
    if (!(w > 0.0)) continue;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double x = pts[k] + g.nodes[q] * w;
      double v = 0.0;
      for (const auto& [c, p] : terms) v += c * extend_by_zero(*p, x);
      sum += g.weights[q] * w * v * v;
    }
  }
  return std::sqrt(sum);
}

Interpolants::Interpolants(const Trajectory& traj) : traj_(traj) {
  if (traj.states() < 1) throw std::invalid_argument("Interpolants: empty trajectory");
}

Interpolants::Knot Interpolants::bracket(double t) const {
  const double T = traj_.final_time();
  if (!(t >= 0.0 && t <= T * (1.0 + 1e-14))) throw std::domain_error("interpolant query outside [0, T]");
  if (traj_.states() == 1) return {0, 0, 0.0};
  const double tau = traj_.config.tau;
  int i = static_cast<int>(std::floor(t / tau));
  i = std::clamp(i, 0, traj_.states() - 2);
  double theta = (t - i * tau) / tau;
  if (theta >= 1.0 - 1e-12) {
    ++i;
    theta = 0.0;
    if (i == traj_.states() - 1) return {i, i, 0.0};
  }
  if (theta <= 1e-12) return {i, i, 0.0};
  return {i, i + 1, theta};
}

int Interpolants::right_index(double t) const {
  const double T = traj_.final_time();
  if (!(t >= 0.0 && t <= T * (1.0 + 1e-14))) throw std::domain_error("interpolant query outside [0, T]");
  const double tau = traj_.config.tau;
  const double u = t / tau;
  int i = static_cast<int>(std::ceil(u - 1e-12));
  return std::clamp(i, 0, traj_.states() - 1);
}

double Interpolants::alpha_linear(double t) const {
  const auto k = bracket(t);
  return (1.0 - k.theta) * traj_.state(k.lo).alpha() + k.theta * traj_.state(k.hi).alpha();
}

double Interpolants::beta_linear(double t) const {
  const auto k = bracket(t);
  return (1.0 - k.theta) * traj_.state(k.lo).beta() + k.theta * traj_.state(k.hi).beta();
}

double Interpolants::h_linear(double t, double x) const {
  const auto k = bracket(t);
  return (1.0 - k.theta) * extend_by_zero(traj_.state(k.lo), x) + k.theta * extend_by_zero(traj_.state(k.hi), x);
}

double Interpolants::alpha_constant(double t) const { return traj_.state(right_index(t)).alpha(); }
double Interpolants::beta_constant(double t) const { return traj_.state(right_index(t)).beta(); }
double Interpolants::h_constant(double t, double x) const { return extend_by_zero(traj_.state(right_index(t)), x); }

double Interpolants::l2_distance(double t1, double t2) const {
  const auto a = bracket(t1), b = bracket(t2);
  return l2_norm_of_combination({{1.0 - a.theta, &traj_.state(a.lo)},
                                 {a.theta, &traj_.state(a.hi)},
                                 {-(1.0 - b.theta), &traj_.state(b.lo)},
                                 {-b.theta, &traj_.state(b.hi)}});
}

double Interpolants::l2_distance_to(const Interpolants& o, double t) const {
  const auto a = bracket(t), b = o.bracket(t);
  return l2_norm_of_combination({{1.0 - a.theta, &traj_.state(a.lo)},
                                 {a.theta, &traj_.state(a.hi)},
                                 {-(1.0 - b.theta), &o.traj_.state(b.lo)},
                                 {-b.theta, &o.traj_.state(b.hi)}});
}

double Interpolants::contact_constant() const {
  double sa = 0.0, sb = 0.0;
  for (int i = 1; i < traj_.states(); ++i) {
    const double da = traj_.state(i).alpha() - traj_.state(i - 1).alpha();
    const double db = traj_.state(i).beta() - traj_.state(i - 1).beta();
    sa += da * da;
    sb += db * db;
  }
  return std::max(sa, sb) / traj_.config.tau;
}

double Interpolants::profile_constant() const {
  double s = 0.0;
  for (int i = 1; i < traj_.states(); ++i) {
    const double d = l2_norm_of_combination({{1.0, &traj_.state(i)}, {-1.0, &traj_.state(i - 1)}});
    s += d * d;
  }
  return s / traj_.config.tau;
}

ConvergenceReport refinement_study(const SimConfig& cfg, const Profile& initial, const std::vector<double>& taus,
                                   double final_time) {
  ConvergenceReport rep;
  rep.taus = taus;
  rep.final_time = final_time;
  std::vector<Trajectory> runs;
  for (double tau : taus) {
    SimConfig c = cfg;
    c.tau = tau;
    c.max_steps = static_cast<int>(std::lround(final_time / tau));
    RunOptions o;
    o.compute_residuals = false;
    runs.push_back(run(c, initial, o));
    rep.stops.push_back(runs.back().stop);
  }
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    const Interpolants a(runs[k]), b(runs[k + 1]);
    const double T = std::min(runs[k].final_time(), runs[k + 1].final_time());
    rep.l2_differences.push_back(a.l2_distance_to(b, T));
    double cd = 0.0;
    for (int i = 0; i < runs[k].states(); ++i) {
      const double t = runs[k].time(i);
      if (t > T) break;
      cd = std::max({cd, std::abs(a.alpha_linear(t) - b.alpha_linear(t)), std::abs(a.beta_linear(t) - b.beta_linear(t))});
    }
    rep.contact_differences.push_back(cd);
  }
  for (std::size_t k = 0; k + 1 < rep.l2_differences.size(); ++k) {
    const double r = taus[k] / taus[k + 1];
    rep.orders.push_back(std::log(rep.l2_differences[k] / rep.l2_differences[k + 1]) / std::log(r));
    rep.contact_orders.push_back(std::log(rep.contact_differences[k] / rep.contact_differences[k + 1]) / std::log(r));
  }
  return rep;
}

}  // namespace dewet
