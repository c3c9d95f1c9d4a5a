#include "dewet/increment.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dewet/quadrature.hpp"

namespace dewet {

namespace {

double psi_mass() {
  static const double c = integrate(
      [](double t) {
        const double u = t * (1.0 - t);
        return u > 0.0 ? std::exp(-1.0 / u) : 0.0;
      },
      0.0, 1.0, 64, 10);
  return c;
}

// Unit-mass bump on (0, 1) and two derivatives.
std::array<double, 3> psi(double t) {
  if (!(t > 0.0 && t < 1.0)) return {0.0, 0.0, 0.0};
  const double u = t * (1.0 - t);
  if (u < 1e-3) return {0.0, 0.0, 0.0};
  const double v = std::exp(-1.0 / u) / psi_mass();
  const double u1 = 1.0 - 2.0 * t, u2 = -2.0;
  const double q = u1 / (u * u);
  return {v, v * q, v * (q * q + u2 / (u * u) - 2.0 * u1 * u1 / (u * u * u))};
}

}  // namespace

Bump::Bump(double a0, double b0, int variant) : a0_(a0), b0_(b0) {
  if (!(a0 < b0)) throw std::domain_error("bump_function: need a0 < b0");
  lo_ = variant == 0 ? 0.0 : 0.1;
  hi_ = variant == 0 ? 1.0 : 0.7;
}

Bump bump_function(double a0, double b0) { return Bump(a0, b0); }

std::array<double, 3> Bump::eval(double x) const {
  const double w = (b0_ - a0_) * (hi_ - lo_);
  const double t = (x - a0_) / (b0_ - a0_);
  const auto p = psi((t - lo_) / (hi_ - lo_));
  return {p[0] / w, p[1] / (w * w), p[2] / (w * w * w)};
}

double Bump::sup() const { return eval(a0_ + (b0_ - a0_) * 0.5 * (lo_ + hi_))[0]; }

const char* to_string(StepFailure f) {
  switch (f) {
    case StepFailure::iteration_budget: return "optimizer_failure";
    case StepFailure::lipschitz_saturation: return "lipschitz_saturation";
    case StepFailure::pinch_off: return "pinch_off";
    case StepFailure::degenerate_contact: return "degenerate_contact";
    case StepFailure::elastic_solve: return "elastic_solve_failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Local state, multiplier and residuals.

LocalState local_state(const Profile& p, const Profile& prev, const DisplacementField* field) {
  const auto [da, db] = contact_shift(p, prev);
  LocalState s{{&p.spline(), da, p.length()}, {&prev.spline(), 0.0, prev.length()}, {}, da, db};
  if (field && !field->empty() && field->e0() != 0.0) {
    auto [x, w] = field->surface_trace();
    for (auto& v : x) v += da;
    s.wbar = {std::move(x), std::move(w)};
  }
  return s;
}

namespace {

struct PointData {
  double h, h1, h2, time, wbar;
};

PointData point_data(const LocalState& s, double X, double tau) {
  const double L = s.cur.length, L0 = s.prev.length;
  const auto e = s.cur.spline->eval(s.cur.spline->locate(s.cur.xi(X)));
  PointData d{e[0], e[1] / L, e[2] / (L * L), 0.0, s.wbar.empty() ? 0.0 : s.wbar(X)};
  if (X >= 0.0 && X <= L0) {
    const auto e0 = s.prev.spline->eval(s.prev.spline->locate(s.prev.xi(X)));
    const double d0 = e0[1] / L0;
    d.time = (d.h - e0[0]) / (tau * std::sqrt(1.0 + d0 * d0));
  }
  return d;
}

std::vector<double> local_breaks(const LocalState& s, double lo, double hi) {
  std::vector<double> extra = s.wbar.x;
  extra.push_back(0.0);
  extra.push_back(s.prev.length);
  return kernel::panels(lo, hi, {&s.cur, &s.prev}, &extra);
}

}  // namespace

double compute_multiplier(const LocalState& s, const SimConfig& cfg, const Bump& bump) {
  const auto pan = local_breaks(s, bump.a0(), bump.b0());
  const GaussRule rule = gauss_rule(8);
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < pan.size(); ++k) {
    const double w = pan[k + 1] - pan[k];
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double X = pan[k] + rule.nodes[q] * w;
      const auto d = point_data(s, X, cfg.tau);
      const auto phi = bump.eval(X);
      const double J2 = 1.0 + d.h1 * d.h1, J = std::sqrt(J2), J5 = J2 * J2 * J, J7 = J5 * J2;
      const double A = cfg.nu0 / J5;
      const double B = cfg.gamma / J - 2.5 * cfg.nu0 * d.h2 * d.h2 / J7;
      m += rule.weights[q] * w * (A * d.h2 * phi[2] + B * d.h1 * phi[1] + (d.wbar + d.time) * phi[0]);
    }
  }
  return m;
}

double compute_multiplier(const Profile& p, const Profile& prev, const DisplacementField* field, const SimConfig& cfg,
                          int variant) {
  const LocalState s = local_state(p, prev, field);
  return compute_multiplier(s, cfg, Bump(s.da + 0.25 * p.length(), s.da + 0.75 * p.length(), variant));
}

namespace {

// Uniform cubic B-spline on knots t0 + k h, support [t0, t0 + 4h]; value and two derivatives.
std::array<double, 3> cubic_bspline(double x, double t0, double h) {
  const double u = (x - t0) / h;
  if (!(u > 0.0 && u < 4.0)) return {0.0, 0.0, 0.0};
  double v, d1, d2;
  if (u < 1.0) {
    v = u * u * u / 6.0;
    d1 = u * u / 2.0;
    d2 = u;
  } else if (u < 2.0) {
    const double s = u - 1.0;
    v = (-3.0 * s * s * s + 3.0 * s * s + 3.0 * s + 1.0) / 6.0;
    d1 = (-9.0 * s * s + 6.0 * s + 3.0) / 6.0;
    d2 = -3.0 * s + 1.0;
  } else if (u < 3.0) {
    const double s = u - 2.0;
    v = (3.0 * s * s * s - 6.0 * s * s + 4.0) / 6.0;
    d1 = (9.0 * s * s - 12.0 * s) / 6.0;
    d2 = 3.0 * s - 2.0;
  } else {
    const double s = 4.0 - u;
    v = s * s * s / 6.0;
    d1 = -s * s / 2.0;
    d2 = s;
  }
  return {v, d1 / h, d2 / (h * h)};
}

}  // namespace

namespace {

// Flux gamma h'/J - nu0 (h''/J^5)' at a contact point, from the weak form tested against
// psi = (1-t)^3 (1+3t), t = distance / (L/4), which has psi = 1 and psi' = 0 there.
double contact_flux(const LocalState& s, double m, const SimConfig& cfg, bool left) {
  const double L = s.cur.length, delta = 0.25 * L;
  const double end = left ? s.da : s.da + L;
  const double lo = left ? end : end - delta, hi = left ? end + delta : end;
  const auto pan = local_breaks(s, lo, hi);
  const GaussRule rule = gauss_rule(8);
  const double dir = left ? 1.0 : -1.0;
  double I = 0.0;
  for (std::size_t k = 0; k + 1 < pan.size(); ++k) {
    const double w = pan[k + 1] - pan[k];
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double X = pan[k] + rule.nodes[q] * w;
      const double t = dir * (X - end) / delta;
      const double psi = (1.0 - t) * (1.0 - t) * (1.0 - t) * (1.0 + 3.0 * t);
      const double psi1 = -12.0 * t * (1.0 - t) * (1.0 - t) * dir / delta;
      const double psi2 = -12.0 * (1.0 - t) * (1.0 - 3.0 * t) / (delta * delta);
      const auto d = point_data(s, X, cfg.tau);
      const double J2 = 1.0 + d.h1 * d.h1, J = std::sqrt(J2), J5 = J2 * J2 * J, J7 = J5 * J2;
      const double c0 = d.time + d.wbar - m;
      const double c1 = cfg.gamma * d.h1 / J - 2.5 * cfg.nu0 * d.h1 * d.h2 * d.h2 / J7;
      const double c2 = cfg.nu0 * d.h2 / J5;
      I += rule.weights[q] * w * (c0 * psi + c1 * psi1 + c2 * psi2);
    }
  }
  return left ? -I : I;
}

}  // namespace

double weak_residual(const WeakProblem& wp, const SimConfig& cfg, int tests) {
  const double h = (wp.b - wp.a) / (tests + 3);
  std::vector<double> pts;
  for (int k = 0; k <= tests + 3; ++k) pts.push_back(wp.a + k * h);
  for (double x : wp.breaks)
    if (x > wp.a && x < wp.b) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const GaussRule rule = gauss_rule(6);
  std::vector<double> r(tests, 0.0), mag(tests, 0.0);
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const double w = pts[p + 1] - pts[p];
    if (!(w > 0.0)) continue;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = pts[p] + rule.nodes[q] * w, wq = rule.weights[q] * w;
      const auto s = wp.surface(x);
      const double J2 = 1.0 + s[1] * s[1], J = std::sqrt(J2), J5 = J2 * J2 * J, J7 = J5 * J2;
      const double c0 = wp.time_term(x) + wp.wbar(x) - wp.m;
      const double c1a = cfg.gamma * s[1] / J, c1b = -2.5 * cfg.nu0 * s[1] * s[2] * s[2] / J7;
      const double c2 = cfg.nu0 * s[2] / J5;
      const double abs0 = std::abs(wp.time_term(x)) + std::abs(wp.wbar(x)) + std::abs(wp.m);
      const int k0 = std::max(0, static_cast<int>((x - wp.a) / h) - 3);
      const int k1 = std::min(tests - 1, static_cast<int>((x - wp.a) / h));
      for (int k = k0; k <= k1; ++k) {
        const auto phi = cubic_bspline(x, wp.a + k * h, h);
        r[k] += wq * (c0 * phi[0] + (c1a + c1b) * phi[1] + c2 * phi[2]);
        mag[k] += wq * (abs0 * std::abs(phi[0]) + (std::abs(c1a) + std::abs(c1b)) * std::abs(phi[1]) +
                        std::abs(c2 * phi[2]));
      }
    }
  }
  double worst = 0.0;
  for (int k = 0; k < tests; ++k)
    if (mag[k] > 0.0) worst = std::max(worst, std::abs(r[k]) / mag[k]);
  return worst;
}

ELResidualReport el_residual(const LocalState& s, double m, const SimConfig& cfg) {
  ELResidualReport rep;
  const int n = s.cur.spline->intervals();
  WeakProblem wp;
  wp.surface = [&](double X) {
    const auto d = point_data(s, X, cfg.tau);
    return std::array<double, 3>{d.h, d.h1, d.h2};
  };
  wp.time_term = [&](double X) { return point_data(s, X, cfg.tau).time; };
  wp.wbar = [&](double X) { return s.wbar.empty() ? 0.0 : s.wbar(X); };
  wp.m = m;
  wp.a = s.cur.node(2);
  wp.b = s.cur.node(n - 2);
  wp.breaks = local_breaks(s, wp.a, wp.b);
  rep.el_weak_residual = weak_residual(wp, cfg);

  const double L = s.cur.length;
  auto ends = [&](double xi) {
    const auto e = s.cur.spline->eval(s.cur.spline->locate(xi));
    return std::array<double, 4>{e[0], e[1] / L, e[2] / (L * L), e[3] / (L * L * L)};
  };
  // gamma/J + nu0 h'/J^2 (h''/J^3)' from pointwise derivatives.
  auto pointwise = [&](const std::array<double, 4>& d) {
    const double J2 = 1.0 + d[1] * d[1], J = std::sqrt(J2), J3 = J2 * J, J5 = J3 * J2;
    const double dk = d[3] / J3 - 3.0 * d[1] * d[2] * d[2] / J5;
    return cfg.gamma / J + cfg.nu0 * d[1] / J2 * dk;
  };
  // The same quantity with the flux recovered variationally; needs h'' = 0 at the contact.
  auto recovered = [&](const std::array<double, 4>& d, double flux) {
    return cfg.gamma * std::sqrt(1.0 + d[1] * d[1]) - d[1] * flux;
  };
  const auto da = ends(0.0), db = ends(1.0);
  const double fa = contact_flux(s, m, cfg, true), fb = contact_flux(s, m, cfg, false);
  auto res_a = [&](double t) { return std::abs(cfg.sigma0 * s.da / cfg.tau - (t - cfg.gamma0)); };
  auto res_b = [&](double t) { return std::abs(cfg.sigma0 * s.db / cfg.tau - (cfg.gamma0 - t)); };
  rep.contact_residual_alpha = res_a(recovered(da, fa));
  rep.contact_residual_beta = res_b(recovered(db, fb));
  rep.contact_pointwise_alpha = res_a(pointwise(da));
  rep.contact_pointwise_beta = res_b(pointwise(db));
  rep.endpoint_h2 = std::abs(da[2]) + std::abs(db[2]);
  const Bump b0(s.da + 0.25 * L, s.da + 0.75 * L, 0), b1(s.da + 0.25 * L, s.da + 0.75 * L, 1);
  rep.multiplier_stability = std::abs(compute_multiplier(s, cfg, b0) - compute_multiplier(s, cfg, b1));
  return rep;
}

ELResidualReport el_residual(const StepResult& result, const Profile& prev, const SimConfig& cfg) {
  LocalState s = local_state(result.profile, prev, &result.field);
  s.da = result.da;
  s.db = result.db;
  s.cur.offset = result.da;
  if (!s.wbar.empty()) {
    auto [x, w] = result.field.surface_trace();
    for (auto& v : x) v += result.da;
    s.wbar = {std::move(x), std::move(w)};
  }
  return el_residual(s, result.m, cfg);
}

// ---------------------------------------------------------------------------
// The incremental minimization.

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Candidate {
  double a, b;
  std::vector<double> y;  // all n+1 nodes
  double length(double L0) const { return L0 + b - a; }
};

class StepProblem {
public:
  StepProblem(const Profile& prev, const SimConfig& cfg, double min_slope)
      : cfg_(cfg), prev_(&prev.spline(), 0.0, prev.length()), L0_(prev.length()), n_(prev.intervals()),
        w_(spline_integral_weights(prev.intervals())), min_slope_(min_slope) {
    for (int j = 1; j < n_; ++j) w_int_ += w_[j];
  }

  int size() const { return n_ + 1; }
  double L0() const { return L0_; }

  void set_surrogate(kernel::Piecewise wbar, double e_k, double c_k) {
    wbar_ = std::move(wbar);
    e_k_ = e_k;
    c_k_ = c_k;
  }

  Vec pack(const Candidate& c) const {
    Vec z(size());
    z[0] = c.a;
    z[1] = c.b;
    for (int j = 1; j < n_; ++j) z[j + 1] = c.y[j];
    return z;
  }

  Candidate unpack(const Vec& z) const {
    Candidate c{z[0], z[1], std::vector<double>(n_ + 1, 0.0)};
    for (int j = 1; j < n_; ++j) c.y[j] = z[j + 1];
    return c;
  }

  double weighted_sum(const Vec& z) const {
    double s = 0.0;
    for (int j = 1; j < n_; ++j) s += w_[j] * z[j + 1];
    return s;
  }

  /// Exact area restoration by a constant shift of interior nodes.
  void project(Vec& z) const {
    const double L = L0_ + z[1] - z[0];
    const double c = (cfg_.area0 / L - weighted_sum(z)) / w_int_;
    for (int j = 1; j < n_; ++j) z[j + 1] += c;
  }

  Vec constraint_gradient(const Vec& z) const {
    const double L = L0_ + z[1] - z[0], W = weighted_sum(z);
    Vec c(size());
    c[0] = -W;
    c[1] = W;
    for (int j = 1; j < n_; ++j) c[j + 1] = L * w_[j];
    return c;
  }

  /// Surrogate objective; returns +inf for a nonpositive length.
  double value(const Vec& z, Vec* grad) const {
    const double L = L0_ + z[1] - z[0];
    if (!(L > 0.0)) return std::numeric_limits<double>::infinity();
    const Candidate c = unpack(z);
    const UniformSpline sp(c.y);
    const kernel::Shape cur{&sp, c.a, L};
    kernel::Grad g(n_);
    kernel::Grad* gp = grad ? &g : nullptr;
    double f = kernel::surface(cur, cfg_, gp);
    f += kernel::metric_bulk(cur, prev_, cfg_.tau, gp);
    f += cfg_.sigma0 / (2.0 * cfg_.tau) * (c.a * c.a + c.b * c.b);
    if (!wbar_.empty()) f += e_k_ + kernel::coupling(cur, wbar_, gp) - c_k_;
    if (grad) {
      g.da += cfg_.sigma0 * c.a / cfg_.tau;
      g.db += cfg_.sigma0 * c.b / cfg_.tau;
      grad->resize(size());
      (*grad)[0] = g.da;
      (*grad)[1] = g.db;
      for (int j = 1; j < n_; ++j) (*grad)[j + 1] = g.dy[j];
    }
    return f;
  }

  /// Reduced gradient in density units and the least-squares area multiplier.
  std::pair<double, double> stationarity(const Vec& z, const Vec& g) const {
    const Vec c = constraint_gradient(z);
    double num = 0.0, den = 0.0;
    for (int j = 2; j < size(); ++j) {
      num += g[j] * c[j];
      den += c[j] * c[j];
    }
    const double lam = num / den;
    const double L = L0_ + z[1] - z[0];
    double r = std::max(std::abs(g[0] - lam * c[0]), std::abs(g[1] - lam * c[1]));
    for (int j = 2; j < size(); ++j) r = std::max(r, std::abs(g[j] - lam * c[j]) / (L * w_[j - 1]));
    return {r, lam};
  }

  /// Admissibility of a candidate; returns the violated guard if any.
  std::optional<StepFailure> guard(const Vec& z) const {
    const double L = L0_ + z[1] - z[0];
    if (!(L > 0.0)) return StepFailure::lipschitz_saturation;
    const Candidate c = unpack(z);
    for (int j = 1; j < n_; ++j)
      if (!(c.y[j] > 0.0)) return StepFailure::pinch_off;
    const UniformSpline sp(c.y);
    if (!(sp.max_abs_slope() / L < cfg_.lip0) || L < cfg_.min_support()) return StepFailure::lipschitz_saturation;
    const double sa = sp.eval({0, 0.0})[1] / L, sb = -sp.eval({n_ - 1, 1.0})[1] / L;
    if (!(sa >= min_slope_) || !(sb >= min_slope_)) return StepFailure::degenerate_contact;
    return std::nullopt;
  }

  Mat hessian(const Vec& z, double lam) const {
    const int N = size();
    Mat H(N, N);
    const double L = L0_ + z[1] - z[0];
    double hmax = 0.0;
    for (int j = 2; j < N; ++j) hmax = std::max(hmax, std::abs(z[j]));
    Vec gp, gm;
    for (int k = 0; k < N; ++k) {
      const double eps = 1e-6 * (k < 2 ? L : std::max(hmax, 1e-3));
      Vec zp = z, zm = z;
      zp[k] += eps;
      zm[k] -= eps;
      value(zp, &gp);
      value(zm, &gm);
      H.col(k) = (gp - gm) / (2.0 * eps);
    }
    H = 0.5 * (H + H.transpose()).eval();
    // Curvature of the bilinear area constraint.
    for (int j = 1; j < n_; ++j) {
      H(0, j + 1) += lam * w_[j];
      H(j + 1, 0) += lam * w_[j];
      H(1, j + 1) -= lam * w_[j];
      H(j + 1, 1) -= lam * w_[j];
    }
    return H;
  }

  const SimConfig& cfg() const { return cfg_; }
  int n() const { return n_; }

private:
  const SimConfig& cfg_;
  kernel::Shape prev_;
  double L0_;
  int n_;
  const std::vector<double>& w_;
  double w_int_ = 0.0;
  double min_slope_;
  kernel::Piecewise wbar_;
  double e_k_ = 0.0, c_k_ = 0.0;
};

struct NewtonOutcome {
  Vec z;
  double residual = 0.0, lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<StepFailure> blocked;
};

Vec solve_tangent(const Mat& H, const Vec& g, const Vec& c) {
  // The null-space step is unchanged by adding rho c c^T, which restores definiteness
  // in the constraint direction.
  const double rho = H.diagonal().cwiseAbs().maxCoeff() / std::max(c.squaredNorm(), 1e-300);
  Mat A = H + rho * c * c.transpose();
  const Vec dscale = A.diagonal().cwiseAbs().cwiseMax(1e-300);
  for (double mu = 0.0;; mu = mu == 0.0 ? 1e-10 : mu * 100.0) {
    Mat B = A;
    if (mu > 0.0) B.diagonal() += mu * dscale;
    Eigen::LLT<Mat> llt(B);
    if (llt.info() != Eigen::Success) {
      if (mu > 1e6) break;
      continue;
    }
    const Vec hg = llt.solve(g), hc = llt.solve(c);
    const double nu = c.dot(hg) / c.dot(hc);
    return -(hg - nu * hc);
  }
  return -(g - c * (c.dot(g) / c.squaredNorm()));
}

NewtonOutcome newton(const StepProblem& P, Vec z, const SimConfig& cfg, StepContext& ctx) {
  NewtonOutcome out;
  const int N = P.size();
  Mat H;
  bool fresh = false;
  if (ctx.hessian_size == N) {
    H = Eigen::Map<const Mat>(ctx.hessian.data(), N, N);
  }
  Vec g;
  double f = P.value(z, &g);
  auto [res, lam] = P.stationarity(z, g);
  double last_res = std::numeric_limits<double>::infinity();
  int stalls = 0;
  for (int it = 0; it < ctx.max_newton; ++it) {
    out.iterations = it;
    if (res <= cfg.tol_opt) {
      out.converged = true;
      break;
    }
    if (H.rows() != N || (!fresh && res > 0.25 * last_res)) {
      H = P.hessian(z, lam);
      fresh = true;
    }
    const Vec c = P.constraint_gradient(z);
    const Vec dz = solve_tangent(H, g, c);
    const double slope = g.dot(dz);
    const bool floor = std::abs(slope) <= 1e-14 * (std::abs(f) + 1.0);
    double t = 1.0;
    bool accepted = false;
    Vec zt, gt;
    double ft = 0.0;
    for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
      zt = z + t * dz;
      P.project(zt);
      if (auto bad = P.guard(zt)) {
        out.blocked = bad;
        continue;
      }
      ft = P.value(zt, &gt);
      if (floor || ft <= f + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!fresh) {
        H.resize(0, 0);
        continue;
      }
      break;
    }
    last_res = res;
    z = zt;
    f = ft;
    g = gt;
    std::tie(res, lam) = P.stationarity(z, g);
    fresh = false;
    if (t < 1.0) H.resize(0, 0);
    if ((floor && res >= last_res) || (res <= 100.0 * cfg.tol_opt && res > 0.5 * last_res)) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
    out.iterations = it + 1;
  }
  if (res <= cfg.tol_opt) out.converged = true;
  out.z = z;
  out.residual = res;
  out.lambda = lam;
  if (H.rows() == N) {
    ctx.hessian.assign(H.data(), H.data() + H.size());
    ctx.hessian_size = N;
  }
  return out;
}

}  // namespace

namespace {

Profile to_profile(const Profile& prev, const StepProblem& P, const Vec& z) {
  const Candidate c = P.unpack(z);
  return Profile::from_length(prev.alpha() + c.a, c.length(P.L0()), c.y);
}

}  // namespace

struct StepObjective::Impl {
  Profile prev;
  SimConfig cfg;
  StepProblem problem;
  Impl(const Profile& p, const SimConfig& c) : prev(p), cfg(c), problem(prev, cfg, 0.0) {}
};

StepObjective::StepObjective(const Profile& prev, const SimConfig& cfg, const DisplacementField* field)
    : impl_(std::make_unique<Impl>(prev, cfg)) {
  if (field && !field->empty() && field->e0() != 0.0) {
    auto [x, w] = field->surface_trace();
    const kernel::Piecewise wb{std::move(x), std::move(w)};
    const kernel::Shape sh{&impl_->prev.spline(), 0.0, impl_->prev.length()};
    impl_->problem.set_surrogate(wb, field->energy(), kernel::coupling(sh, wb, nullptr));
  }
}

StepObjective::~StepObjective() = default;

int StepObjective::size() const { return impl_->problem.size(); }

std::vector<double> StepObjective::pack(const Profile& p) const {
  if (p.intervals() != impl_->prev.intervals()) throw std::invalid_argument("StepObjective: resolution mismatch");
  const auto [da, db] = contact_shift(p, impl_->prev);
  const Vec z = impl_->problem.pack(Candidate{da, db, p.nodes()});
  return {z.data(), z.data() + z.size()};
}

Profile StepObjective::unpack(const std::vector<double>& z) const {
  const Vec v = Eigen::Map<const Vec>(z.data(), static_cast<Eigen::Index>(z.size()));
  return to_profile(impl_->prev, impl_->problem, v);
}

double StepObjective::value(const std::vector<double>& z, std::vector<double>* grad) const {
  const Vec v = Eigen::Map<const Vec>(z.data(), static_cast<Eigen::Index>(z.size()));
  Vec g;
  const double f = impl_->problem.value(v, grad ? &g : nullptr);
  if (grad) grad->assign(g.data(), g.data() + g.size());
  return f;
}

DisplacementField solve_field(const Profile& p, const SimConfig& cfg, StepContext& ctx) {
  if (!ctx.topology) ctx.topology = mesh_topology(p, cfg);
  try {
    auto mesh = std::make_shared<const DomainMesh>(build_mesh(p, *ctx.topology));
    if (cfg.e0 == 0.0) return zero_field(std::move(mesh), cfg);
    return solve_equilibrium(std::move(mesh), cfg);
  } catch (const ElasticSolveError& e) {
    throw StepError(StepFailure::elastic_solve, e.what(), p);
  } catch (const std::domain_error& e) {
    throw StepError(StepFailure::degenerate_contact, e.what(), p);
  }
}

namespace {

kernel::Piecewise local_trace(const DisplacementField& f, double offset) {
  if (f.empty() || f.e0() == 0.0) return {};
  auto [x, w] = f.surface_trace();
  for (auto& v : x) v += offset;
  return {std::move(x), std::move(w)};
}

}  // namespace

StepResult minimize_step(const Profile& prev, const SimConfig& cfg) {
  StepContext ctx;
  return minimize_step(prev, cfg, ctx);
}

StepResult minimize_step(const Profile& prev, const SimConfig& cfg, StepContext& ctx) {
  if (prev.intervals() != cfg.n_profile)
    throw std::invalid_argument("minimize_step: profile resolution differs from n_profile");
  if (!ctx.prev_field || ctx.prev_field->mesh().origin != prev.alpha()) ctx.prev_field = solve_field(prev, cfg, ctx);
  const DisplacementField prev_field = *ctx.prev_field;

  StepProblem P(prev, cfg, ctx.min_corner_slope);
  Candidate c0{0.0, 0.0, prev.nodes()};
  Vec z = P.pack(c0);
  P.project(z);
  if (auto bad = P.guard(z)) throw StepError(*bad, "minimize_step: previous state is not admissible", prev);

  const kernel::Shape prev_shape{&prev.spline(), 0.0, prev.length()};
  const double s_prev = kernel::surface(prev_shape, cfg, nullptr);
  const double f_prev = s_prev + prev_field.energy();
  const bool elastic = cfg.e0 != 0.0;

  DisplacementField field = prev_field;
  double z_offset = 0.0;  // local offset of `field`
  Vec z_field = z;        // iterate at which `field` was solved
  double f_true = f_prev;
  NewtonOutcome nw;
  int total_iters = 0, outer = 0;
  for (; outer < ctx.max_outer; ++outer) {
    if (elastic) {
      const UniformSpline spk(P.unpack(z_field).y);
      const kernel::Shape shk{&spk, z_field[0], P.L0() + z_field[1] - z_field[0]};
      kernel::Piecewise wb = local_trace(field, z_offset);
      const double ck = kernel::coupling(shk, wb, nullptr);
      P.set_surrogate(std::move(wb), field.energy(), ck);
    }
    nw = newton(P, z, cfg, ctx);
    total_iters += nw.iterations;
    if (!nw.converged) {
      const double floor_tol = 100.0 * cfg.tol_opt;
      if (nw.residual > floor_tol) {
        const StepFailure why = nw.blocked.value_or(StepFailure::iteration_budget);
        std::ostringstream os;
        os << "minimize_step: reduced gradient " << nw.residual << " after " << nw.iterations
           << " iterations (" << to_string(why) << ")";
        throw StepError(why, os.str(), to_profile(prev, P, nw.z));
      }
    }
    if (!elastic) {
      z = nw.z;
      break;
    }
    // Re-solve elasticity at the new shape; accept only if the true energy decreases.
    Vec zc = nw.z;
    DisplacementField fc;
    double ft = 0.0;
    for (int bt = 0; bt < 30; ++bt) {
      const Profile pc = to_profile(prev, P, zc);
      fc = solve_field(pc, cfg, ctx);
      const kernel::Shape sc{&pc.spline(), zc[0], pc.length()};
      ft = kernel::surface(sc, cfg, nullptr) + kernel::metric_bulk(sc, prev_shape, cfg.tau, nullptr) +
           cfg.sigma0 / (2.0 * cfg.tau) * (zc[0] * zc[0] + zc[1] * zc[1]) + fc.energy();
      if (ft <= f_true) break;
      zc = 0.5 * (zc + z_field);
      P.project(zc);
    }
    const bool moved = ft < f_true;
    if (moved || outer == 0) {
      z = zc;
      field = fc;
      z_field = zc;
      z_offset = zc[0];
      f_true = std::min(ft, f_true);
    }
    // Stationarity of the alternation: the refreshed surrogate must already be converged.
    const UniformSpline spk(P.unpack(z).y);
    const kernel::Shape shk{&spk, z[0], P.L0() + z[1] - z[0]};
    kernel::Piecewise wb = local_trace(field, z_offset);
    const double ck = kernel::coupling(shk, wb, nullptr);
    P.set_surrogate(std::move(wb), field.energy(), ck);
    Vec g;
    P.value(z, &g);
    const auto [res, lam] = P.stationarity(z, g);
    nw.residual = res;
    nw.lambda = lam;
    if (res <= cfg.tol_opt || !moved) break;
  }
  if (elastic && outer >= ctx.max_outer)
    throw StepError(StepFailure::iteration_budget, "minimize_step: elasticity alternation did not settle",
                    to_profile(prev, P, z));

  StepResult r;
  r.profile = to_profile(prev, P, z);
  r.field = elastic ? field : solve_field(r.profile, cfg, ctx);
  r.da = z[0];
  r.db = z[1];
  r.iterations = total_iters;
  r.outer_iterations = outer + 1;
  r.opt_residual = nw.residual;
  r.area_multiplier = nw.lambda;

  const kernel::Shape cur{&r.profile.spline(), r.da, r.profile.length()};
  r.energies.surface = kernel::surface(cur, cfg, nullptr);
  r.energies.elastic = r.field.energy();
  r.energies.metric = kernel::metric_bulk(cur, prev_shape, cfg.tau, nullptr) +
                      cfg.sigma0 / (2.0 * cfg.tau) * (r.da * r.da + r.db * r.db);
  r.energies.total = r.energies.surface + r.energies.elastic + r.energies.metric;
  if (r.energies.total > f_prev) {
    // prev itself is the better competitor.
    r.profile = prev;
    r.field = prev_field;
    r.da = r.db = 0.0;
    r.energies.surface = s_prev;
    r.energies.elastic = prev_field.energy();
    r.energies.metric = 0.0;
    r.energies.total = f_prev;
  }
  r.energies.a0 = r.profile.alpha() + 0.25 * r.profile.length();
  r.energies.b0 = r.profile.alpha() + 0.75 * r.profile.length();

  LocalState ls{{&r.profile.spline(), r.da, r.profile.length()}, prev_shape, local_trace(r.field, r.da), r.da, r.db};
  const double L = r.profile.length();
  r.m = compute_multiplier(ls, cfg, Bump(r.da + 0.25 * L, r.da + 0.75 * L));
  if (ctx.compute_residuals) r.residuals = el_residual(ls, r.m, cfg);
  r.b_tau = 1.0 + kernel::metric_l1(ls.cur, prev_shape, cfg.tau) + (std::abs(r.da) + std::abs(r.db)) / cfg.tau;
  r.mass_error = std::abs(r.profile.area() - cfg.area0) / cfg.area0;
  r.lip_margin = cfg.lip0 - r.profile.lipschitz();
  {
    double v = 0.0;
    const int n = r.profile.intervals();
    for (int j = 0; j <= n; ++j) {
      for (const double X : {ls.cur.node(j), prev_shape.node(j)}) {
        const double xi = ls.cur.xi(X), xi0 = prev_shape.xi(X);
        const double h = (xi >= 0.0 && xi <= 1.0) ? ls.cur.spline->value(xi) : 0.0;
        const double h0 = (xi0 >= 0.0 && xi0 <= 1.0) ? prev_shape.spline->value(xi0) : 0.0;
        v = std::max(v, std::abs(h - h0) / cfg.tau);
      }
    }
    r.max_velocity = v;
  }
  ctx.prev_field = r.field;
  return r;
}

}  // namespace dewet
