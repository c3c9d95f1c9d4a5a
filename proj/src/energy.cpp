#include "dewet/energy.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dewet/elasticity.hpp"
#include "dewet/kernels.hpp"
#include "dewet/quadrature.hpp"

namespace dewet {

namespace kernel {

namespace {
constexpr int kPoints = 5;
// Metric panels move with the contacts; the rule must be accurate enough that
// the moving breaks do not show up in the gradient.
constexpr int kMetricPoints = 10;
}

void Grad::clear() {
  std::fill(dy.begin(), dy.end(), 0.0);
  da = db = 0.0;
}

void Grad::axpy(double s, const Grad& g) {
  for (std::size_t j = 0; j < dy.size(); ++j) dy[j] += s * g.dy[j];
  da += s * g.da;
  db += s * g.db;
}

double Piecewise::operator()(double X) const {
  if (x.empty()) return 0.0;
  if (X <= x.front()) return v.front();
  if (X >= x.back()) return v.back();
  const auto it = std::upper_bound(x.begin(), x.end(), X);
  const std::size_t k = static_cast<std::size_t>(it - x.begin());
  const double t = (X - x[k - 1]) / (x[k] - x[k - 1]);
  return (1.0 - t) * v[k - 1] + t * v[k];
}

std::vector<double> panels(double lo, double hi, std::initializer_list<const Shape*> shapes,
                           const std::vector<double>* extra) {
  std::vector<double> pts;
  pts.push_back(lo);
  pts.push_back(hi);
  for (const Shape* s : shapes) {
    const int n = s->spline->intervals();
    for (int j = 0; j <= n; ++j) {
      const double X = s->node(j);
      if (X > lo && X < hi) pts.push_back(X);
    }
  }
  if (extra)
    for (double X : *extra)
      if (X > lo && X < hi) pts.push_back(X);
  std::sort(pts.begin(), pts.end());
  const double eps = 1e-14 * (hi - lo);
  std::vector<double> out;
  out.reserve(pts.size());
  for (double X : pts)
    if (out.empty() || X - out.back() > eps) out.push_back(X);
  if (out.back() != hi) out.back() = hi;
  return out;
}

double surface(const Shape& s, const SimConfig& cfg, Grad* g, bool bending_only) {
  const UniformSpline& sp = *s.spline;
  const int n = sp.intervals();
  const double L = s.length, d = sp.spacing();
  const double gamma = bending_only ? 0.0 : cfg.gamma, nu = cfg.nu0;
  const GaussRule rule = gauss_rule(kPoints);
  std::optional<SplineAdjoint> adj;
  if (g) adj.emplace(n);
  double sum = 0.0, dL = 0.0;
  for (int j = 0; j < n; ++j) {
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const UniformSpline::Segment seg{j, rule.nodes[q]};
      const auto e = sp.eval(seg);
      const double p = e[1] / L, c = e[2] / (L * L);
      const double J2 = 1.0 + p * p, J = std::sqrt(J2);
      const double J5 = J2 * J2 * J;
      const double val = gamma * J + 0.5 * nu * c * c / J5;
      const double w = rule.weights[q] * d;
      sum += w * val;
      if (g) {
        const double gp = gamma * p / J - 2.5 * nu * c * c * p / (J5 * J2);
        const double gc = nu * c / J5;
        adj->add(seg, 0.0, w * gp, w * gc / L);
        dL += w * (val - p * gp - 2.0 * c * gc);
      }
    }
  }
  const double g0 = bending_only ? 0.0 : cfg.gamma0;
  if (g) {
    dL -= g0;
    adj->pull_back(g->dy);
    g->da -= dL;
    g->db += dL;
  }
  return L * sum - g0 * L;
}

namespace {

template <class F>
void for_points(const std::vector<double>& pan, F&& f, int points = kPoints) {
  const GaussRule rule = gauss_rule(points);
  for (std::size_t k = 0; k + 1 < pan.size(); ++k) {
    const double x0 = pan[k], w = pan[k + 1] - pan[k];
    if (!(w > 0.0)) continue;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) f(x0 + rule.nodes[q] * w, rule.weights[q] * w);
  }
}

// Pushes r * dh/dparams at X into the gradient.
void push(const Shape& s, UniformSpline::Segment seg, double xi, double s1, double r, SplineAdjoint& adj,
          Grad& g) {
  adj.add(seg, r, 0.0, 0.0);
  const double hx = s1 / s.length;
  g.da -= r * (1.0 - xi) * hx;
  g.db -= r * xi * hx;
}

}  // namespace

double metric_bulk(const Shape& cur, const Shape& prev, double tau, Grad* g) {
  const double L0 = prev.length;
  const auto pan = panels(0.0, L0, {&cur, &prev});
  std::optional<SplineAdjoint> adj;
  if (g) adj.emplace(cur.spline->intervals());
  double sum = 0.0;
  for_points(pan, [&](double X, double w) {
    const auto e0 = prev.spline->eval(prev.spline->locate(prev.xi(X)));
    const double d0 = e0[1] / L0;
    const double J0 = std::sqrt(1.0 + d0 * d0);
    const double xi = cur.xi(X);
    double h = 0.0;
    UniformSpline::Segment seg{0, 0.0};
    std::array<double, 4> e{};
    const bool inside = xi >= 0.0 && xi <= 1.0;
    if (inside) {
      seg = cur.spline->locate(xi);
      e = cur.spline->eval(seg);
      h = e[0];
    }
    const double diff = h - e0[0];
    sum += w * diff * diff / (2.0 * tau * J0);
    if (g && inside) push(cur, seg, xi, e[1], w * diff / (tau * J0), *adj, *g);
  }, kMetricPoints);
  if (g) adj->pull_back(g->dy);
  return sum;
}

double metric_l1(const Shape& cur, const Shape& prev, double tau) {
  const double L0 = prev.length;
  auto diff = [&](double X) {
    const double xi = cur.xi(X);
    const double h = (xi >= 0.0 && xi <= 1.0) ? cur.spline->value(xi) : 0.0;
    return h - prev.spline->value(prev.xi(X));
  };
  // |h - h0| has kinks at sign changes; split the panels there.
  const auto base = panels(0.0, L0, {&cur, &prev});
  std::vector<double> pan{base.front()};
  constexpr int probes = 12;
  for (std::size_t k = 0; k + 1 < base.size(); ++k) {
    const double x0 = base[k], x1 = base[k + 1];
    double xl = x0, fl = diff(x0);
    for (int i = 1; i <= probes; ++i) {
      const double xr = x0 + (x1 - x0) * i / probes, fr = diff(xr);
      if ((fl < 0.0) != (fr < 0.0) && fl != 0.0 && fr != 0.0) {
        double a = xl, b = xr, fa = fl;
        for (int it = 0; it < 60 && b - a > 1e-15 * L0; ++it) {
          const double c = 0.5 * (a + b), fc = diff(c);
          if ((fc < 0.0) == (fa < 0.0)) {
            a = c;
            fa = fc;
          } else {
            b = c;
          }
        }
        pan.push_back(0.5 * (a + b));
      }
      xl = xr;
      fl = fr;
    }
    pan.push_back(x1);
  }
  double sum = 0.0;
  for_points(pan, [&](double X, double w) { sum += w * std::abs(diff(X)); });
  return sum / tau;
}

double coupling(const Shape& cur, const Piecewise& wf, Grad* g) {
  const auto pan = panels(cur.offset, cur.offset + cur.length, {&cur}, &wf.x);
  std::optional<SplineAdjoint> adj;
  if (g) adj.emplace(cur.spline->intervals());
  double sum = 0.0;
  for_points(pan, [&](double X, double w) {
    const double xi = cur.xi(X);
    const auto seg = cur.spline->locate(xi);
    const auto e = cur.spline->eval(seg);
    const double W = wf(X);
    sum += w * W * e[0];
    if (g) push(cur, seg, xi, e[1], w * W, *adj, *g);
  });
  if (g) adj->pull_back(g->dy);
  return sum;
}

double l2_distance_sq(const Shape& a, const Shape& b) {
  const double lo = std::min(a.offset, b.offset);
  const double hi = std::max(a.offset + a.length, b.offset + b.length);
  const auto pan = panels(lo, hi, {&a, &b});
  auto h = [](const Shape& s, double X) {
    const double xi = s.xi(X);
    return (xi >= 0.0 && xi <= 1.0) ? s.spline->value(xi) : 0.0;
  };
  double sum = 0.0;
  for_points(pan, [&](double X, double w) {
    const double d = h(a, X) - h(b, X);
    sum += w * d * d;
  });
  return sum;
}

}  // namespace kernel

namespace {

kernel::Shape shape_of(const Profile& p, double offset) { return {&p.spline(), offset, p.length()}; }

}  // namespace

ContactShift contact_shift(const Profile& p, const Profile& prev) {
  const double da = p.alpha() - prev.alpha();
  return {da, da + (p.length() - prev.length())};
}

double surface_energy(const Profile& p, const SimConfig& cfg) {
  return kernel::surface(shape_of(p, 0.0), cfg, nullptr);
}

double bending_energy(const Profile& p, const SimConfig& cfg) {
  return kernel::surface(shape_of(p, 0.0), cfg, nullptr, true);
}

double elastic_density(const Mat2& xi, double lambda, double mu) {
  const double e11 = xi[0][0], e22 = xi[1][1], e12 = 0.5 * (xi[0][1] + xi[1][0]);
  const double tr = e11 + e22;
  return mu * (e11 * e11 + e22 * e22 + 2.0 * e12 * e12) + 0.5 * lambda * tr * tr;
}

DensityBounds density_bounds(double lambda, double mu) {
  // Eigenvalues of the quadratic form on Sym(2) in a Frobenius-orthonormal basis: mu (twice) and mu + lambda.
  const double lo = std::min(mu, mu + lambda), hi = std::max(mu, mu + lambda);
  return {lo, hi, std::max(hi, 1.0 / lo)};
}

double incremental_metric(const Profile& p, const Profile& prev, const SimConfig& cfg) {
  const auto [da, db] = contact_shift(p, prev);
  const double bulk = kernel::metric_bulk(shape_of(p, da), shape_of(prev, 0.0), cfg.tau, nullptr);
  return bulk + cfg.sigma0 / (2.0 * cfg.tau) * (da * da + db * db);
}

double b_tau(const Profile& p, const Profile& prev, const SimConfig& cfg) {
  const auto [da, db] = contact_shift(p, prev);
  return 1.0 + kernel::metric_l1(shape_of(p, da), shape_of(prev, 0.0), cfg.tau) +
         (std::abs(da) + std::abs(db)) / cfg.tau;
}

EnergyBreakdown total_energy(const Profile& p, const Profile& prev, double elastic, const SimConfig& cfg) {
  EnergyBreakdown e;
  e.surface = surface_energy(p, cfg);
  e.elastic = elastic;
  e.metric = incremental_metric(p, prev, cfg);
  e.total = e.surface + e.elastic + e.metric;
  e.a0 = p.alpha() + 0.25 * p.length();
  e.b0 = p.alpha() + 0.75 * p.length();
  return e;
}

EnergyBreakdown total_energy(const Profile& p, const Profile& prev, const DisplacementField& u,
                             const SimConfig& cfg) {
  return total_energy(p, prev, u.energy(), cfg);
}

}  // namespace dewet
