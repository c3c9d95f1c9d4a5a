#include "dewet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dewet/quadrature.hpp"

namespace dewet {

namespace {

void require_inside(const Profile& p, double x, const char* who) {
  if (!(x >= p.alpha() && x <= p.beta())) throw std::domain_error(std::string(who) + ": x outside [alpha, beta]");
}

double arc_integrand(const Profile& p, double x) {
  const double d = derivatives_at(p, x)[1];
  return std::sqrt(1.0 + d * d);
}

}  // namespace

double slope_factor(const Profile& p, double x) {
  require_inside(p, x, "slope_factor");
  const double d = derivatives_at(p, x)[1];
  return std::sqrt(1.0 + d * d);
}

double curvature(const Profile& p, double x) {
  require_inside(p, x, "curvature");
  const auto d = derivatives_at(p, x);
  const double J = std::sqrt(1.0 + d[1] * d[1]);
  return d[2] / (J * J * J);
}

double arc_length(const Profile& p, double x) {
  require_inside(p, x, "arc_length");
  const int n = p.intervals();
  const double dx = p.length() / n;
  const GaussRule g = gauss_rule(6);
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const double a = p.node_x(j);
    if (a >= x) break;
    const double b = std::min(x, j + 1 == n ? p.beta() : a + dx);
    double part = 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) part += g.weights[q] * arc_integrand(p, a + g.nodes[q] * (b - a));
    s += part * (b - a);
  }
  return s;
}

double x_at_arc_length(const Profile& p, double s) {
  const double total = arc_length(p, p.beta());
  if (!(s >= 0.0 && s <= total)) throw std::domain_error("x_at_arc_length: s outside [0, length]");
  double lo = p.alpha(), hi = p.beta();
  double x = p.alpha() + p.length() * s / total;
  for (int it = 0; it < 100; ++it) {
    const double f = arc_length(p, x) - s;
    if (std::abs(f) <= 1e-15 * std::max(1.0, total)) break;
    if (f > 0.0) hi = x; else lo = x;
    double next = x - f / arc_integrand(p, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

std::pair<double, double> contact_angles(const Profile& p) {
  const double a = derivatives_at(p, p.alpha())[1];
  const double b = derivatives_at(p, p.beta())[1];
  return {std::asin(a / std::sqrt(1.0 + a * a)), std::asin(b / std::sqrt(1.0 + b * b))};
}

std::array<double, 3> corner_sigma(double l, double x, double g, double g1, double g2) {
  const double s = l * x / g;
  const double s1 = l * (g - x * g1) / (g * g);
  const double s2 = l * (-2.0 * g1 / (g * g) - x * g2 / (g * g) + 2.0 * x * g1 * g1 / (g * g * g));
  return {s, s1, s2};
}

std::array<double, 3> CornerMap::sigma(double x) const {
  // g(x): height at distance x from the contact point.
  const double L = profile.length();
  const double dx = L / profile.intervals();
  const double sign = side == Side::left ? 1.0 : -1.0;
  const double xa = side == Side::left ? profile.alpha() + x : profile.beta() - x;
  auto d = derivatives_at(profile, std::clamp(xa, profile.alpha(), profile.beta()));
  const double g1 = sign * d[1], g2 = d[2];
  if (x <= dx) {
    // Exact cubic on the first interval: g = l x + c2 x^2 + c3 x^3.
    const auto e = derivatives_at(profile, side == Side::left ? profile.alpha() : profile.beta());
    const double c2 = 0.5 * e[2], c3 = sign * e[3] / 6.0;
    const double q = l + c2 * x + c3 * x * x;  // g / x
    const double q1 = c2 + 2.0 * c3 * x, q2 = 2.0 * c3;
    const double s = l / q;
    const double s1 = -l * q1 / (q * q);
    const double s2 = l * (2.0 * q1 * q1 / (q * q * q) - q2 / (q * q));
    return {s, s1, s2};
  }
  return corner_sigma(l, x, d[0], g1, g2);
}

std::pair<double, double> CornerMap::flatten(double x, double y) const { return {x, y / sigma(x)[0]}; }
std::pair<double, double> CornerMap::unflatten(double x, double y) const { return {x, y * sigma(x)[0]}; }

CornerMap build_corner_map(const Profile& p, Side side, double r) {
  if (!(r > 0.0 && r <= p.length())) throw std::domain_error("build_corner_map: radius outside (0, beta - alpha]");
  CornerMap c;
  c.side = side;
  c.r = r;
  c.profile = p;
  const double slope = derivatives_at(p, side == Side::left ? p.alpha() : p.beta())[1];
  c.l = side == Side::left ? slope : -slope;
  if (!(c.l > 0.0)) throw std::domain_error("build_corner_map: corner slope must be positive (dewetting regime)");
  const int samples = 256;
  for (int k = 1; k <= samples; ++k) {
    const double x = r * k / samples;
    const auto s = c.sigma(x);
    const double g = extend_by_zero(p, side == Side::left ? p.alpha() + x : p.beta() - x);
    if (!(s[0] >= 0.5 && s[0] <= 1.5))
      throw std::domain_error("build_corner_map: sigma leaves [1/2, 3/2]; radius too large");
    c.x_samples.push_back(x);
    c.sigma_samples.push_back(s[0]);
    c.sigma_dev = std::max(c.sigma_dev, std::abs(s[0] - 1.0));
    c.sigma_d1 = std::max(c.sigma_d1, std::abs(s[1]));
    c.y_sigma_d1 = std::max(c.y_sigma_d1, g * std::abs(s[1]));
    c.y_sigma_d2 = std::max(c.y_sigma_d2, g * std::abs(s[2]));
  }
  return c;
}

double default_corner_radius(const Profile& p) {
  double r = p.length() / 16.0;
  for (int k = 0; k < 30; ++k, r *= 0.5) {
    try {
      build_corner_map(p, Side::left, r);
      build_corner_map(p, Side::right, r);
      return r;
    } catch (const std::domain_error&) {
    }
  }
  throw std::domain_error("default_corner_radius: no radius satisfies the sigma band");
}

}  // namespace dewet
