#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dewet/geometry.hpp"
#include "oracles.hpp"

using namespace dewet;

namespace {

double cap_radius(double area, double theta) { return std::sqrt(area / (theta - std::sin(theta) * std::cos(theta))); }

}  // namespace

TEST_CASE("slope factor and curvature of a parabolic cap away from the ends") {
  const double w = 1.0, c = 0.3;
  const Profile p = shapes::parabolic_cap(w, c, 256);
  for (double x : {-0.5, -0.1, 0.2, 0.6}) {
    const double h1 = -2.0 * c * x / (w * w), h2 = -2.0 * c / (w * w);
    CHECK(slope_factor(p, x) == doctest::Approx(std::sqrt(1 + h1 * h1)).epsilon(1e-6));
    CHECK(curvature(p, x) == doctest::Approx(h2 / std::pow(1 + h1 * h1, 1.5)).epsilon(1e-4));
  }
  CHECK_THROWS_AS(curvature(p, 1.5), std::domain_error);
}

TEST_CASE("circular cap: curvature, arc length and contact angles") {
  const double theta = 0.8, area = 1.0;
  const double R = cap_radius(area, theta);
  const Profile p = shapes::circular_cap(area, theta, 512);
  CHECK(curvature(p, 0.0) == doctest::Approx(-1.0 / R).epsilon(1e-4));
  CHECK(arc_length(p, p.beta()) == doctest::Approx(2.0 * R * theta).epsilon(1e-5));
  const auto [ta, tb] = contact_angles(p);
  CHECK(ta == doctest::Approx(theta).epsilon(1e-2));
  CHECK(tb == doctest::Approx(-theta).epsilon(1e-2));
}

TEST_CASE("arc length of the quartic cap matches independent quadrature of the interpolant") {
  const Profile p = shapes::quartic_cap(1.0, 1.0, 64);
  auto J = [&](double x) {
    const double d = eval_derivatives(p, std::clamp(x, p.alpha(), p.beta()), 1);
    return std::sqrt(1.0 + d * d);
  };
  double ref = 0.0;
  for (int j = 0; j < 64; ++j) ref += oracle::simpson(J, p.node_x(j), j == 63 ? p.beta() : p.node_x(j + 1), 64);
  CHECK(arc_length(p, p.beta()) == doctest::Approx(ref).epsilon(1e-11));
  CHECK(arc_length(p, p.alpha()) == 0.0);
}

TEST_CASE("x_at_arc_length inverts arc_length") {
  const Profile p = shapes::circular_cap(1.0, 1.1, 128, 0.4);
  const double total = arc_length(p, p.beta());
  for (double f : {0.0, 0.05, 0.3, 0.5, 0.77, 1.0}) {
    const double x = x_at_arc_length(p, f * total);
    CHECK(arc_length(p, x) == doctest::Approx(f * total).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(x_at_arc_length(p, 1.01 * total), std::domain_error);
}

TEST_CASE("corner map sigma matches l x / g and stays in its band") {
  const Profile p = shapes::quartic_cap(1.0, 1.0, 64);
  for (Side side : {Side::left, Side::right}) {
    const double r = default_corner_radius(p);
    const CornerMap m = build_corner_map(p, side, r);
    CHECK(m.l > 0.0);
    CHECK(m.sigma_dev < 0.5);
    for (double x : {0.3 * r, 0.7 * r, r}) {
      const double g = extend_by_zero(p, side == Side::left ? p.alpha() + x : p.beta() - x);
      CHECK(m.sigma(x)[0] == doctest::Approx(m.l * x / g).epsilon(1e-10));
      const auto [fx, fy] = m.flatten(x, 0.5 * g);
      const auto [ux, uy] = m.unflatten(fx, fy);
      CHECK(ux == x);
      CHECK(uy == doctest::Approx(0.5 * g).epsilon(1e-15));
    }
    // sigma -> 1 at the corner.
    CHECK(m.sigma(1e-9)[0] == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("corner sigma derivatives agree with finite differences") {
  const Profile p = shapes::circular_cap(1.0, 0.9, 64);
  const CornerMap m = build_corner_map(p, Side::left, default_corner_radius(p));
  const double x = 0.6 * m.r, e = 1e-6 * m.r;
  const auto s = m.sigma(x);
  CHECK(s[1] == doctest::Approx((m.sigma(x + e)[0] - m.sigma(x - e)[0]) / (2 * e)).epsilon(1e-5));
  CHECK(s[2] == doctest::Approx((m.sigma(x + e)[1] - m.sigma(x - e)[1]) / (2 * e)).epsilon(1e-4));
}

TEST_CASE("corner map refuses a vanishing contact slope") {
  std::vector<double> y(33);
  for (int j = 0; j <= 32; ++j) {
    const double s = j / 32.0;
    y[j] = 4.0 * s * s * (1 - s) * (1 - s);
  }
  const Profile flat(-1.0, 1.0, y);
  CHECK_THROWS_AS(build_corner_map(flat, Side::left, 0.1), std::domain_error);
  const Profile p = shapes::quartic_cap(1.0, 1.0, 64);
  CHECK_THROWS_AS(build_corner_map(p, Side::left, 3.0), std::domain_error);
}
