#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "dewet/config.hpp"
#include "dewet/profile.hpp"
#include "dewet/quadrature.hpp"
#include "dewet/spline.hpp"
#include "oracles.hpp"

using namespace dewet;

namespace {

std::string replace_line(const std::string& text, const std::string& key, const std::string& line) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string l;
  while (std::getline(in, l)) out << (l.rfind(key + " =", 0) == 0 ? line : l) << '\n';
  return out.str();
}

}  // namespace

TEST_CASE("default config validates and round-trips through text") {
  const SimConfig c;
  CHECK_NOTHROW(c.validate());
  const SimConfig back = parse_config_text(format_config(c));
  CHECK(back == c);

  SimConfig odd;
  odd.tau = 1.0 / 3.0;
  odd.nu0 = std::nextafter(0.01, 1.0);
  CHECK(parse_config_text(format_config(odd)) == odd);
}

TEST_CASE("config parse errors name the key") {
  const std::string good = format_config(SimConfig{});
  auto key_of = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of(good + "bogus = 1\n") == "bogus");
  CHECK(key_of(good + "tau = 0.5\n") == "tau");
  CHECK(key_of(replace_line(good, "mu", "# mu removed")) == "mu");
  CHECK(key_of(replace_line(good, "tau", "tau = 0")) == "tau");
  CHECK(key_of(replace_line(good, "n_profile", "n_profile = 12.5")) == "n_profile");
  CHECK(key_of(replace_line(good, "e0", "e0 = abc")) == "e0");

  try {
    parse_config_text(replace_line(good, "gamma0", "gamma0 = 1.5"));
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "gamma0");
    CHECK(std::string(e.what()).find("γ > γ₀") != std::string::npos);
  }
}

TEST_CASE("comments and blank lines are ignored") {
  const std::string text = "# header\n\n" + format_config(SimConfig{}) + "   # trailing\n";
  CHECK(parse_config_text(text) == SimConfig{});
}

TEST_CASE("gauss rules integrate monomials up to degree 2n-1 exactly") {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule g = gauss_rule(n);
    REQUIRE(g.nodes.size() == static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int q = 0; q < n; ++q) s += g.weights[q] * std::pow(g.nodes[q], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS(gauss_rule(0));
  CHECK_THROWS(gauss_rule(13));
}

TEST_CASE("natural spline interpolates with C2 joins and free ends") {
  std::vector<double> y(17);
  for (int j = 0; j <= 16; ++j) y[j] = std::sin(3.0 * j / 16.0) + 0.1 * j;
  const UniformSpline s(y);
  for (int j = 0; j <= 16; ++j) CHECK(s.value(j / 16.0) == doctest::Approx(y[j]).epsilon(1e-14));
  for (int j = 1; j < 16; ++j) {
    const auto l = s.eval({j - 1, 1.0}), r = s.eval({j, 0.0});
    CHECK(l[1] == doctest::Approx(r[1]).epsilon(1e-12));
    CHECK(l[2] == doctest::Approx(r[2]).epsilon(1e-12));
  }
  CHECK(std::abs(s.eval({0, 0.0})[2]) < 1e-12);
  CHECK(std::abs(s.eval({15, 1.0})[2]) < 1e-12);
}

TEST_CASE("spline integral and weights agree with piecewise Simpson") {
  std::vector<double> y(33);
  for (int j = 0; j <= 32; ++j) y[j] = std::exp(-j / 10.0) * (1 + 0.3 * std::cos(j));
  const UniformSpline s(y);
  double simpson = 0.0;
  for (int j = 0; j < 32; ++j) {
    const double a = j / 32.0, b = (j + 1) / 32.0;
    simpson += (b - a) / 6.0 * (s.value(a) + 4 * s.value(0.5 * (a + b)) + s.value(b));
  }
  CHECK(s.integral() == doctest::Approx(simpson).epsilon(1e-14));
  const auto& w = spline_integral_weights(32);
  double dot = 0.0;
  for (int j = 0; j <= 32; ++j) dot += w[j] * y[j];
  CHECK(dot == doctest::Approx(simpson).epsilon(1e-14));
}

TEST_CASE("max slope bound matches dense sampling") {
  std::vector<double> y(21);
  for (int j = 0; j <= 20; ++j) y[j] = std::sin(7.0 * j / 20.0);
  const UniformSpline s(y);
  double sampled = 0.0;
  for (int k = 0; k <= 200000; ++k) {
    const double xi = k / 200000.0;
    sampled = std::max(sampled, std::abs(s.eval(s.locate(xi))[1]));
  }
  CHECK(s.max_abs_slope() >= sampled - 1e-12);
  CHECK(s.max_abs_slope() == doctest::Approx(sampled).epsilon(1e-6));
}

TEST_CASE("spline adjoint is the transpose of the derivative map") {
  const int n = 12;
  std::vector<double> y(n + 1);
  for (int j = 0; j <= n; ++j) y[j] = 0.3 + std::cos(1.3 * j);
  // G(y) = a s(xi1) + b s'(xi2) + c s''(xi3).
  const double a = 0.7, b = -1.1, c = 0.4;
  const UniformSpline s0(y);
  const auto p1 = s0.locate(0.23), p2 = s0.locate(0.61), p3 = s0.locate(0.87);
  auto G = [&](const std::vector<double>& v) {
    const UniformSpline s(v);
    return a * s.eval(p1)[0] + b * s.eval(p2)[1] + c * s.eval(p3)[2];
  };
  SplineAdjoint adj(n);
  adj.add(p1, a, 0, 0);
  adj.add(p2, 0, b, 0);
  adj.add(p3, 0, 0, c);
  std::vector<double> dy(n + 1, 0.0);
  adj.pull_back(dy);
  for (int j = 0; j <= n; ++j) {
    auto yp = y, ym = y;
    yp[j] += 1e-6;
    ym[j] -= 1e-6;
    CHECK(dy[j] == doctest::Approx((G(yp) - G(ym)) / 2e-6).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("profile constructors hit the requested area") {
  const Profile q = shapes::quartic_cap(0.8, 1.3, 64, 0.2);
  CHECK(q.alpha() == doctest::Approx(-0.6));
  CHECK(q.beta() == doctest::Approx(1.0));
  CHECK(oracle::spline_area(q) == doctest::Approx(1.3).epsilon(1e-14));
  const Profile c = shapes::circular_cap(2.0, 0.9, 64);
  CHECK(oracle::spline_area(c) == doctest::Approx(2.0).epsilon(1e-14));
  const Profile s = scale_to_area(shapes::parabolic_cap(1.0, 0.5, 32), 0.9);
  CHECK(oracle::spline_area(s) == doctest::Approx(0.9).epsilon(1e-14));
  const Profile t = shift_to_area(shapes::parabolic_cap(1.0, 0.5, 32), 0.9);
  CHECK(oracle::spline_area(t) == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("parabolic cap: area converges to 4cw/3 and interior curvature is -2c") {
  double prev_err = 1.0;
  for (int n : {16, 32, 64, 128}) {
    const Profile p = shapes::parabolic_cap(1.5, 0.4, n);
    const double err = std::abs(p.area() - 4.0 * 0.4 * 1.5 / 3.0);
    CHECK(err < prev_err);
    prev_err = err;
    // Natural end conditions force h'' = 0 at the contacts; the interior is exact away from them.
    CHECK(eval_derivatives(p, 0.0, 2) == doctest::Approx(-2.0 * 0.4 / (1.5 * 1.5)).epsilon(40.0 / (n * n)));
  }
  CHECK(prev_err < 1e-4);
}

TEST_CASE("admissibility report flags each violation") {
  const SimConfig cfg;
  const Profile good = shapes::quartic_cap(1.0, cfg.area0, 64);
  CHECK(validate_admissible(good, cfg).ok());

  auto nodes = good.nodes();
  nodes[10] = -0.01;
  const Profile neg(good.alpha(), good.beta(), nodes);
  const auto r1 = validate_admissible(neg, cfg);
  CHECK_FALSE(r1.ok());
  CHECK_FALSE(r1.find("nonnegative")->passed);

  nodes = good.nodes();
  nodes[0] = 0.01;
  CHECK_FALSE(validate_admissible(Profile(good.alpha(), good.beta(), nodes), cfg).find("endpoints")->passed);

  const Profile steep = shapes::quartic_cap(0.2, cfg.area0, 64);
  CHECK_FALSE(validate_admissible(steep, cfg).find("lipschitz")->passed);

  SimConfig other = cfg;
  other.area0 = 2.0;
  CHECK_FALSE(validate_admissible(good, other).find("area")->passed);
}

TEST_CASE("zero extension and derivative domain") {
  const Profile p = shapes::quartic_cap(1.0, 1.0, 32);
  CHECK(extend_by_zero(p, -1.5) == 0.0);
  CHECK(extend_by_zero(p, 1.0000001) == 0.0);
  CHECK(extend_by_zero(p, 0.0) > 0.0);
  CHECK_THROWS_AS(eval_derivatives(p, 1.2, 1), std::domain_error);
  CHECK_THROWS_AS(eval_derivatives(p, 0.0, 4), std::domain_error);
  CHECK(eval_derivatives(p, 0.0, 1) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("translation keeps length and nodes bit-identical, mirroring reverses them") {
  const Profile p = shapes::quartic_cap(1.0, 1.0, 32, 0.1);
  const Profile t = p.translated(0.37);
  CHECK(t.length() == p.length());
  CHECK(t.nodes() == p.nodes());
  CHECK(t.alpha() == p.alpha() + 0.37);
  const Profile m = p.mirrored(0.0);
  CHECK(m.alpha() == doctest::Approx(-p.beta()));
  for (int j = 0; j <= 32; ++j) CHECK(m.nodes()[j] == p.nodes()[32 - j]);
}

TEST_CASE("profile text form round-trips exactly") {
  const Profile p = shapes::circular_cap(1.0, 0.8, 48, -0.3);
  std::stringstream ss;
  write_profile(ss, p);
  const Profile q = read_profile(ss);
  CHECK(q.alpha() == p.alpha());
  CHECK(q.length() == p.length());
  CHECK(q.nodes() == p.nodes());
  std::stringstream bad("# nothing useful\n1 2\n");
  CHECK_THROWS(read_profile(bad));
}

TEST_CASE("resampling preserves a smooth profile closely") {
  const Profile p = shapes::quartic_cap(1.0, 1.0, 128);
  const Profile r = shapes::resample(p, 64);
  CHECK(r.intervals() == 64);
  CHECK(oracle::l2_distance(p, r) < 1e-5);
}

TEST_CASE("circular cap contact slope matches the angle") {
  const double theta = std::numbers::pi / 3;
  const Profile c = shapes::circular_cap(1.0, theta, 256);
  // The natural spline bends the cap near the ends only at O(d^2).
  CHECK(eval_derivatives(c, c.alpha(), 1) == doctest::Approx(std::tan(theta)).epsilon(2e-2));
}
