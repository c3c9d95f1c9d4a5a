#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dewet/evolution.hpp"
#include "oracles.hpp"

using namespace dewet;
namespace fs = std::filesystem;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.n_profile = 32;
  c.max_steps = 6;
  return c;
}

const Trajectory& shared_run() {
  static const Trajectory t = [] {
    const SimConfig c = small_config();
    return run(c, shapes::quartic_cap(1.0, c.area0, c.n_profile));
  }();
  return t;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dewet_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("run completes and its ledger passes the checks") {
  const Trajectory& t = shared_run();
  CHECK(t.stop == StopReason::completed);
  REQUIRE(t.ledger.size() == 7);
  const LedgerCheck lc = check_ledger(t);
  CHECK(lc.ok());
  CHECK(lc.min_floor_margin > 0.0);
  double dissipated = 0.0;
  for (std::size_t i = 1; i < t.ledger.size(); ++i) {
    const auto& r = t.ledger[i];
    CHECK(r.S + r.E <= t.ledger[i - 1].S + t.ledger[i - 1].E);
    dissipated += r.T;
    CHECK(r.t == doctest::Approx(i * t.config.tau));
    CHECK(std::abs(oracle::spline_area(t.state(static_cast<int>(i))) - t.config.area0) <= 1e-10);
  }
  CHECK(t.ledger.back().S + t.ledger.back().E + dissipated <= t.ledger.front().S + t.ledger.front().E);
}

TEST_CASE("symmetric data stays symmetric and translated data translates") {
  const Trajectory& a = shared_run();
  for (const auto& r : a.ledger) CHECK(std::abs(r.alpha + r.beta) <= 1e-10);
  const SimConfig c = small_config();
  const double s = 0.37;
  const Trajectory b = run(c, shapes::quartic_cap(1.0, c.area0, c.n_profile).translated(s));
  REQUIRE(b.ledger.size() == a.ledger.size());
  for (std::size_t i = 0; i < a.ledger.size(); ++i) {
    CHECK(b.ledger[i].alpha == doctest::Approx(a.ledger[i].alpha + s).epsilon(1e-13));
    CHECK(b.ledger[i].S == a.ledger[i].S);
    CHECK(b.ledger[i].E == a.ledger[i].E);
    CHECK(b.state(static_cast<int>(i)).nodes() == a.state(static_cast<int>(i)).nodes());
  }
}

TEST_CASE("identical inputs give identical ledgers") {
  const SimConfig c = small_config();
  const Trajectory b = run(c, shapes::quartic_cap(1.0, c.area0, c.n_profile));
  CHECK(format_ledger(b) == format_ledger(shared_run()));
}

TEST_CASE("inadmissible initial data is rejected") {
  const SimConfig c = small_config();
  CHECK_THROWS_AS(run(c, shapes::quartic_cap(1.0, 2.0, c.n_profile)), std::invalid_argument);
  CHECK_THROWS_AS(run(c, shapes::quartic_cap(1.0, c.area0, 16)), std::invalid_argument);
}

TEST_CASE("ledger files round-trip and checksums match an independent CRC") {
  const Trajectory& t = shared_run();
  const fs::path dir = scratch_dir("ledger");
  const auto files = write_trajectory(t, dir.string());
  bool saw_ledger = false;
  for (const auto& f : files) {
    const std::string data = slurp(dir / f.path);
    CHECK(data.size() == f.bytes);
    CHECK(oracle::crc32(data) == f.crc32);
    CHECK(file_crc32((dir / f.path).string()) == f.crc32);
    saw_ledger = saw_ledger || f.path == "ledger.csv";
  }
  CHECK(saw_ledger);
  const auto rows = read_ledger((dir / "ledger.csv").string());
  REQUIRE(rows.size() == t.ledger.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(ledger_values(rows[i]) == ledger_values(t.ledger[i]));
  CHECK(oracle::crc32("123456789") == 0xCBF43926u);
  fs::remove_all(dir);
}

TEST_CASE("interpolants agree with the states at the knots") {
  const Trajectory& t = shared_run();
  const Interpolants I(t);
  const double tau = t.config.tau;
  for (int i = 0; i < t.states(); ++i) {
    CHECK(I.alpha_linear(i * tau) == doctest::Approx(t.state(i).alpha()).epsilon(1e-14));
    CHECK(I.alpha_constant(i * tau) == doctest::Approx(t.state(i).alpha()).epsilon(1e-14));
    CHECK(I.l2_distance(i * tau, i * tau) == 0.0);
  }
  // Midpoint of the linear interpolant and right value of the constant one.
  const double tm = 2.5 * tau;
  CHECK(I.beta_linear(tm) == doctest::Approx(0.5 * (t.state(2).beta() + t.state(3).beta())).epsilon(1e-14));
  CHECK(I.beta_constant(tm) == t.state(3).beta());
  CHECK(I.h_linear(tm, 0.1) ==
        doctest::Approx(0.5 * (extend_by_zero(t.state(2), 0.1) + extend_by_zero(t.state(3), 0.1))).epsilon(1e-14));
  CHECK(I.l2_distance(0.0, tau) == doctest::Approx(oracle::l2_distance(t.state(0), t.state(1))).epsilon(1e-6));
  CHECK_THROWS_AS(I.alpha_linear(-tau), std::domain_error);
  CHECK_THROWS_AS(I.alpha_linear(2.0 * t.final_time()), std::domain_error);

  double sa = 0.0, sb = 0.0;
  for (int i = 1; i < t.states(); ++i) {
    sa += std::pow(t.state(i).alpha() - t.state(i - 1).alpha(), 2);
    sb += std::pow(t.state(i).beta() - t.state(i - 1).beta(), 2);
  }
  CHECK(I.contact_constant() == doctest::Approx(std::max(sa, sb) / tau).epsilon(1e-12));
  CHECK(I.profile_constant() >= 0.0);
}

TEST_CASE("L2 norm of a combination of profiles") {
  const Profile p = shapes::quartic_cap(1.0, 1.0, 32);
  const Profile q = p.translated(0.2);
  CHECK(l2_norm_of_combination({{1.0, &p}, {-1.0, &p}}) == 0.0);
  CHECK(l2_norm_of_combination({{1.0, &p}, {-1.0, &q}}) == doctest::Approx(oracle::l2_distance(p, q)).epsilon(1e-6));
}

TEST_CASE("refinement study reports one difference per pair of step sizes") {
  SimConfig c = small_config();
  c.e0 = 0.0;
  const Profile p0 = shapes::quartic_cap(0.8, c.area0, c.n_profile);
  const ConvergenceReport r = refinement_study(c, p0, {8e-3, 4e-3, 2e-3}, 0.016);
  REQUIRE(r.l2_differences.size() == 2);
  REQUIRE(r.orders.size() == 1);
  for (auto s : r.stops) CHECK(s == StopReason::completed);
  CHECK(r.l2_differences[1] < r.l2_differences[0]);
  CHECK(r.orders[0] == doctest::Approx(std::log2(r.l2_differences[0] / r.l2_differences[1])));
}
