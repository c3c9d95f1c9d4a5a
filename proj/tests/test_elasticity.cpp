#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dewet/elasticity.hpp"
#include "dewet/energy.hpp"
#include "oracles.hpp"

using namespace dewet;

namespace {

bool pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

std::vector<double> field_of(const DomainMesh& m, double (*fx)(double, double), double (*fy)(double, double)) {
  std::vector<double> v(m.dofs());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    v[2 * i] = fx(m.nodes[i][0], m.nodes[i][1]);
    v[2 * i + 1] = fy(m.nodes[i][0], m.nodes[i][1]);
  }
  return v;
}

}  // namespace

TEST_CASE("mesh counts are powers of two and double when the target halves") {
  SimConfig c;
  const Profile p = shapes::quartic_cap(1.0, 1.0, 64);
  c.mesh_target = 0.1;
  const MeshTopology a = mesh_topology(p, c);
  c.mesh_target = 0.05;
  const MeshTopology b = mesh_topology(p, c);
  CHECK(pow2(a.columns));
  CHECK(pow2(a.layers));
  CHECK(b.columns == 2 * a.columns);
  CHECK(b.layers == 2 * a.layers);
  CHECK(a.corner_cells > 0);
  c.mesh_target = 100.0;
  const MeshTopology coarse = mesh_topology(p, c);
  CHECK(coarse.columns >= 4);
  CHECK(coarse.layers >= 2);
}

TEST_CASE("mesh geometry: positive Jacobians, substrate on y = 0, graph nodes on the profile") {
  const SimConfig c;
  const Profile p = shapes::quartic_cap(1.0, 1.0, 64, 0.4);
  const DomainMesh m = build_mesh(p, c);
  CHECK(m.min_jacobian() > 0.0);
  CHECK(m.origin == p.alpha());
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    if (m.on_substrate[i]) CHECK(m.nodes[i][1] == 0.0);
  double last = -1.0;
  for (int g : m.graph_nodes) {
    const double x = m.nodes[g][0];
    CHECK(x > last);
    last = x;
    CHECK(m.nodes[g][1] == doctest::Approx(extend_by_zero(p, x + m.origin)).epsilon(1e-12).scale(1.0));
  }
  CHECK(m.max_bulk_diameter() < 2.0 * c.mesh_target);
}

TEST_CASE("uniform extension measures the domain area; rigid motions carry no energy") {
  SimConfig c;
  c.mesh_target = 0.05;
  const Profile p = shapes::quartic_cap(1.0, 1.0, 64);
  const DomainMesh m = build_mesh(p, c);
  const double lambda = 1.3, mu = 0.7;
  const auto stretch = field_of(m, [](double x, double) { return x; }, [](double, double) { return 0.0; });
  const double area = elastic_energy_of(m, stretch, lambda, mu) / (mu + 0.5 * lambda);
  CHECK(area == doctest::Approx(oracle::spline_area(p)).epsilon(1e-5));
  const auto rot = field_of(m, [](double, double y) { return -y; }, [](double x, double) { return x; });
  CHECK(elastic_energy_of(m, rot, lambda, mu) < 1e-24);
  const auto shift = field_of(m, [](double, double) { return 0.3; }, [](double, double) { return -0.2; });
  CHECK(elastic_energy_of(m, shift, lambda, mu) < 1e-24);
}

TEST_CASE("zero misfit gives an identically zero field") {
  SimConfig c;
  c.e0 = 0.0;
  const Profile p = shapes::circular_cap(1.0, 0.9, 64);
  const DisplacementField u = solve_equilibrium(build_mesh(p, c), c);
  for (double v : u.local_dofs()) CHECK(v == 0.0);
  CHECK(u.energy() == 0.0);
  for (std::size_t i = 0; i < u.mesh().nodes.size(); ++i) CHECK(u.displacement(static_cast<int>(i))[0] == 0.0);
}

TEST_CASE("strained island: bound, Galerkin residual and refinement") {
  SimConfig c;
  c.e0 = 0.05;
  const Profile p = shapes::quartic_cap(1.0, c.area0, 64);
  std::vector<double> E;
  for (double t : {0.2, 0.1, 0.05}) {
    c.mesh_target = t;
    const DisplacementField u = solve_equilibrium(build_mesh(p, c), c);
    CHECK(u.solve_residual() <= c.tol_lin);
    CHECK(galerkin_residual(u) <= 1e-9);
    CHECK(u.energy() > 0.0);
    CHECK(u.energy() <= 0.5 * (2 * c.mu + c.lambda) * c.e0 * c.e0 * c.area0);
    CHECK(korn_ratio(u, c) > 0.0);
    E.push_back(u.energy());
  }
  CHECK(std::abs(E[2] - E[1]) <= 0.5 * std::abs(E[1] - E[0]));
}

TEST_CASE("stored field is translation invariant; displacement adds the rigid part") {
  SimConfig c;
  const Profile p = shapes::quartic_cap(1.0, 1.0, 32);
  const double s = 0.45;
  const DisplacementField a = solve_equilibrium(build_mesh(p, c), c);
  const DisplacementField b = solve_equilibrium(build_mesh(p.translated(s), c), c);
  CHECK(a.local_dofs() == b.local_dofs());
  CHECK(a.energy() == b.energy());
  const int i = a.mesh().graph_nodes[3];
  CHECK(b.displacement(i)[0] - a.displacement(i)[0] == doctest::Approx(c.e0 * s).epsilon(1e-12));
}

TEST_CASE("surface trace is symmetric for a symmetric island") {
  const SimConfig c;
  const Profile p = shapes::quartic_cap(1.0, 1.0, 64);
  const DisplacementField u = solve_equilibrium(build_mesh(p, c), c);
  const auto [x, w] = u.surface_trace();
  REQUIRE(x.size() == w.size());
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(x[k] + x[n - 1 - k] == doctest::Approx(p.length()).epsilon(1e-12));
    CHECK(w[k] == doctest::Approx(w[n - 1 - k]).epsilon(1e-8));
  }
  const auto nodal = boundary_trace_energy(u, p);
  CHECK(nodal.size() == static_cast<std::size_t>(p.intervals() + 1));
}

TEST_CASE("mesh construction rejects a pinched interior") {
  const Profile p = shapes::quartic_cap(1.0, 1.0, 32);
  auto y = p.nodes();
  y[16] = 0.0;
  CHECK_THROWS_AS(build_mesh(Profile(p.alpha(), p.beta(), y), SimConfig{}), std::domain_error);
}

TEST_CASE("field text output lists nodes then triangles") {
  const SimConfig c;
  const Profile p = shapes::quartic_cap(1.0, 1.0, 16);
  const DisplacementField u = solve_equilibrium(build_mesh(p, c), c);
  std::ostringstream os;
  write_field(os, u);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# nodes=", 0) == 0);
  std::size_t rows = 0, tris = 0;
  while (std::getline(in, line)) (line.rfind("tri ", 0) == 0 ? tris : rows)++;
  CHECK(rows == u.mesh().nodes.size());
  CHECK(tris == u.mesh().triangles.size());
}

TEST_CASE("solution beats random competitors with the same substrate data") {
  const SimConfig c;
  const Profile p = shapes::quartic_cap(1.0, 1.0, 32);
  const DisplacementField u = solve_equilibrium(build_mesh(p, c), c);
  const DomainMesh& m = u.mesh();
  CHECK(elastic_energy_of(m, u.local_dofs(), c.lambda, c.mu) == doctest::Approx(u.energy()).epsilon(1e-12));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 5; ++k) {
    auto v = u.local_dofs();
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
      if (!m.on_substrate[i]) {
        v[2 * i] += 1e-3 * U(rng);
        v[2 * i + 1] += 1e-3 * U(rng);
      }
    CHECK(elastic_energy_of(m, v, c.lambda, c.mu) > u.energy());
  }
}

TEST_CASE("energy decreases and settles across mesh halvings") {
  SimConfig c;
  const Profile p = shapes::quartic_cap(1.0, c.area0, 64);
  double last = 1e300;
  for (double t : {0.2, 0.1, 0.05, 0.025}) {
    c.mesh_target = t;
    const double e = solve_equilibrium(build_mesh(p, c), c).energy();
    CHECK(e <= last);
    last = e;
  }
}
