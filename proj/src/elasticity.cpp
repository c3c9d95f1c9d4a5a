#include "dewet/elasticity.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "dewet/energy.hpp"
#include "dewet/geometry.hpp"

namespace dewet {

namespace {

constexpr int kCornerCells = 6;

int pow2_at_least(double v, int floor) {
  int n = floor;
  while (n < v && n < (1 << 20)) n *= 2;
  return n;
}

// Degree-5 seven-point rule on the reference triangle; weights sum to 1/2.
struct TriRule {
  std::array<double, 7> r, s, w;
  TriRule() {
    const double q = std::sqrt(15.0);
    const double a = (6.0 - q) / 21.0, b = (6.0 + q) / 21.0;
    const double wa = (155.0 - q) / 2400.0, wb = (155.0 + q) / 2400.0;
    r = {1.0 / 3.0, a, 1.0 - 2.0 * a, a, b, 1.0 - 2.0 * b, b};
    s = {1.0 / 3.0, a, a, 1.0 - 2.0 * a, b, b, 1.0 - 2.0 * b};
    w = {9.0 / 80.0, wa, wa, wa, wb, wb, wb};
  }
};

const TriRule& tri_rule() {
  static const TriRule t;
  return t;
}

constexpr std::array<std::array<double, 2>, 6> kRefNodes = {
    {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}}};

// P2 shape-function gradients in reference coordinates.
std::array<std::array<double, 2>, 6> p2_grad(double r, double s) {
  const double l1 = 1.0 - r - s, l2 = r, l3 = s;
  const std::array<double, 2> d1{-1.0, -1.0}, d2{1.0, 0.0}, d3{0.0, 1.0};
  std::array<std::array<double, 2>, 6> g;
  for (int c = 0; c < 2; ++c) {
    g[0][c] = (4.0 * l1 - 1.0) * d1[c];
    g[1][c] = (4.0 * l2 - 1.0) * d2[c];
    g[2][c] = (4.0 * l3 - 1.0) * d3[c];
    g[3][c] = 4.0 * (l1 * d2[c] + l2 * d1[c]);
    g[4][c] = 4.0 * (l2 * d3[c] + l3 * d2[c]);
    g[5][c] = 4.0 * (l3 * d1[c] + l1 * d3[c]);
  }
  return g;
}

// Physical gradients of the six shape functions and det J at (r, s).
struct ElementPoint {
  std::array<std::array<double, 2>, 6> grad;
  double det;
};

ElementPoint element_point(const DomainMesh& m, const std::array<int, 6>& t, double r, double s) {
  const auto g = p2_grad(r, s);
  double j00 = 0, j01 = 0, j10 = 0, j11 = 0;  // d(x,y)/d(r,s)
  for (int a = 0; a < 6; ++a) {
    const auto& X = m.nodes[t[a]];
    j00 += X[0] * g[a][0];
    j01 += X[0] * g[a][1];
    j10 += X[1] * g[a][0];
    j11 += X[1] * g[a][1];
  }
  ElementPoint ep;
  ep.det = j00 * j11 - j01 * j10;
  const double i00 = j11 / ep.det, i01 = -j01 / ep.det, i10 = -j10 / ep.det, i11 = j00 / ep.det;
  for (int a = 0; a < 6; ++a) {
    // grad_x N = J^{-T} grad_r N
    ep.grad[a][0] = i00 * g[a][0] + i10 * g[a][1];
    ep.grad[a][1] = i01 * g[a][0] + i11 * g[a][1];
  }
  return ep;
}

// Displacement gradient du_i/dx_j in an element at a point.
Mat2 displacement_gradient(const ElementPoint& ep, const std::array<int, 6>& t, const std::vector<double>& u) {
  Mat2 G{};
  for (int a = 0; a < 6; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) G[i][j] += u[2 * t[a] + i] * ep.grad[a][j];
  return G;
}

void check_regime(const Profile& p) {
  const double la = derivatives_at(p, p.alpha())[1];
  const double lb = derivatives_at(p, p.beta())[1];
  if (!(la > 0.0) || !(lb < 0.0))
    throw std::domain_error("build_mesh: degenerate corner, h'(alpha) must be > 0 and h'(beta) < 0");
  for (int j = 1; j < p.intervals(); ++j)
    if (!(p.nodes()[j] > 0.0)) throw std::domain_error("build_mesh: profile must be positive inside");
}

}  // namespace

MeshTopology mesh_topology(const Profile& p, const SimConfig& cfg) {
  const auto& h = p.nodes();
  const double hmax = *std::max_element(h.begin(), h.end());
  MeshTopology t;
  t.columns = pow2_at_least(p.length() / cfg.mesh_target, 4);
  t.layers = pow2_at_least(hmax / cfg.mesh_target, 2);
  t.ratio = cfg.corner_grading_ratio;
  t.corner_cells = t.ratio < 1.0 ? kCornerCells : 1;
  return t;
}

DomainMesh build_mesh(const Profile& p, const SimConfig& cfg) { return build_mesh(p, mesh_topology(p, cfg)); }

DomainMesh build_mesh(const Profile& p, const MeshTopology& topo) {
  check_regime(p);
  if (topo.columns < 2 || topo.columns % 2 != 0 || topo.layers < 1 || topo.corner_cells < 1)
    throw std::invalid_argument("build_mesh: bad topology");
  DomainMesh m;
  m.origin = p.alpha();
  m.topology = topo;
  const double L = p.length();

  // Column positions in xi, graded inside the two end cells.
  const double d = 1.0 / topo.columns;
  std::vector<double> sub;  // widths from the corner outward
  {
    double total = 0.0;
    for (int k = topo.corner_cells - 1; k >= 0; --k) {
      sub.push_back(std::pow(topo.ratio, k));
      total += sub.back();
    }
    for (auto& w : sub) w *= d / total;
  }
  std::vector<double>& xs = m.xi_columns;
  xs.push_back(0.0);
  for (double w : sub) xs.push_back(xs.back() + w);
  xs.back() = d;
  for (int i = 2; i < topo.columns; ++i) xs.push_back(static_cast<double>(i) / topo.columns);
  {
    const std::size_t left = xs.size();
    for (std::size_t k = sub.size() - 1; k-- > 0;) xs.push_back(1.0 - (xs[k + 1]));
    (void)left;
  }
  // The loop above appends 1 - xs[k] for the graded points; finish with the corner.
  xs.push_back(1.0);
  const int N = static_cast<int>(xs.size()) - 1;
  const int M = topo.layers;

  const UniformSpline& sp = p.spline();
  auto height = [&](double xi) { return sp.value(xi); };

  // Vertices.
  std::vector<std::vector<int>> vid(N + 1, std::vector<int>(M + 1, -1));
  std::vector<std::array<double, 2>> ref;  // (xi, eta) per node; eta unused at corners
  auto add_node = [&](double xi, double eta) {
    m.nodes.push_back({xi * L, eta * height(xi)});
    ref.push_back({xi, eta});
    return static_cast<int>(m.nodes.size()) - 1;
  };
  const int cl = add_node(0.0, 0.0);
  for (int k = 0; k <= M; ++k) vid[0][k] = cl;
  for (int i = 1; i < N; ++i)
    for (int k = 0; k <= M; ++k) vid[i][k] = add_node(xs[i], static_cast<double>(k) / M);
  const int cr = add_node(1.0, 0.0);
  for (int k = 0; k <= M; ++k) vid[N][k] = cr;
  m.nodes.back() = {L, 0.0};
  m.vertex_count = static_cast<int>(m.nodes.size());

  // Edge midpoints, created on first use.
  std::map<std::pair<int, int>, int> mids;
  auto vertex_eta = [&](int v, int other) {
    if (v == cl || v == cr) return ref[other][1];
    return ref[v][1];
  };
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = mids.find(key);
    if (it != mids.end()) return it->second;
    const double xi = 0.5 * (ref[a][0] + ref[b][0]);
    const double eta = 0.5 * (vertex_eta(a, b) + vertex_eta(b, a));
    const int id = add_node(xi, eta);
    mids.emplace(key, id);
    return id;
  };
  auto tri = [&](int a, int b, int c) { m.triangles.push_back({a, b, c, mid(a, b), mid(b, c), mid(c, a)}); };

  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < M; ++k) {
      const int v00 = vid[i][k], v10 = vid[i + 1][k], v01 = vid[i][k + 1], v11 = vid[i + 1][k + 1];
      if (i == 0) {
        tri(cl, v10, v11);
      } else if (i == N - 1) {
        tri(v00, cr, v01);
      } else if (i < N / 2) {
        tri(v00, v10, v11);
        tri(v00, v11, v01);
      } else {
        tri(v00, v10, v01);
        tri(v10, v11, v01);
      }
    }
  }

  // Boundary edges and tags.
  m.on_substrate.assign(m.nodes.size(), 0);
  for (int i = 0; i < N; ++i) {
    const int a = vid[i][0], b = vid[i + 1][0];
    const int md = mids.at(std::minmax(a, b));
    m.boundary_edges.push_back({a, b, md, EdgeTag::substrate});
    m.on_substrate[a] = m.on_substrate[b] = m.on_substrate[md] = 1;
  }
  m.graph_nodes.push_back(cl);
  for (int i = 0; i < N; ++i) {
    const int a = vid[i][M], b = vid[i + 1][M];
    const int md = mids.at(std::minmax(a, b));
    m.boundary_edges.push_back({a, b, md, EdgeTag::graph});
    m.graph_nodes.push_back(md);
    m.graph_nodes.push_back(b);
  }
  m.corner_radius = std::min(xs[topo.corner_cells], 1.0) * L;
  if (m.min_jacobian() <= 0.0) throw std::domain_error("build_mesh: inverted element");
  return m;
}

double DomainMesh::max_bulk_diameter() const {
  double best = 0.0;
  const double lo = xi_columns[topology.corner_cells];
  const double hi = 1.0 - lo;
  const double L = nodes[vertex_count - 1][0];
  for (const auto& t : triangles) {
    bool bulk = true;
    for (int a = 0; a < 3; ++a) {
      const double xi = nodes[t[a]][0] / L;
      if (xi < lo - 1e-12 || xi > hi + 1e-12) bulk = false;
    }
    if (!bulk) continue;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        best = std::max(best, std::hypot(nodes[t[a]][0] - nodes[t[b]][0], nodes[t[a]][1] - nodes[t[b]][1]));
  }
  return best;
}

double DomainMesh::min_jacobian() const {
  const TriRule& q = tri_rule();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : triangles) {
    for (int k = 0; k < 7; ++k) best = std::min(best, element_point(*this, t, q.r[k], q.s[k]).det);
    for (const auto& rn : kRefNodes) best = std::min(best, element_point(*this, t, rn[0], rn[1]).det);
  }
  return best;
}

double elastic_energy_of(const DomainMesh& m, const std::vector<double>& u, double lambda, double mu) {
  const TriRule& q = tri_rule();
  double e = 0.0;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 7; ++k) {
      const auto ep = element_point(m, t, q.r[k], q.s[k]);
      e += q.w[k] * ep.det * elastic_density(displacement_gradient(ep, t, u), lambda, mu);
    }
  }
  return e;
}

DisplacementField::DisplacementField(std::shared_ptr<const DomainMesh> mesh, std::vector<double> local_dofs,
                                     double e0, double lambda, double mu, double residual)
    : mesh_(std::move(mesh)), dofs_(std::move(local_dofs)), e0_(e0), lambda_(lambda), mu_(mu), residual_(residual) {
  energy_ = elastic_energy_of(*mesh_, dofs_, lambda_, mu_);
}

std::array<double, 2> DisplacementField::displacement(int i) const {
  return {dofs_[2 * i] + e0_ * mesh_->origin, dofs_[2 * i + 1]};
}

DisplacementField zero_field(std::shared_ptr<const DomainMesh> mesh, const SimConfig& cfg) {
  std::vector<double> u(mesh->dofs(), 0.0);
  for (std::size_t i = 0; i < mesh->nodes.size(); ++i)
    if (mesh->on_substrate[i]) u[2 * i] = cfg.e0 * mesh->nodes[i][0];
  return DisplacementField(std::move(mesh), std::move(u), cfg.e0, cfg.lambda, cfg.mu, 0.0);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat assemble(const DomainMesh& m, double lambda, double mu) {
  const TriRule& q = tri_rule();
  const double D00 = 2.0 * mu + lambda, D01 = lambda, D22 = mu;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.triangles.size() * 144);
  for (const auto& t : m.triangles) {
    double Ke[12][12] = {};
    for (int k = 0; k < 7; ++k) {
      const auto ep = element_point(m, t, q.r[k], q.s[k]);
      const double w = q.w[k] * ep.det;
      for (int a = 0; a < 6; ++a) {
        const double ax = ep.grad[a][0], ay = ep.grad[a][1];
        for (int b = 0; b < 6; ++b) {
          const double bx = ep.grad[b][0], by = ep.grad[b][1];
          // B_a^T D B_b with B_a = [[ax,0],[0,ay],[ay,ax]].
          Ke[2 * a][2 * b] += w * (ax * D00 * bx + ay * D22 * by);
          Ke[2 * a][2 * b + 1] += w * (ax * D01 * by + ay * D22 * bx);
          Ke[2 * a + 1][2 * b] += w * (ay * D01 * bx + ax * D22 * by);
          Ke[2 * a + 1][2 * b + 1] += w * (ay * D00 * by + ax * D22 * bx);
        }
      }
    }
    for (int a = 0; a < 12; ++a)
      for (int b = 0; b < 12; ++b) trip.emplace_back(2 * t[a / 2] + a % 2, 2 * t[b / 2] + b % 2, Ke[a][b]);
  }
  SpMat K(m.dofs(), m.dofs());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

bool is_fixed(const DomainMesh& m, int dof) { return m.on_substrate[dof / 2] != 0; }

}  // namespace

DisplacementField solve_equilibrium(const DomainMesh& mesh, const SimConfig& cfg) {
  return solve_equilibrium(std::make_shared<const DomainMesh>(mesh), cfg);
}

DisplacementField solve_equilibrium(std::shared_ptr<const DomainMesh> mesh, const SimConfig& cfg) {
  const DomainMesh& m = *mesh;
  DisplacementField base = zero_field(mesh, cfg);
  if (cfg.e0 == 0.0) return base;
  std::vector<double> u = base.local_dofs();
  const SpMat K = assemble(m, cfg.lambda, cfg.mu);
  const int nd = static_cast<int>(m.dofs());
  std::vector<int> map(nd, -1);
  int nf = 0;
  for (int i = 0; i < nd; ++i)
    if (!is_fixed(m, i)) map[i] = nf++;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  for (int c = 0; c < K.outerSize(); ++c) {
    for (SpMat::InnerIterator it(K, c); it; ++it) {
      const int r = static_cast<int>(it.row()), col = static_cast<int>(it.col());
      if (map[r] < 0) continue;
      if (map[col] >= 0) trip.emplace_back(map[r], map[col], it.value());
      else rhs[map[r]] -= it.value() * u[col];
    }
  }
  SpMat Kff(nf, nf);
  Kff.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> solver(Kff);
  if (solver.info() != Eigen::Success) throw ElasticSolveError("solve_equilibrium: factorization failed", 1.0);
  Eigen::VectorXd x = solver.solve(rhs);
  const double bn = rhs.norm();
  double res = bn > 0.0 ? (Kff * x - rhs).norm() / bn : 0.0;
  if (res > cfg.tol_lin) {
    // One step of iterative refinement before giving up.
    x += solver.solve(rhs - Kff * x);
    res = (Kff * x - rhs).norm() / bn;
  }
  if (!(res <= cfg.tol_lin)) {
    std::ostringstream os;
    os << "solve_equilibrium: relative residual " << res << " above tol_lin " << cfg.tol_lin;
    throw ElasticSolveError(os.str(), res);
  }
  for (int i = 0; i < nd; ++i)
    if (map[i] >= 0) u[i] = x[map[i]];
  return DisplacementField(std::move(mesh), std::move(u), cfg.e0, cfg.lambda, cfg.mu, res);
}

double galerkin_residual(const DisplacementField& f) {
  const DomainMesh& m = f.mesh();
  const SpMat K = assemble(m, f.lambda(), f.mu());
  const auto& u = f.local_dofs();
  Eigen::Map<const Eigen::VectorXd> U(u.data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::VectorXd r = K * U;
  double num = 0.0;
  for (int i = 0; i < static_cast<int>(u.size()); ++i)
    if (!is_fixed(m, i)) num += r[i] * r[i];
  const double den = K.norm() * U.norm();
  return den > 0.0 ? std::sqrt(num) / den : 0.0;
}

std::pair<std::vector<double>, std::vector<double>> DisplacementField::surface_trace() const {
  const DomainMesh& m = *mesh_;
  // Strain sums at graph nodes, averaged over the elements containing them.
  std::vector<int> slot(m.nodes.size(), -1);
  for (std::size_t k = 0; k < m.graph_nodes.size(); ++k) slot[m.graph_nodes[k]] = static_cast<int>(k);
  std::vector<Mat2> sum(m.graph_nodes.size(), Mat2{});
  std::vector<int> count(m.graph_nodes.size(), 0);
  for (const auto& t : m.triangles) {
    for (int a = 0; a < 6; ++a) {
      const int s = slot[t[a]];
      if (s < 0) continue;
      const auto ep = element_point(m, t, kRefNodes[a][0], kRefNodes[a][1]);
      const Mat2 G = displacement_gradient(ep, t, dofs_);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) sum[s][i][j] += G[i][j];
      ++count[s];
    }
  }
  std::vector<double> x, w;
  for (std::size_t k = 0; k < m.graph_nodes.size(); ++k) {
    Mat2 G = sum[k];
    for (auto& row : G)
      for (auto& v : row) v /= count[k];
    x.push_back(m.nodes[m.graph_nodes[k]][0]);
    w.push_back(elastic_density(G, lambda_, mu_));
  }
  return {x, w};
}

std::vector<double> boundary_trace_energy(const DisplacementField& u, const Profile& p) {
  const auto [x, w] = u.surface_trace();
  std::vector<double> out(p.intervals() + 1);
  for (int j = 0; j <= p.intervals(); ++j) {
    const double X = p.length() * j / p.intervals();
    const auto it = std::upper_bound(x.begin(), x.end(), X);
    if (it == x.begin()) out[j] = w.front();
    else if (it == x.end()) out[j] = w.back();
    else {
      const std::size_t k = static_cast<std::size_t>(it - x.begin());
      const double t = (X - x[k - 1]) / (x[k] - x[k - 1]);
      out[j] = (1.0 - t) * w[k - 1] + t * w[k];
    }
  }
  return out;
}

double korn_ratio(const DisplacementField& f, const SimConfig& cfg) {
  const DomainMesh& m = f.mesh();
  const TriRule& q = tri_rule();
  double grad2 = 0.0, sym2 = 0.0;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 7; ++k) {
      const auto ep = element_point(m, t, q.r[k], q.s[k]);
      const Mat2 G = displacement_gradient(ep, t, f.local_dofs());
      const double w = q.w[k] * ep.det;
      const double e12 = 0.5 * (G[0][1] + G[1][0]);
      grad2 += w * (G[0][0] * G[0][0] + G[0][1] * G[0][1] + G[1][0] * G[1][0] + G[1][1] * G[1][1]);
      sym2 += w * (G[0][0] * G[0][0] + G[1][1] * G[1][1] + 2.0 * e12 * e12);
    }
  }
  return grad2 / (sym2 + cfg.e0 * cfg.e0 * cfg.area0);
}

void write_field(std::ostream& os, const DisplacementField& f) {
  const DomainMesh& m = f.mesh();
  std::ostringstream o;
  o.imbue(std::locale::classic());
  o << std::setprecision(17);
  o << "# nodes=" << m.nodes.size() << " triangles=" << m.triangles.size() << " origin=" << m.origin << '\n';
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const auto u = f.displacement(static_cast<int>(i));
    o << m.nodes[i][0] + m.origin << ' ' << m.nodes[i][1] << ' ' << u[0] << ' ' << u[1] << '\n';
  }
  for (const auto& t : m.triangles)
    o << "tri " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << ' ' << t[4] << ' ' << t[5] << '\n';
  os << o.str();
}

}  // namespace dewet
