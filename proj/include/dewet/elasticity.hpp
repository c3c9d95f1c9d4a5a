#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "dewet/config.hpp"
#include "dewet/profile.hpp"

namespace dewet {

/// Counts that fix the mesh connectivity.
struct MeshTopology {
  int columns = 0;       ///< uniform cells across [alpha, beta] before corner grading
  int layers = 0;        ///< cells in the vertical direction
  int corner_cells = 0;  ///< geometric sub-cells replacing each end cell
  double ratio = 1.0;    ///< width ratio between neighbouring corner sub-cells
  bool operator==(const MeshTopology&) const = default;
};

MeshTopology mesh_topology(const Profile& p, const SimConfig& cfg);

enum class EdgeTag : unsigned char { none, substrate, graph };

/// Quadratic triangulation of the film region. Vertices come first in
/// column-major order, then edge midpoints. x is relative to `origin`.
struct DomainMesh {
  double origin = 0.0;
  MeshTopology topology;
  std::vector<double> xi_columns;
  int vertex_count = 0;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 6>> triangles;  ///< v0 v1 v2 m01 m12 m20, counterclockwise

  struct Edge {
    int a, b, mid;
    EdgeTag tag;
  };
  std::vector<Edge> boundary_edges;
  std::vector<char> on_substrate;  ///< per node
  std::vector<int> graph_nodes;    ///< nodes on the free surface ordered by x
  double corner_radius = 0.0;      ///< flattening radius used for grading metadata

  std::size_t dofs() const { return 2 * nodes.size(); }
  /// Largest vertex-to-vertex distance over elements whose columns lie in the uniform part.
  double max_bulk_diameter() const;
  /// Smallest element Jacobian determinant over quadrature points.
  double min_jacobian() const;
};

/// Throws std::domain_error unless h'(alpha) > 0 and h'(beta) < 0.
DomainMesh build_mesh(const Profile& p, const SimConfig& cfg);
DomainMesh build_mesh(const Profile& p, const MeshTopology& topology);

class ElasticSolveError : public std::runtime_error {
public:
  ElasticSolveError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

/// Solved displacement. Values are stored relative to the rigid shift e0*origin.
class DisplacementField {
public:
  DisplacementField() = default;
  DisplacementField(std::shared_ptr<const DomainMesh> mesh, std::vector<double> local_dofs, double e0,
                    double lambda, double mu, double residual);

  const DomainMesh& mesh() const { return *mesh_; }
  bool empty() const { return !mesh_; }
  const std::vector<double>& local_dofs() const { return dofs_; }
  /// Displacement at node i including the rigid part e0*origin.
  std::array<double, 2> displacement(int i) const;
  double solve_residual() const { return residual_; }
  double energy() const { return energy_; }
  double e0() const { return e0_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Surface energy density at graph nodes, as (x relative to origin, W).
  std::pair<std::vector<double>, std::vector<double>> surface_trace() const;

private:
  std::shared_ptr<const DomainMesh> mesh_;
  std::vector<double> dofs_;
  double e0_ = 0.0, lambda_ = 1.0, mu_ = 1.0, residual_ = 0.0, energy_ = 0.0;
};

/// Zero-displacement field on the mesh (used when e0 = 0).
DisplacementField zero_field(std::shared_ptr<const DomainMesh> mesh, const SimConfig& cfg);

DisplacementField solve_equilibrium(const DomainMesh& mesh, const SimConfig& cfg);
DisplacementField solve_equilibrium(std::shared_ptr<const DomainMesh> mesh, const SimConfig& cfg);

/// int W(E v) for nodal values v (local convention).
double elastic_energy_of(const DomainMesh& mesh, const std::vector<double>& local_dofs, double lambda, double mu);
/// K v - f restricted to free dofs, divided by ||K|| ||v||.
double galerkin_residual(const DisplacementField& u);

/// W at each profile node, interpolated linearly from the graph-node trace.
std::vector<double> boundary_trace_energy(const DisplacementField& u, const Profile& p);

/// int |grad u|^2 / (int |E u|^2 + e0^2 area0).
double korn_ratio(const DisplacementField& u, const SimConfig& cfg);

/// Table `x y u1 u2` per node, then `tri` rows of six node indices.
void write_field(std::ostream& os, const DisplacementField& u);

}  // namespace dewet
