#pragma once

#include "ubn/types.hpp"

#include <Eigen/Core>

#include <array>
#include <map>
#include <span>
#include <vector>

namespace ubn {

enum class NodeClass { Interior, Neumann, Dirichlet };

/// A (d-1)-simplex on the boundary. `nodes` holds d valid entries.
struct BoundaryFacet {
  std::array<int, 3> nodes{-1, -1, -1};
  int element = -1;  // the single element owning this facet
  int local = -1;    // local vertex index in `element` opposite the facet
  int tag = 0;       // surface group
};

/// Undeformed simplex mesh (triangles for dim 2, tetrahedra for dim 3).
///
/// Node markers follow the Triangle convention: marker 0 means the node is
/// not constrained, any nonzero marker classifies the node as Dirichlet and
/// names its boundary group. Elements are reordered on construction so every
/// reference signed volume is positive. Immutable after construction.
class ReferenceMesh {
 public:
  ReferenceMesh() = default;

  /// `coords` is dim x n; `connectivity` holds dim+1 node indices per element.
  ReferenceMesh(int dim, Eigen::MatrixXd coords, std::vector<int> connectivity,
                std::vector<int> node_markers);

  int dim() const { return dim_; }
  int num_nodes() const { return static_cast<int>(coords_.cols()); }
  int num_elements() const { return static_cast<int>(elements_.size()) / (dim_ + 1); }
  int nodes_per_element() const { return dim_ + 1; }

  const Eigen::MatrixXd& coords() const { return coords_; }
  auto node(int i) const { return coords_.col(i); }

  std::span<const int> element(int e) const {
    return {elements_.data() + static_cast<std::size_t>(e) * (dim_ + 1),
            static_cast<std::size_t>(dim_ + 1)};
  }
  const std::vector<int>& connectivity() const { return elements_; }

  int marker(int node) const { return markers_[node]; }
  const std::vector<int>& markers() const { return markers_; }
  NodeClass node_class(int node) const { return classes_[node]; }
  bool is_dirichlet(int node) const { return classes_[node] == NodeClass::Dirichlet; }

  const std::vector<BoundaryFacet>& boundary_facets() const { return facets_; }

  /// Reference measure (area or volume), always positive.
  double reference_volume(int e) const { return volumes_[e]; }

  /// Columns are the constant gradients of the d+1 linear shape functions
  /// with respect to reference coordinates (dim x (dim+1)).
  const Eigen::Matrix<double, 3, 4>& shape_gradients(int e) const { return gradients_[e]; }

  /// Elements incident to each node.
  const std::vector<std::vector<int>>& node_elements() const { return node_elements_; }

 private:
  void build_();

  int dim_ = 2;
  Eigen::MatrixXd coords_;
  std::vector<int> elements_;
  std::vector<int> markers_;
  std::vector<NodeClass> classes_;
  std::vector<BoundaryFacet> facets_;
  std::vector<double> volumes_;
  std::vector<Eigen::Matrix<double, 3, 4>> gradients_;
  std::vector<std::vector<int>> node_elements_;
};

/// Per-node displacement u = x - X for every node (dim x n). Dirichlet
/// columns carry the active boundary prescription.
struct DisplacementField {
  Eigen::MatrixXd values;

  static DisplacementField zero(const ReferenceMesh& mesh) {
    return {Eigen::MatrixXd::Zero(mesh.dim(), mesh.num_nodes())};
  }
};

/// Prescribed new positions phi0(X). Stored densely (dim x n); only the
/// columns of Dirichlet-classified nodes are meaningful, so the domain of
/// the prescription is exactly the Dirichlet node set.
struct DirichletSpec {
  Eigen::MatrixXd positions;

  /// Identity map: every Dirichlet node stays at its reference position.
  static DirichletSpec identity(const ReferenceMesh& mesh) { return {mesh.coords()}; }
};

/// Dead loads. Body force is rho*b per unit reference volume; tractions are
/// nominal (per unit reference area), keyed by boundary facet tag.
struct LoadSpec {
  Eigen::VectorXd body_force;  // empty means zero
  std::map<int, Eigen::VectorXd> tractions;

  bool is_zero() const;
};

/// Throws ValidationError if a traction references a tag no facet carries
/// or a vector has the wrong dimension.
void validate_loads(const ReferenceMesh& mesh, const LoadSpec& loads);

/// Displacement with interior nodes at zero and Dirichlet nodes at phi0 - X.
DisplacementField initial_displacement(const ReferenceMesh& mesh, const DirichletSpec& bc);

/// Overwrites the Dirichlet columns of `u` with phi0 - X.
void apply_dirichlet(const ReferenceMesh& mesh, const DirichletSpec& bc, DisplacementField& u);

/// Deformed coordinates X + u.
Eigen::MatrixXd deformed_positions(const ReferenceMesh& mesh, const DisplacementField& u);

struct ElementGeometry {
  double signed_volume = 0.0;
  VertexVec altitudes;  // dim+1 signed altitudes, altitude i is opposite vertex i
};

/// Signed measure of a simplex given as columns of `x` (dim x (dim+1)).
double simplex_signed_volume(const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Measure of the facet of simplex `x` opposite local vertex `i`.
double simplex_facet_measure(const Eigen::Ref<const Eigen::MatrixXd>& x, int i);

/// Signed volume and signed altitudes of an element deformed by `u`.
ElementGeometry element_geometry(const ReferenceMesh& mesh, const DisplacementField& u, int e);

/// Same, for an explicit dim x n position matrix.
ElementGeometry element_geometry_at(const ReferenceMesh& mesh, const Eigen::MatrixXd& positions, int e);

/// Deformation gradient of element e for deformed positions `x` (dim x n).
Mat deformation_gradient(const ReferenceMesh& mesh, const Eigen::MatrixXd& x, int e);

/// det(F) of every element.
std::vector<double> element_determinants(const ReferenceMesh& mesh, const Eigen::MatrixXd& positions);

/// Elements whose deformed determinant is <= 0.
std::vector<int> tangled_elements(const ReferenceMesh& mesh, const DisplacementField& u);

}  // namespace ubn
