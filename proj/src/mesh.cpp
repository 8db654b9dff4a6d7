#include "ubn/mesh.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ubn {

namespace {

constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0};

}  // namespace

ReferenceMesh::ReferenceMesh(int dim, Eigen::MatrixXd coords, std::vector<int> connectivity,
                             std::vector<int> node_markers)
    : dim_(dim),
      coords_(std::move(coords)),
      elements_(std::move(connectivity)),
      markers_(std::move(node_markers)) {
  if (dim_ != 2 && dim_ != 3) throw ValidationError("mesh dimension must be 2 or 3");
  if (coords_.rows() != dim_) throw ValidationError("coordinate rows do not match mesh dimension");
  if (elements_.size() % (dim_ + 1) != 0)
    throw ValidationError("connectivity length is not a multiple of dim+1");
  if (markers_.empty()) markers_.assign(coords_.cols(), 0);
  if (static_cast<Eigen::Index>(markers_.size()) != coords_.cols())
    throw ValidationError("one marker per node is required");
  build_();
}

void ReferenceMesh::build_() {
  const int n = num_nodes();
  const int ne = num_elements();
  const int nv = dim_ + 1;

  volumes_.resize(ne);
  gradients_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    int* conn = elements_.data() + static_cast<std::size_t>(e) * nv;
    for (int a = 0; a < nv; ++a) {
      if (conn[a] < 0 || conn[a] >= n) {
        std::ostringstream msg;
        msg << "element " << e << " references node " << conn[a] << " outside [0, " << n << ")";
        throw ValidationError(msg.str());
      }
    }
    Eigen::MatrixXd x(dim_, nv);
    for (int a = 0; a < nv; ++a) x.col(a) = coords_.col(conn[a]);
    double vol = simplex_signed_volume(x);
    if (vol == 0.0 || !std::isfinite(vol)) {
      std::ostringstream msg;
      msg << "element " << e << " is degenerate (zero reference volume)";
      throw ValidationError(msg.str());
    }
    if (vol < 0.0) {
      std::swap(conn[0], conn[1]);
      x.col(0).swap(x.col(1));
      vol = -vol;
    }
    volumes_[e] = vol;

    // Dm = [x1 - x0, ..., xd - x0]; grad N_a (a >= 1) is row a-1 of Dm^{-1}.
    Eigen::MatrixXd dm(dim_, dim_);
    for (int a = 1; a < nv; ++a) dm.col(a - 1) = x.col(a) - x.col(0);
    const Eigen::MatrixXd dm_inv = dm.inverse();
    Eigen::Matrix<double, 3, 4> g = Eigen::Matrix<double, 3, 4>::Zero();
    for (int a = 1; a < nv; ++a) {
      g.block(0, a, dim_, 1) = dm_inv.row(a - 1).transpose();
      g.block(0, 0, dim_, 1) -= dm_inv.row(a - 1).transpose();
    }
    gradients_[e] = g;
  }

  node_elements_.assign(n, {});
  for (int e = 0; e < ne; ++e)
    for (int v : element(e)) node_elements_[v].push_back(e);

  // Boundary facets are faces owned by exactly one element.
  std::map<std::array<int, 3>, std::vector<std::pair<int, int>>> owners;
  for (int e = 0; e < ne; ++e) {
    auto conn = element(e);
    for (int i = 0; i < nv; ++i) {
      std::array<int, 3> key{-1, -1, -1};
      int k = 0;
      for (int a = 0; a < nv; ++a)
        if (a != i) key[k++] = conn[a];
      std::sort(key.begin(), key.begin() + dim_);
      owners[key].emplace_back(e, i);
    }
  }
  facets_.clear();
  for (const auto& [key, list] : owners) {
    if (list.size() > 2) {
      std::ostringstream msg;
      msg << "facet shared by " << list.size() << " elements (element " << list[0].first << ")";
      throw ValidationError(msg.str());
    }
    if (list.size() != 1) continue;
    BoundaryFacet f;
    f.element = list[0].first;
    f.local = list[0].second;
    // Keep the owner's vertex order so the facet is consistently oriented.
    auto conn = element(f.element);
    int k = 0;
    for (int a = 0; a < nv; ++a)
      if (a != f.local) f.nodes[k++] = conn[a];
    int tag = markers_[f.nodes[0]];
    for (int a = 1; a < dim_; ++a)
      if (markers_[f.nodes[a]] != tag) tag = 0;
    f.tag = tag;
    facets_.push_back(f);
  }

  classes_.assign(n, NodeClass::Interior);
  for (const auto& f : facets_)
    for (int a = 0; a < dim_; ++a) classes_[f.nodes[a]] = NodeClass::Neumann;
  for (int i = 0; i < n; ++i)
    if (markers_[i] != 0) classes_[i] = NodeClass::Dirichlet;
}

bool LoadSpec::is_zero() const {
  if (body_force.size() > 0 && body_force.norm() != 0.0) return false;
  for (const auto& [tag, t] : tractions)
    if (t.norm() != 0.0) return false;
  return true;
}

void validate_loads(const ReferenceMesh& mesh, const LoadSpec& loads) {
  if (loads.body_force.size() != 0 && loads.body_force.size() != mesh.dim())
    throw ValidationError("body force dimension does not match mesh");
  std::set<int> tags;
  for (const auto& f : mesh.boundary_facets()) tags.insert(f.tag);
  for (const auto& [tag, t] : loads.tractions) {
    if (!tags.count(tag)) {
      std::ostringstream msg;
      msg << "traction references unknown surface group " << tag;
      throw ValidationError(msg.str());
    }
    if (t.size() != mesh.dim()) throw ValidationError("traction dimension does not match mesh");
  }
}

DisplacementField initial_displacement(const ReferenceMesh& mesh, const DirichletSpec& bc) {
  DisplacementField u = DisplacementField::zero(mesh);
  apply_dirichlet(mesh, bc, u);
  return u;
}

void apply_dirichlet(const ReferenceMesh& mesh, const DirichletSpec& bc, DisplacementField& u) {
  if (bc.positions.rows() != mesh.dim() || bc.positions.cols() != mesh.num_nodes())
    throw ValidationError("Dirichlet prescription has the wrong shape");
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (mesh.is_dirichlet(i)) u.values.col(i) = bc.positions.col(i) - mesh.node(i);
}

Eigen::MatrixXd deformed_positions(const ReferenceMesh& mesh, const DisplacementField& u) {
  return mesh.coords() + u.values;
}

double simplex_signed_volume(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const auto d = x.rows();
  Eigen::MatrixXd ds(d, d);
  for (Eigen::Index a = 1; a <= d; ++a) ds.col(a - 1) = x.col(a) - x.col(0);
  return ds.determinant() / kFactorial[d];
}

double simplex_facet_measure(const Eigen::Ref<const Eigen::MatrixXd>& x, int i) {
  const auto d = x.rows();
  std::array<Eigen::Index, 3> idx{};
  int k = 0;
  for (Eigen::Index a = 0; a <= d; ++a)
    if (a != i) idx[k++] = a;
  if (d == 2) return (x.col(idx[1]) - x.col(idx[0])).norm();
  const Eigen::Vector3d p = x.col(idx[1]) - x.col(idx[0]);
  const Eigen::Vector3d q = x.col(idx[2]) - x.col(idx[0]);
  return 0.5 * p.cross(q).norm();
}

namespace {

ElementGeometry simplex_geometry(const Eigen::MatrixXd& x) {
  const auto d = x.rows();
  ElementGeometry g;
  g.signed_volume = simplex_signed_volume(x);
  g.altitudes = VertexVec::Zero(d + 1);
  for (int i = 0; i <= d; ++i) {
    const double m = simplex_facet_measure(x, i);
    g.altitudes[i] = m > 0.0 ? d * g.signed_volume / m : 0.0;
  }
  return g;
}

}  // namespace

ElementGeometry element_geometry_at(const ReferenceMesh& mesh, const Eigen::MatrixXd& positions,
                                    int e) {
  const int d = mesh.dim();
  auto conn = mesh.element(e);
  Eigen::MatrixXd x(d, d + 1);
  for (int a = 0; a <= d; ++a) x.col(a) = positions.col(conn[a]);
  return simplex_geometry(x);
}

ElementGeometry element_geometry(const ReferenceMesh& mesh, const DisplacementField& u, int e) {
  const int d = mesh.dim();
  auto conn = mesh.element(e);
  Eigen::MatrixXd x(d, d + 1);
  for (int a = 0; a <= d; ++a) x.col(a) = mesh.node(conn[a]) + u.values.col(conn[a]);
  return simplex_geometry(x);
}

Mat deformation_gradient(const ReferenceMesh& mesh, const Eigen::MatrixXd& x, int e) {
  const int d = mesh.dim();
  auto conn = mesh.element(e);
  const auto& g = mesh.shape_gradients(e);
  Mat f = Mat::Zero(d, d);
  for (int a = 0; a <= d; ++a)
    f += x.col(conn[a]) * g.block(0, a, d, 1).transpose();
  return f;
}

std::vector<double> element_determinants(const ReferenceMesh& mesh,
                                         const Eigen::MatrixXd& positions) {
  std::vector<double> dets(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
    dets[e] = deformation_gradient(mesh, positions, e).determinant();
  return dets;
}

std::vector<int> tangled_elements(const ReferenceMesh& mesh, const DisplacementField& u) {
  const auto dets = element_determinants(mesh, deformed_positions(mesh, u));
  std::vector<int> out;
  for (int e = 0; e < mesh.num_elements(); ++e)
    if (dets[e] <= 0.0) out.push_back(e);
  return out;
}

}  // namespace ubn
