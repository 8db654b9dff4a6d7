#include "ubn/assembly.hpp"

#include "ubn/quadrature.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <sstream>

namespace ubn {

namespace {

using ElementMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 12, 12>;

Mat element_gradient(const ReferenceMesh& mesh, const DisplacementField& u, int e) {
  const int d = mesh.dim();
  auto conn = mesh.element(e);
  const auto& g = mesh.shape_gradients(e);
  Mat f = Mat::Zero(d, d);
  for (int a = 0; a <= d; ++a)
    f += (mesh.node(conn[a]) + u.values.col(conn[a])) * g.block(0, a, d, 1).transpose();
  return f;
}

[[noreturn]] void throw_singular(int e) {
  std::ostringstream msg;
  msg << "element " << e << " has a singular deformation gradient";
  throw SingularConfigurationError(msg.str(), e);
}

// Ke[(a,i),(b,k)] = |e| sum_{J,L} g_a[J] A(iJ,kL) g_b[L]
ElementMatrix element_stiffness(const ReferenceMesh& mesh, int e, const Tangent& a_tensor,
                                double scale) {
  const int d = mesh.dim();
  const int nv = d + 1;
  const auto& g = mesh.shape_gradients(e);
  ElementMatrix ke = ElementMatrix::Zero(nv * d, nv * d);
  // Contract the right index pair first: B_(iJ),(b,k) = sum_L A(iJ,kL) g_b[L].
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 9, 12> right(d * d, nv * d);
  for (int b = 0; b < nv; ++b)
    for (int k = 0; k < d; ++k) {
      for (int row = 0; row < d * d; ++row) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += a_tensor(row, k * d + l) * g(l, b);
        right(row, b * d + k) = s;
      }
    }
  for (int a = 0; a < nv; ++a)
    for (int i = 0; i < d; ++i)
      for (int col = 0; col < nv * d; ++col) {
        double s = 0.0;
        for (int jj = 0; jj < d; ++jj) s += g(jj, a) * right(i * d + jj, col);
        ke(a * d + i, col) = s;
      }
  return ke * (scale * mesh.reference_volume(e));
}

}  // namespace

DofMap::DofMap(const ReferenceMesh& mesh) : dim_(mesh.dim()) {
  first_.assign(mesh.num_nodes(), -1);
  int next = 0;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.is_dirichlet(i)) continue;
    first_[i] = next;
    next += dim_;
  }
  num_free_ = next;
}

Eigen::VectorXd DofMap::gather(const DisplacementField& u) const {
  Eigen::VectorXd out(num_free_);
  for (std::size_t i = 0; i < first_.size(); ++i)
    if (first_[i] >= 0) out.segment(first_[i], dim_) = u.values.col(static_cast<Eigen::Index>(i));
  return out;
}

void DofMap::scatter(const Eigen::VectorXd& values, DisplacementField& u) const {
  for (std::size_t i = 0; i < first_.size(); ++i)
    if (first_[i] >= 0) u.values.col(static_cast<Eigen::Index>(i)) = values.segment(first_[i], dim_);
}

void DofMap::add(const Eigen::VectorXd& step, double alpha, DisplacementField& u) const {
  for (std::size_t i = 0; i < first_.size(); ++i)
    if (first_[i] >= 0)
      u.values.col(static_cast<Eigen::Index>(i)) += alpha * step.segment(first_[i], dim_);
}

MatrixStats matrix_stats(const SparseMatrix& m) { return {m.rows(), m.nonZeros()}; }

Eigen::MatrixXd nodal_external_load(const ReferenceMesh& mesh, const LoadSpec& loads) {
  const int d = mesh.dim();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, mesh.num_nodes());
  if (loads.body_force.size() == d && loads.body_force.norm() != 0.0) {
    const auto& q = rule(d);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      auto conn = mesh.element(e);
      for (int a = 0; a <= d; ++a) {
        double hat = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) hat += q.weights[k] * q.points[k][a];
        f.col(conn[a]) += hat * mesh.reference_volume(e) * loads.body_force;
      }
    }
  }
  if (!loads.tractions.empty()) {
    const auto& q = rule(d - 1);
    for (const auto& facet : mesh.boundary_facets()) {
      auto it = loads.tractions.find(facet.tag);
      if (it == loads.tractions.end()) continue;
      Eigen::MatrixXd x(d, d + 1);
      auto conn = mesh.element(facet.element);
      for (int a = 0; a <= d; ++a) x.col(a) = mesh.node(conn[a]);
      const double area = simplex_facet_measure(x, facet.local);
      for (int a = 0; a < d; ++a) {
        double hat = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) hat += q.weights[k] * q.points[k][a];
        f.col(facet.nodes[a]) += hat * area * it->second;
      }
    }
  }
  return f;
}

Eigen::VectorXd assemble_residual(const ReferenceMesh& mesh, const DofMap& dofs,
                                  const DisplacementField& u, const MaterialParams& p,
                                  const LoadSpec& loads) {
  const int d = mesh.dim();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dofs.num_free());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat f = element_gradient(mesh, u, e);
    if (f.determinant() == 0.0) throw_singular(e);
    const Mat stress = mr_stress(f, p);
    const auto& g = mesh.shape_gradients(e);
    auto conn = mesh.element(e);
    const double vol = mesh.reference_volume(e);
    for (int a = 0; a <= d; ++a) {
      if (dofs.dof(conn[a], 0) < 0) continue;
      const Vec fa = vol * stress * g.block(0, a, d, 1);
      r.segment(dofs.dof(conn[a], 0), d) += fa;
    }
  }
  if (!loads.is_zero()) {
    const Eigen::MatrixXd ext = nodal_external_load(mesh, loads);
    for (int i = 0; i < mesh.num_nodes(); ++i)
      if (dofs.dof(i, 0) >= 0) r.segment(dofs.dof(i, 0), d) -= ext.col(i);
  }
  return r;
}

NonlinearSystem assemble_nonlinear(const ReferenceMesh& mesh, const DofMap& dofs,
                                   const DisplacementField& u, const MaterialParams& p,
                                   const LoadSpec& loads) {
  const int d = mesh.dim();
  const int nv = d + 1;
  NonlinearSystem sys;
  sys.residual = Eigen::VectorXd::Zero(dofs.num_free());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * nv * d * nv * d);
  std::array<int, 12> index{};
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat f = element_gradient(mesh, u, e);
    if (f.determinant() == 0.0) throw_singular(e);
    const Mat stress = mr_stress(f, p);
    const Tangent a_tensor = mr_tangent(f, p);
    const auto& g = mesh.shape_gradients(e);
    auto conn = mesh.element(e);
    const double vol = mesh.reference_volume(e);
    for (int a = 0; a < nv; ++a) {
      for (int i = 0; i < d; ++i) index[a * d + i] = dofs.dof(conn[a], i);
      if (index[a * d] < 0) continue;
      sys.residual.segment(index[a * d], d) += vol * stress * g.block(0, a, d, 1);
    }
    const ElementMatrix ke = element_stiffness(mesh, e, a_tensor, 1.0);
    for (int r = 0; r < nv * d; ++r) {
      if (index[r] < 0) continue;
      for (int c = 0; c < nv * d; ++c)
        if (index[c] >= 0) triplets.emplace_back(index[r], index[c], ke(r, c));
    }
  }
  if (!loads.is_zero()) {
    const Eigen::MatrixXd ext = nodal_external_load(mesh, loads);
    for (int i = 0; i < mesh.num_nodes(); ++i)
      if (dofs.dof(i, 0) >= 0) sys.residual.segment(dofs.dof(i, 0), d) -= ext.col(i);
  }
  sys.tangent.resize(dofs.num_free(), dofs.num_free());
  sys.tangent.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

SparseMatrix assemble_tangent(const ReferenceMesh& mesh, const DofMap& dofs,
                              const DisplacementField& u, const MaterialParams& p) {
  return assemble_nonlinear(mesh, dofs, u, p).tangent;
}

double total_energy(const ReferenceMesh& mesh, const DisplacementField& u, const MaterialParams& p,
                    const LoadSpec& loads) {
  double energy = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    energy += mr_energy(element_gradient(mesh, u, e), p) * mesh.reference_volume(e);
  if (!loads.is_zero()) energy -= nodal_external_load(mesh, loads).cwiseProduct(u.values).sum();
  return energy;
}

SparseSymSystem assemble_linear_system(const ReferenceMesh& mesh, const DofMap& dofs,
                                       const DirichletSpec& dirichlet, const MaterialParams& p,
                                       const StiffnessMultipliers& mult, const LoadSpec& loads) {
  const int d = mesh.dim();
  const int nv = d + 1;
  if (static_cast<int>(mult.size()) != mesh.num_elements())
    throw ArgumentError("one stiffness multiplier per element is required");
  const Tangent c = linear_elastic_tangent(d, p);
  const DisplacementField ud = initial_displacement(mesh, dirichlet);

  SparseSymSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(dofs.num_free());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * nv * d * nv * d);
  std::array<int, 12> index{};
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto conn = mesh.element(e);
    for (int a = 0; a < nv; ++a)
      for (int i = 0; i < d; ++i) index[a * d + i] = dofs.dof(conn[a], i);
    const ElementMatrix ke = element_stiffness(mesh, e, c, mult[e]);
    for (int r = 0; r < nv * d; ++r) {
      if (index[r] < 0) continue;
      for (int col = 0; col < nv * d; ++col) {
        if (index[col] >= 0)
          triplets.emplace_back(index[r], index[col], ke(r, col));
        else
          sys.rhs[index[r]] -= ke(r, col) * ud.values(col % d, conn[col / d]);
      }
    }
  }
  if (!loads.is_zero()) {
    const Eigen::MatrixXd ext = nodal_external_load(mesh, loads);
    for (int i = 0; i < mesh.num_nodes(); ++i)
      if (dofs.dof(i, 0) >= 0) sys.rhs.segment(dofs.dof(i, 0), d) += ext.col(i);
  }
  sys.matrix.resize(dofs.num_free(), dofs.num_free());
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

namespace {

void check_dimensions(const SparseSymSystem& system) {
  const auto n = system.matrix.rows();
  if (system.matrix.cols() != n || system.rhs.size() != n)
    throw ArgumentError("linear system dimensions do not agree");
}

template <class Solver>
Eigen::VectorXd refined_solve(const Solver& solver, const SparseSymSystem& system) {
  Eigen::VectorXd x = solver.solve(system.rhs);
  const double target = 1e-12 * system.rhs.norm();
  for (int refine = 0; refine < 3; ++refine) {
    const Eigen::VectorXd r = system.rhs - system.matrix * x;
    if (r.norm() <= target) break;
    x += solver.solve(r);
  }
  return x;
}

using Cholesky = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

}  // namespace

Eigen::VectorXd solve_spd(const SparseSymSystem& system) {
  check_dimensions(system);
  if (system.matrix.rows() == 0) return Eigen::VectorXd();
  Cholesky llt(system.matrix);
  if (llt.info() != Eigen::Success)
    throw IndefiniteSystemError("non-positive pivot in sparse Cholesky factorization");
  return refined_solve(llt, system);
}

Eigen::VectorXd solve_symmetric(const SparseSymSystem& system, bool* used_lu) {
  check_dimensions(system);
  if (used_lu) *used_lu = false;
  if (system.matrix.rows() == 0) return Eigen::VectorXd();
  Cholesky llt(system.matrix);
  if (llt.info() == Eigen::Success) return refined_solve(llt, system);

  if (used_lu) *used_lu = true;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(system.matrix);
  if (lu.info() != Eigen::Success)
    throw IndefiniteSystemError("singular matrix in sparse LU factorization");
  return refined_solve(lu, system);
}

}  // namespace ubn
