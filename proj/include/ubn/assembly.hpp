#pragma once

#include "ubn/material.hpp"
#include "ubn/mesh.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace ubn {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Numbering of the free (non-Dirichlet) degrees of freedom. Dirichlet
/// nodes are eliminated, so the unknown vector has length dim * m.
class DofMap {
 public:
  DofMap() = default;
  explicit DofMap(const ReferenceMesh& mesh);

  int dim() const { return dim_; }
  int num_free() const { return num_free_; }
  /// Flat index of (node, component), or -1 for a Dirichlet node.
  int dof(int node, int component) const {
    return first_[node] < 0 ? -1 : first_[node] + component;
  }

  Eigen::VectorXd gather(const DisplacementField& u) const;
  /// Writes the free entries of `values` into `u`, leaving Dirichlet columns.
  void scatter(const Eigen::VectorXd& values, DisplacementField& u) const;
  /// Adds `step` to the free entries of `u`.
  void add(const Eigen::VectorXd& step, double alpha, DisplacementField& u) const;

 private:
  int dim_ = 0;
  int num_free_ = 0;
  std::vector<int> first_;
};

/// Per-element stiffness scale factors for iterative stiffening (all >= 1).
using StiffnessMultipliers = std::vector<double>;

struct SparseSymSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

struct MatrixStats {
  Eigen::Index rows = 0;
  Eigen::Index nonzeros = 0;
  bool indefinite = false;  // Cholesky failed and the LU fallback was used
};

MatrixStats matrix_stats(const SparseMatrix& m);

/// Consistent nodal forces from body force and tractions (dim x n, all nodes).
Eigen::MatrixXd nodal_external_load(const ReferenceMesh& mesh, const LoadSpec& loads);

/// Residual of the discrete weak form at the free DOFs: internal force
/// sum_e P(F_e) grad N_a |e| minus external loads. Throws
/// SingularConfigurationError naming the first element with det(F) == 0.
Eigen::VectorXd assemble_residual(const ReferenceMesh& mesh, const DofMap& dofs,
                                  const DisplacementField& u, const MaterialParams& p,
                                  const LoadSpec& loads = {});

/// Free-free block of the consistent tangent of the Mooney-Rivlin residual.
SparseMatrix assemble_tangent(const ReferenceMesh& mesh, const DofMap& dofs,
                              const DisplacementField& u, const MaterialParams& p);

/// Residual and tangent in a single element pass.
struct NonlinearSystem {
  SparseMatrix tangent;
  Eigen::VectorXd residual;
};
NonlinearSystem assemble_nonlinear(const ReferenceMesh& mesh, const DofMap& dofs,
                                   const DisplacementField& u, const MaterialParams& p,
                                   const LoadSpec& loads = {});

/// Total potential energy sum_e Psi(F_e)|e| - f_ext . u. Throws DomainError
/// if any element is tangled.
double total_energy(const ReferenceMesh& mesh, const DisplacementField& u, const MaterialParams& p,
                    const LoadSpec& loads = {});

/// Linear-elasticity stiffness with element e scaled by mult[e]. The rhs
/// holds external loads minus the Dirichlet lifting K_fD u_D, so the
/// solution is the free displacement of the linear-elastic prediction.
SparseSymSystem assemble_linear_system(const ReferenceMesh& mesh, const DofMap& dofs,
                                       const DirichletSpec& dirichlet, const MaterialParams& p,
                                       const StiffnessMultipliers& mult, const LoadSpec& loads = {});

/// Sparse Cholesky solve. Throws IndefiniteSystemError on a non-positive
/// pivot. The residual is refined toward 1e-12 ||rhs||.
Eigen::VectorXd solve_spd(const SparseSymSystem& system);

/// Cholesky first; on a non-positive pivot the system is refactored with
/// sparse LU. Throws IndefiniteSystemError only if the matrix is singular.
/// Sets `*used_lu` when the fallback ran.
Eigen::VectorXd solve_symmetric(const SparseSymSystem& system, bool* used_lu = nullptr);

/// Counts assembly/linear-solve (ALS) steps. Solvers route every linear
/// solve that follows an assembly through here.
class AlsCounter {
 public:
  /// With `allow_indefinite` the solve goes through solve_symmetric.
  Eigen::VectorXd solve(const SparseSymSystem& system, bool allow_indefinite = false) {
    ++count_;
    last_stats_ = matrix_stats(system.matrix);
    if (!allow_indefinite) return solve_spd(system);
    return solve_symmetric(system, &last_stats_.indefinite);
  }
  int count() const { return count_; }
  const MatrixStats& last_stats() const { return last_stats_; }

 private:
  int count_ = 0;
  MatrixStats last_stats_;
};

}  // namespace ubn
