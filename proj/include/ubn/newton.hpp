#pragma once

#include "ubn/assembly.hpp"
#include "ubn/untangle.hpp"

#include <cmath>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace ubn {

enum class SolveStatus {
  Converged,
  UntangleFailed,
  NewtonStalled,
  ContinuationStalled,
  InvertedAfterMajorIteration,
};

std::string_view to_string(SolveStatus status);

/// Outcome of a UBN or continuation run, in ALS-step accounting.
struct SolveReport {
  SolveStatus status = SolveStatus::NewtonStalled;
  int is_iterations = 0;
  int newton_iterations = 0;
  int major_iterations = 0;  // continuation only
  int als_steps = 0;
  int line_search_active = 0;  // Newton iterations that took alpha < 1
  double initial_residual = 0.0;  // ||F0||, residual with interior displacement zero
  double final_lambda = 0.0;      // load parameter reached; 1 for UBN
  DisplacementField final_u;
  std::vector<double> residual_history;
  std::string message;
};

/// Smallest admissible step fraction; anything at or below it stalls.
inline const double kMinAlpha = std::pow(0.9, 200);

/// Largest alpha = 0.9^k such that every element keeps
/// J(u0 + alpha s, i) >= J(u0, i) / 10. Elements are visited in order and
/// alpha only shrinks; a final whole-mesh pass keeps shrinking until every
/// element passes at the same alpha. Returns nullopt when alpha would drop
/// to kMinAlpha. `step` is a flat free-DOF vector.
std::optional<double> line_search_alpha(const ReferenceMesh& mesh, const DofMap& dofs,
                                        const DisplacementField& u0, const Eigen::VectorXd& step);

struct NewtonOptions {
  double tol_rel = 1e-10;
  int max_iters = 100;
  bool line_search = true;
  /// Solve indefinite tangents with sparse LU instead of stopping.
  bool allow_indefinite = true;
  /// ||F0|| for the relative stopping test; computed from u_init with its
  /// free entries zeroed when negative.
  double reference_norm = -1.0;
  /// Measure convergence against the residual at u_init instead of F0.
  bool relative_to_initial_residual = false;
  /// CSV rows "iteration,residual,alpha,min_det" when set.
  std::ostream* trace = nullptr;
  /// Called after every accepted update with the iterates before and after.
  std::function<void(const DisplacementField&, const DisplacementField&, double)> on_step;
};

struct NewtonResult {
  bool converged = false;
  DisplacementField u;
  int iterations = 0;  // one ALS step each
  int line_search_active = 0;
  double reference_norm = 0.0;
  std::vector<double> residual_history;
  std::vector<double> alphas;
  std::string message;
};

/// ||residual|| with every free displacement set to zero and the Dirichlet
/// values of `u` kept. Well defined on tangled configurations.
double reference_residual_norm(const ReferenceMesh& mesh, const DisplacementField& u,
                               const MaterialParams& p, const LoadSpec& loads = {});

/// Newton iteration K s = -F, u += alpha s until ||F|| <= tol_rel ||F0||, or until
/// ||F|| is down to rounding level (1e3 ulps of the internal force scale).
/// With the line search every iterate stays untangled. Singular tangents
/// (or indefinite ones when allow_indefinite is off), a stalled line search,
/// singular elements and the iteration cap all end the solve with
/// converged = false.
NewtonResult newton_solve(const ReferenceMesh& mesh, const DisplacementField& u_init,
                          const MaterialParams& p, const LoadSpec& loads = {},
                          const NewtonOptions& options = {}, AlsCounter* counter = nullptr);

struct UbnOptions {
  UntangleOptions untangle;
  NewtonOptions newton;
};

/// Untangling before Newton: iterative stiffening for an untangled initial
/// guess, then safeguarded Newton with no continuation. Failures are
/// reported through the status; nothing is thrown for solver breakdowns.
SolveReport ubn_solve(const ReferenceMesh& mesh, const DirichletSpec& dirichlet,
                      const MaterialParams& p, const LoadSpec& loads = {},
                      const UbnOptions& options = {});

}  // namespace ubn
