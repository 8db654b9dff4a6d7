#include "ubn/newton.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ubn {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::UntangleFailed: return "UntangleFailed";
    case SolveStatus::NewtonStalled: return "NewtonStalled";
    case SolveStatus::ContinuationStalled: return "ContinuationStalled";
    case SolveStatus::InvertedAfterMajorIteration: return "InvertedAfterMajorIteration";
  }
  return "Unknown";
}

namespace {

struct ElementLine {
  Mat f0;    // F at u0
  Mat dir;   // dF/dalpha
  double j0;
};

std::vector<ElementLine> element_lines(const ReferenceMesh& mesh, const DofMap& dofs,
                                       const DisplacementField& u0, const Eigen::VectorXd& step) {
  DisplacementField s = DisplacementField::zero(mesh);
  dofs.scatter(step, s);
  const Eigen::MatrixXd x0 = deformed_positions(mesh, u0);
  std::vector<ElementLine> lines(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    lines[e].f0 = deformation_gradient(mesh, x0, e);
    lines[e].dir = deformation_gradient(mesh, s.values, e);
    lines[e].j0 = lines[e].f0.determinant();
  }
  return lines;
}

bool admissible(const ElementLine& line, double alpha) {
  const Mat f = line.f0 + alpha * line.dir;
  return f.determinant() >= line.j0 / 10.0;
}

double min_determinant(const ReferenceMesh& mesh, const DisplacementField& u) {
  const auto dets = element_determinants(mesh, deformed_positions(mesh, u));
  return dets.empty() ? 0.0 : *std::min_element(dets.begin(), dets.end());
}

/// Residual size that rounding alone produces: a thousand ulps of the
/// largest internal force term.
double rounding_floor(const ReferenceMesh& mesh, const MaterialParams& p) {
  double scale = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    scale += mesh.reference_volume(e) * mesh.shape_gradients(e).norm();
  return 1e3 * std::numeric_limits<double>::epsilon() * (p.lambda + 2.0 * p.mu) * scale;
}

}  // namespace

std::optional<double> line_search_alpha(const ReferenceMesh& mesh, const DofMap& dofs,
                                        const DisplacementField& u0, const Eigen::VectorXd& step) {
  const auto lines = element_lines(mesh, dofs, u0, step);
  double alpha = 1.0;
  for (const auto& line : lines) {
    while (!admissible(line, alpha)) {
      alpha *= 0.9;
      if (alpha <= kMinAlpha) return std::nullopt;
    }
  }
  // det(F0 + alpha D) is a polynomial in alpha, so shrinking alpha for a
  // later element can break an earlier one; re-check the whole mesh.
  for (;;) {
    bool ok = true;
    for (const auto& line : lines)
      if (!admissible(line, alpha)) {
        ok = false;
        break;
      }
    if (ok) return alpha;
    alpha *= 0.9;
    if (alpha <= kMinAlpha) return std::nullopt;
  }
}

double reference_residual_norm(const ReferenceMesh& mesh, const DisplacementField& u,
                               const MaterialParams& p, const LoadSpec& loads) {
  const DofMap dofs(mesh);
  DisplacementField zero = u;
  dofs.scatter(Eigen::VectorXd::Zero(dofs.num_free()), zero);
  return assemble_residual(mesh, dofs, zero, p, loads).norm();
}

NewtonResult newton_solve(const ReferenceMesh& mesh, const DisplacementField& u_init,
                          const MaterialParams& p, const LoadSpec& loads,
                          const NewtonOptions& options, AlsCounter* counter) {
  AlsCounter local;
  AlsCounter& als = counter ? *counter : local;
  const DofMap dofs(mesh);

  NewtonResult out;
  out.u = u_init;
  if (options.trace) *options.trace << "iteration,residual,alpha,min_det\n";

  try {
    out.reference_norm = options.relative_to_initial_residual ? 0.0
                         : options.reference_norm >= 0.0
                             ? options.reference_norm
                             : reference_residual_norm(mesh, u_init, p, loads);
  } catch (const SingularConfigurationError&) {
    out.reference_norm = 0.0;
  }

  double tolerance = 0.0;
  for (int it = 0;; ++it) {
    NonlinearSystem sys;
    try {
      sys = assemble_nonlinear(mesh, dofs, out.u, p, loads);
    } catch (const SingularConfigurationError& err) {
      out.message = err.what();
      return out;
    }
    const double norm = sys.residual.norm();
    out.residual_history.push_back(norm);
    if (it == 0) {
      // Without a usable F0 (unloaded identity problem), fall back to the
      // starting residual.
      const double ref =
          options.relative_to_initial_residual || !(out.reference_norm > 0.0) ? norm
                                                                             : out.reference_norm;
      tolerance = std::max(options.tol_rel * ref, rounding_floor(mesh, p));
    }
    if (!std::isfinite(norm)) {
      out.message = "residual is not finite";
      return out;
    }
    if (norm <= tolerance) {
      out.converged = true;
      return out;
    }
    if (it >= options.max_iters) {
      out.message = "Newton iteration cap reached";
      return out;
    }

    Eigen::VectorXd step;
    try {
      step = als.solve({sys.tangent, -sys.residual}, options.allow_indefinite);
    } catch (const IndefiniteSystemError& err) {
      out.message = std::string("indefinite tangent: ") + err.what();
      return out;
    }
    ++out.iterations;

    double alpha = 1.0;
    if (options.line_search) {
      const auto a = line_search_alpha(mesh, dofs, out.u, step);
      if (!a) {
        out.message = "line search stalled";
        return out;
      }
      alpha = *a;
    }
    if (alpha < 1.0) ++out.line_search_active;
    out.alphas.push_back(alpha);

    const DisplacementField before = options.on_step ? out.u : DisplacementField{};
    dofs.add(step, alpha, out.u);
    if (options.on_step) options.on_step(before, out.u, alpha);
    if (options.trace)
      *options.trace << out.iterations << ',' << norm << ',' << alpha << ','
                     << min_determinant(mesh, out.u) << '\n';
  }
}

SolveReport ubn_solve(const ReferenceMesh& mesh, const DirichletSpec& dirichlet,
                      const MaterialParams& p, const LoadSpec& loads, const UbnOptions& options) {
  SolveReport report;
  AlsCounter als;

  const UntangleResult ut = iterative_stiffening(mesh, dirichlet, p, loads, options.untangle, &als);
  report.is_iterations = ut.iterations;
  report.final_lambda = 1.0;
  report.als_steps = als.count();
  report.final_u = ut.u;
  try {
    report.initial_residual = reference_residual_norm(mesh, ut.u, p, loads);
  } catch (const SingularConfigurationError&) {
    report.initial_residual = 0.0;
  }
  if (!ut.success) {
    report.status = SolveStatus::UntangleFailed;
    report.message = ut.message;
    return report;
  }

  NewtonOptions nopt = options.newton;
  nopt.line_search = true;
  if (nopt.reference_norm < 0.0) nopt.reference_norm = report.initial_residual;
  const NewtonResult nr = newton_solve(mesh, ut.u, p, loads, nopt, &als);
  report.newton_iterations = nr.iterations;
  report.line_search_active = nr.line_search_active;
  report.residual_history = nr.residual_history;
  report.final_u = nr.u;
  report.als_steps = als.count();
  report.status = nr.converged ? SolveStatus::Converged : SolveStatus::NewtonStalled;
  report.message = nr.message;
  return report;
}

}  // namespace ubn
