#include "ubn/continuation.hpp"

#include "ubn/mesh_gen.hpp"

#include <algorithm>
#include <ostream>

namespace ubn {

LoadPath make_linear_path(const ReferenceMesh& mesh, DirichletSpec target) {
  if (target.positions.rows() != mesh.dim() || target.positions.cols() != mesh.num_nodes())
    throw ValidationError("Dirichlet prescription has the wrong shape");
  Eigen::MatrixXd reference = mesh.coords();
  return {PathKind::Linear, [reference = std::move(reference),
                             target = std::move(target.positions)](double lambda) {
            return DirichletSpec{reference + lambda * (target - reference)};
          }};
}

LoadPath make_annulus_polar_path(const ReferenceMesh& mesh, double f) {
  annulus_dirichlet(mesh, f);  // validates circle membership up front
  return {PathKind::PolarRotation,
          [&mesh, f](double lambda) { return annulus_dirichlet(mesh, lambda * f); }};
}

namespace {

std::vector<int> boundary_elements(const ReferenceMesh& mesh) {
  std::vector<int> out;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto conn = mesh.element(e);
    if (std::any_of(conn.begin(), conn.end(), [&](int v) { return mesh.is_dirichlet(v); }))
      out.push_back(e);
  }
  return out;
}

}  // namespace

std::optional<LambdaStep> next_lambda(const ReferenceMesh& mesh, const DisplacementField& u_prev,
                                      double lambda_prev, double previous_increment,
                                      const LoadPath& path, double eta, double min_increment) {
  // Only elements touching a Dirichlet node move when the interior is frozen.
  const std::vector<int> moving = boundary_elements(mesh);
  Eigen::MatrixXd x = deformed_positions(mesh, u_prev);
  std::vector<VertexVec> old_altitudes;
  old_altitudes.reserve(moving.size());
  for (int e : moving) old_altitudes.push_back(element_geometry_at(mesh, x, e).altitudes);

  const double remaining = 1.0 - lambda_prev;
  double increment = 2.0 * previous_increment;
  for (;;) {
    const bool final_step = increment >= remaining;
    const double trial = final_step ? remaining : increment;
    if (!final_step && trial < min_increment) return std::nullopt;
    const double lambda = final_step ? 1.0 : lambda_prev + trial;

    const DirichletSpec bc = path.at(lambda);
    for (int i = 0; i < mesh.num_nodes(); ++i)
      if (mesh.is_dirichlet(i)) x.col(i) = bc.positions.col(i);

    bool ok = true;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < moving.size() && ok; ++k) {
      const VertexVec alt = element_geometry_at(mesh, x, moving[k]).altitudes;
      for (Eigen::Index i = 0; i < alt.size(); ++i) {
        min_ratio = std::min(min_ratio, alt[i] / old_altitudes[k][i]);
        if (alt[i] < (1.0 - eta) * old_altitudes[k][i]) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return LambdaStep{lambda, trial, min_ratio};
    if (final_step && trial < min_increment) return std::nullopt;
    increment = trial / 2.0;
  }
}

SolveReport continuation_solve(const ReferenceMesh& mesh, const LoadPath& path,
                               const MaterialParams& p, const ContinuationConfig& cfg) {
  SolveReport report;
  AlsCounter als;
  const LoadSpec no_loads;

  DisplacementField u = initial_displacement(mesh, path.at(0.0));
  try {
    report.initial_residual = reference_residual_norm(mesh, initial_displacement(mesh, path.at(1.0)), p);
  } catch (const SingularConfigurationError&) {
    report.initial_residual = 0.0;
  }
  if (cfg.trace)
    *cfg.trace << "major,lambda,increment,newton_iterations,min_altitude_ratio,min_det\n";

  double lambda = 0.0;
  double increment = 0.5;
  auto finish = [&](SolveStatus status, std::string message) {
    report.status = status;
    report.message = std::move(message);
    report.final_u = u;
    report.final_lambda = lambda;
    report.als_steps = als.count();
    return report;
  };

  while (lambda < 1.0) {
    const auto step = next_lambda(mesh, u, lambda, increment, path, cfg.eta, cfg.min_increment);
    if (!step) return finish(SolveStatus::ContinuationStalled, "lambda increment below minimum");
    ++report.major_iterations;
    lambda = step->lambda;
    increment = step->increment;
    apply_dirichlet(mesh, path.at(lambda), u);

    const bool final_step = lambda >= 1.0;
    NewtonOptions nopt;
    nopt.line_search = cfg.line_search;
    if (final_step) {
      nopt.tol_rel = cfg.final_tol;
      nopt.max_iters = cfg.max_newton_final;
      nopt.reference_norm = report.initial_residual;
    } else {
      nopt.tol_rel = cfg.intermediate_tol;
      nopt.max_iters = cfg.max_newton_per_major;
      nopt.relative_to_initial_residual = true;
    }
    const NewtonResult nr = newton_solve(mesh, u, p, no_loads, nopt, &als);
    u = nr.u;
    report.newton_iterations += nr.iterations;
    report.line_search_active += nr.line_search_active;
    report.residual_history.insert(report.residual_history.end(), nr.residual_history.begin(),
                                   nr.residual_history.end());

    const auto dets = element_determinants(mesh, deformed_positions(mesh, u));
    const double min_det = *std::min_element(dets.begin(), dets.end());
    if (cfg.trace)
      *cfg.trace << report.major_iterations << ',' << lambda << ',' << step->increment << ','
                 << nr.iterations << ',' << step->min_altitude_ratio << ',' << min_det << '\n';
    if (min_det <= 0.0)
      return finish(SolveStatus::InvertedAfterMajorIteration,
                    "inverted elements remain after a major iteration");
    if (!nr.converged) return finish(SolveStatus::NewtonStalled, nr.message);
  }
  return finish(SolveStatus::Converged, "");
}

}  // namespace ubn
