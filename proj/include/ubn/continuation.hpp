#pragma once

#include "ubn/newton.hpp"

#include <functional>
#include <iosfwd>
#include <optional>

namespace ubn {

enum class PathKind { Linear, PolarRotation };

/// Boundary prescription as a function of the load parameter lambda in
/// [0, 1]; at(0) is the identity and at(1) the full prescription.
struct LoadPath {
  PathKind kind = PathKind::Linear;
  std::function<DirichletSpec(double)> evaluator;

  DirichletSpec at(double lambda) const { return evaluator(lambda); }
};

/// X + lambda (phi0(X) - X).
LoadPath make_linear_path(const ReferenceMesh& mesh, DirichletSpec target);

/// Outer circle rotated by lambda f radians at constant radius, inner circle
/// at radius r_in + lambda f (r_out - r_in). Throws ClassificationError when
/// the mesh is not an annulus.
LoadPath make_annulus_polar_path(const ReferenceMesh& mesh, double f);

struct ContinuationConfig {
  double eta = 1.0 / 3.0;
  double min_increment = 0.0005;
  double intermediate_tol = 1e-3;
  double final_tol = 1e-10;
  int max_newton_per_major = 50;
  int max_newton_final = 100;
  /// The baseline runs plain Newton; enabling this adds the determinant
  /// line search for ablation runs.
  bool line_search = false;
  /// CSV rows "major,lambda,increment,newton_iterations,min_altitude_ratio,min_det".
  std::ostream* trace = nullptr;
};

struct LambdaStep {
  double lambda = 0.0;
  double increment = 0.0;
  double min_altitude_ratio = 1.0;  // min over altitudes of new / old
};

/// Picks the next load parameter. Trial increments are 2*previous, then
/// repeated halving (capped so lambda never exceeds 1). A trial is accepted
/// when moving only the Dirichlet nodes to path(lambda), interior frozen at
/// u_prev, leaves every signed altitude >= (1 - eta) times its value in the
/// current mesh. Returns nullopt once the increment falls below
/// `min_increment`. `u_prev` must carry path(lambda_prev) on its Dirichlet
/// nodes.
std::optional<LambdaStep> next_lambda(const ReferenceMesh& mesh, const DisplacementField& u_prev,
                                      double lambda_prev, double previous_increment,
                                      const LoadPath& path, double eta, double min_increment);

/// Newton continuation for traction-free, body-force-free problems. Each
/// major iteration advances lambda with next_lambda and runs Newton from the
/// previous solution: loosely (1e-3 relative to that major iteration's
/// starting residual) before lambda = 1 and to 1e-10 relative to F0 at
/// lambda = 1. Stops with InvertedAfterMajorIteration when a major
/// iteration ends tangled and with ContinuationStalled when the increment
/// underflows.
SolveReport continuation_solve(const ReferenceMesh& mesh, const LoadPath& path,
                               const MaterialParams& p, const ContinuationConfig& cfg = {});

}  // namespace ubn
