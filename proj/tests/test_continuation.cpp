#include "support.hpp"

#include "ubn/continuation.hpp"
#include "ubn/mesh_gen.hpp"

#include <doctest.h>

#include <sstream>

using namespace ubn;
using ubn::test::kMaterial;

namespace {

const ReferenceMesh& annulus() {
  static const ReferenceMesh mesh = generate_annulus(0.3, 1.0, 182);
  return mesh;
}

/// Altitude rule evaluated directly: Dirichlet nodes at path(lambda),
/// everything else from u_prev, compared element by element.
bool rule_holds(const ReferenceMesh& mesh, const DisplacementField& u_prev, const LoadPath& path,
                double lambda, double eta) {
  const Eigen::MatrixXd x0 = deformed_positions(mesh, u_prev);
  DisplacementField u = u_prev;
  apply_dirichlet(mesh, path.at(lambda), u);
  const Eigen::MatrixXd x1 = deformed_positions(mesh, u);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto a0 = element_geometry_at(mesh, x0, e).altitudes;
    const auto a1 = element_geometry_at(mesh, x1, e).altitudes;
    for (Eigen::Index i = 0; i < a0.size(); ++i)
      if (a1[i] < (1.0 - eta) * a0[i]) return false;
  }
  return true;
}

ReferenceMesh pinned_triangle() {
  Eigen::MatrixXd x(2, 3);
  x << 0, 1, 0, 0, 0, 1;
  return ReferenceMesh(2, x, {0, 1, 2}, {1, 1, 1});
}

}  // namespace

TEST_CASE("linear path interpolates the prescription") {
  const ReferenceMesh& m = annulus();
  const DirichletSpec target = annulus_dirichlet(m, 0.4);
  const LoadPath path = make_linear_path(m, target);
  CHECK(path.kind == PathKind::Linear);
  CHECK((path.at(0.0).positions - m.coords()).norm() == 0.0);
  CHECK((path.at(1.0).positions - target.positions).norm() < 1e-15);
  CHECK((path.at(0.25).positions - (0.75 * m.coords() + 0.25 * target.positions)).norm() < 1e-14);
  CHECK_THROWS_AS(make_linear_path(m, DirichletSpec{Eigen::MatrixXd::Zero(2, 3)}), ValidationError);
}

TEST_CASE("polar path rotates at constant radius") {
  const ReferenceMesh& m = annulus();
  const LoadPath path = make_annulus_polar_path(m, 0.6);
  CHECK(path.kind == PathKind::PolarRotation);
  CHECK((path.at(0.5).positions - annulus_dirichlet(m, 0.3).positions).norm() == 0.0);
  for (double lambda : {0.1, 0.5, 0.9})
    for (int i = 0; i < m.num_nodes(); ++i)
      if (m.marker(i) == kOuterCircleMarker)
        CHECK(path.at(lambda).positions.col(i).norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(make_annulus_polar_path(test::square_mesh(2), 0.1), ClassificationError);
}

TEST_CASE("a motionless path finishes in one step") {
  const ReferenceMesh& m = annulus();
  const LoadPath path = make_linear_path(m, DirichletSpec::identity(m));
  const auto step = next_lambda(m, DisplacementField::zero(m), 0.0, 0.5, path, 1.0 / 3.0, 5e-4);
  REQUIRE(step.has_value());
  CHECK(step->lambda == 1.0);
  CHECK(step->increment == 1.0);
  CHECK(step->min_altitude_ratio == doctest::Approx(1.0));

  DirichletSpec nudge = DirichletSpec::identity(m);
  nudge.positions.row(0) += 1e-3 * m.coords().row(1);
  const auto report = continuation_solve(m, make_linear_path(m, nudge), kMaterial);
  CHECK(report.status == SolveStatus::Converged);
  CHECK(report.major_iterations == 1);
  CHECK(report.als_steps == report.newton_iterations);
}

TEST_CASE("accepted increments are the largest passing trial") {
  const ReferenceMesh& m = annulus();
  const LoadPath path = make_annulus_polar_path(m, 0.6);
  DisplacementField u = initial_displacement(m, path.at(0.0));
  double lambda = 0.0, increment = 0.5;
  for (int k = 0; k < 6; ++k) {
    const auto step = next_lambda(m, u, lambda, increment, path, 1.0 / 3.0, 5e-4);
    REQUIRE(step.has_value());
    CHECK(step->lambda > lambda);
    CHECK(rule_holds(m, u, path, step->lambda, 1.0 / 3.0));
    // The trial twice as large, when it was tried, must have failed.
    if (step->lambda < 1.0 && 2 * step->increment <= 2 * increment * (1 + 1e-12))
      CHECK(!rule_holds(m, u, path, std::min(1.0, lambda + 2 * step->increment), 1.0 / 3.0));
    lambda = step->lambda;
    increment = step->increment;
    apply_dirichlet(m, path.at(lambda), u);
  }
}

TEST_CASE("eta above one admits inverting boundary steps") {
  const ReferenceMesh tri = pinned_triangle();
  DirichletSpec target = DirichletSpec::identity(tri);
  target.positions.col(2) = Eigen::Vector2d(0.3, -0.05);  // apex through the base
  const LoadPath path = make_linear_path(tri, target);
  const auto loose = next_lambda(tri, DisplacementField::zero(tri), 0.0, 0.5, path, 1.2, 1e-6);
  REQUIRE(loose.has_value());
  CHECK(loose->lambda == 1.0);
  CHECK(loose->min_altitude_ratio < 0.0);
  const auto strict = next_lambda(tri, DisplacementField::zero(tri), 0.0, 0.5, path, 1.0 / 3.0, 1e-6);
  REQUIRE(strict.has_value());
  CHECK(strict->lambda < 1.0);
  CHECK(!next_lambda(tri, DisplacementField::zero(tri), 0.0, 0.5, path, 1.0 / 3.0, 0.9));

  const auto report = continuation_solve(tri, path, kMaterial, {.eta = 1.2});
  CHECK(report.status == SolveStatus::InvertedAfterMajorIteration);
  CHECK(report.major_iterations == 1);
}

TEST_CASE("continuation on a mild twist") {
  std::ostringstream trace;
  ContinuationConfig cfg;
  cfg.trace = &trace;
  const auto r = continuation_solve(annulus(), make_annulus_polar_path(annulus(), 0.3), kMaterial, cfg);
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(r.final_lambda == 1.0);
  CHECK(r.als_steps == r.newton_iterations);
  CHECK(r.major_iterations > 1);
  CHECK(r.residual_history.back() <= 1e-10 * r.initial_residual);
  CHECK(tangled_elements(annulus(), r.final_u).empty());

  std::istringstream in(trace.str());
  std::string line;
  std::getline(in, line);
  double prev = 0.0;
  int rows = 0, newton = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    CHECK(v[1] > prev);
    prev = v[1];
    newton += static_cast<int>(v[3]);
    ++rows;
  }
  CHECK(rows == r.major_iterations);
  CHECK(newton == r.newton_iterations);
  CHECK(prev == 1.0);
}

TEST_CASE("continuation stalls when the increment floor is too high") {
  ContinuationConfig cfg;
  cfg.min_increment = 0.3;
  const auto r = continuation_solve(annulus(), make_annulus_polar_path(annulus(), 0.6), kMaterial, cfg);
  CHECK(r.status == SolveStatus::ContinuationStalled);
  CHECK(r.final_lambda < 1.0);
}
