#include "support.hpp"

#include "ubn/mesh_gen.hpp"
#include "ubn/newton.hpp"

#include <doctest.h>

using namespace ubn;
using ubn::test::kMaterial;

namespace {

const ReferenceMesh& annulus() {
  static const ReferenceMesh mesh = generate_annulus(0.3, 1.0, 182);
  return mesh;
}

/// Largest 0.9^k (k >= 0) at which every element keeps J >= J0 / 10,
/// found by evaluating determinants directly.
double brute_force_alpha(const ReferenceMesh& mesh, const DofMap& dofs, const DisplacementField& u0,
                         const Eigen::VectorXd& step) {
  const auto j0 = element_determinants(mesh, deformed_positions(mesh, u0));
  double alpha = 1.0;
  for (int k = 0; k < 200; ++k, alpha *= 0.9) {
    DisplacementField u = u0;
    dofs.add(step, alpha, u);
    const auto j = element_determinants(mesh, deformed_positions(mesh, u));
    bool ok = true;
    for (std::size_t e = 0; e < j.size() && ok; ++e) ok = j[e] >= j0[e] / 10.0;
    if (ok) return alpha;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("line search agrees with direct determinant evaluation") {
  std::mt19937 rng(21);
  const ReferenceMesh mesh = test::square_mesh(5);
  const DofMap dofs(mesh);
  int shortened = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const DisplacementField u0 = test::random_displacement(mesh, 0.02, rng);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd step(dofs.num_free());
    const double scale = 0.05 * (1 + trial % 8);
    for (auto& s : step) s = scale * unit(rng);
    const auto alpha = line_search_alpha(mesh, dofs, u0, step);
    REQUIRE(alpha.has_value());
    CHECK(*alpha == doctest::Approx(brute_force_alpha(mesh, dofs, u0, step)).epsilon(1e-12));
    shortened += *alpha < 1.0;
  }
  CHECK(shortened > 5);
}

TEST_CASE("line search stalls on a step that collapses an element at every length") {
  // J(alpha) = 1 - 1e70 alpha stays above 1/10 only far below the alpha floor.
  Eigen::MatrixXd x(2, 3);
  x << 0, 1, 0, 0, 0, 1;
  const ReferenceMesh tri(2, x, {0, 1, 2}, {1, 1, 0});
  const DofMap dofs(tri);
  Eigen::VectorXd step(2);
  step << 0.0, -1e70;  // apex pushed through the base
  CHECK(!line_search_alpha(tri, dofs, DisplacementField::zero(tri), step).has_value());
  step << 0.0, -0.95;
  const auto a = line_search_alpha(tri, dofs, DisplacementField::zero(tri), step);
  REQUIRE(a.has_value());
  CHECK(1.0 - 0.95 * *a >= 0.1);
  CHECK(1.0 - 0.95 * *a / 0.9 < 0.1);
}

TEST_CASE("safeguarded Newton keeps every determinant above a tenth of its old value") {
  const DirichletSpec bc = annulus_dirichlet(annulus(), 0.6);
  const auto ut = iterative_stiffening(annulus(), bc, kMaterial);
  REQUIRE(ut.success);
  NewtonOptions opt;
  int steps = 0;
  bool safe = true;
  opt.on_step = [&](const DisplacementField& before, const DisplacementField& after, double) {
    ++steps;
    const auto j0 = element_determinants(annulus(), deformed_positions(annulus(), before));
    const auto j1 = element_determinants(annulus(), deformed_positions(annulus(), after));
    for (std::size_t e = 0; e < j0.size(); ++e) safe = safe && j1[e] >= j0[e] / 10.0 * (1 - 1e-12);
  };
  AlsCounter als;
  const auto r = newton_solve(annulus(), ut.u, kMaterial, {}, opt, &als);
  CHECK(r.converged);
  CHECK(safe);
  CHECK(steps == r.iterations);
  CHECK(als.count() == r.iterations);
  CHECK(r.residual_history.back() <= 1e-10 * r.reference_norm);
  CHECK(r.reference_norm == doctest::Approx(reference_residual_norm(annulus(), ut.u, kMaterial)));
  CHECK(r.line_search_active > 0);
  CHECK(r.alphas.size() == static_cast<std::size_t>(r.iterations));
}

TEST_CASE("Newton converges quadratically near the solution") {
  const DirichletSpec bc = annulus_dirichlet(annulus(), 0.1);
  const auto ut = iterative_stiffening(annulus(), bc, kMaterial);
  const auto r = newton_solve(annulus(), ut.u, kMaterial);
  REQUIRE(r.converged);
  const auto& h = r.residual_history;
  REQUIRE(h.size() >= 3);
  // The last contraction is much stronger than linear.
  const std::size_t n = h.size();
  CHECK(h[n - 1] / h[n - 2] < 0.1 * h[n - 2] / h[n - 3]);
}

TEST_CASE("ubn solve statuses") {
  const auto ok = ubn_solve(annulus(), annulus_dirichlet(annulus(), 0.1), kMaterial);
  CHECK(ok.status == SolveStatus::Converged);
  CHECK(ok.is_iterations == 1);
  CHECK(ok.als_steps == ok.is_iterations + ok.newton_iterations);
  CHECK(ok.final_lambda == 1.0);
  CHECK(tangled_elements(annulus(), ok.final_u).empty());

  const auto fail = ubn_solve(annulus(), annulus_dirichlet(annulus(), 0.8), kMaterial);
  CHECK(fail.status == SolveStatus::UntangleFailed);
  CHECK(fail.newton_iterations == 0);
  CHECK(fail.als_steps == 400);

  UbnOptions capped;
  capped.newton.max_iters = 1;
  const auto stalled = ubn_solve(annulus(), annulus_dirichlet(annulus(), 0.3), kMaterial, {}, capped);
  CHECK(stalled.status == SolveStatus::NewtonStalled);
  CHECK(stalled.newton_iterations == 1);

  const auto rest = ubn_solve(annulus(), annulus_dirichlet(annulus(), 0.0), kMaterial);
  CHECK(rest.status == SolveStatus::Converged);
  CHECK(rest.newton_iterations == 0);

  CHECK(to_string(SolveStatus::Converged) == "Converged");
}

TEST_CASE("indefinite tangents stop Newton when the fallback is off") {
  const DirichletSpec bc = annulus_dirichlet(annulus(), 0.7);
  const auto ut = iterative_stiffening(annulus(), bc, kMaterial);
  REQUIRE(ut.success);
  NewtonOptions strict;
  strict.allow_indefinite = false;
  const auto a = newton_solve(annulus(), ut.u, kMaterial, {}, strict);
  const auto b = newton_solve(annulus(), ut.u, kMaterial);
  CHECK(b.converged);
  if (!a.converged) CHECK(a.message.find("indefinite") != std::string::npos);
}
