#pragma once

#include "ubn/mesh.hpp"

#include <array>
#include <functional>
#include <vector>

namespace ubn {

/// Symmetric simplex rule with barycentric points and weights normalized to
/// sum to one (multiply by the simplex measure to integrate).
struct QuadratureRule {
  int dim = 0;
  std::vector<std::array<double, 4>> points;  // dim+1 barycentric entries used
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// dim 2: 6-point triangle rule exact through degree 4.
/// dim 3: 15-point tetrahedron rule exact through degree 5.
/// dim 1: 3-point Gauss-Legendre segment rule (degree 5), used for
///        traction integrals on the edges of 2D meshes.
/// All weights are positive and every point is strictly interior.
const QuadratureRule& rule(int dim);

/// Values available to the integrand at one quadrature point.
struct QuadraturePoint {
  std::span<const double> barycentric;  // dim+1 entries
  Vec reference;                        // X
  Vec deformed;                         // X + u
};

/// sum_q w_q f(point_q) |e|, using the reference measure of element e.
double integrate_element(const std::function<double(const QuadraturePoint&)>& f,
                         const ReferenceMesh& mesh, int e, const DisplacementField& u);

}  // namespace ubn
