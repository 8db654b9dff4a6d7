#pragma once

#include "ubn/assembly.hpp"
#include "ubn/material.hpp"
#include "ubn/mesh.hpp"

#include <Eigen/LU>

#include <random>

namespace ubn::test {

inline const MaterialParams kMaterial = lame_from_young_poisson(1.0, 0.3);

/// Random gradient with det in [0.2, 5]: rotation * symmetric stretch * rotation,
/// singular values chosen so their product lands in range.
inline Mat random_gradient(int d, std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> logdet(std::log(0.2), std::log(5.0));
  for (;;) {
    Mat a = Mat::Identity(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) += 0.6 * unit(rng);
    const double det = a.determinant();
    if (det <= 0.0) continue;
    // Rescale to a target determinant drawn log-uniformly.
    const double target = std::exp(logdet(rng));
    return a * std::pow(target / det, 1.0 / d);
  }
}

/// Unit square [0,1]^2 split into n x n cells of two triangles each. Left
/// edge nodes get marker 1, right edge nodes marker 2, other nodes 0.
inline ReferenceMesh square_mesh(int n, bool clamp = true) {
  const int m = n + 1;
  Eigen::MatrixXd x(2, m * m);
  std::vector<int> markers(m * m, 0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int v = j * m + i;
      x(0, v) = double(i) / n;
      x(1, v) = double(j) / n;
      if (clamp && i == 0) markers[v] = 1;
      if (clamp && i == n) markers[v] = 2;
    }
  std::vector<int> conn;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = j * m + i, b = a + 1, c = a + m, d = c + 1;
      conn.insert(conn.end(), {a, b, d, a, d, c});
    }
  return ReferenceMesh(2, x, conn, markers);
}

/// Displacement with every node moved by a smooth random field of size `amp`.
inline DisplacementField random_displacement(const ReferenceMesh& mesh, double amp,
                                             std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-amp, amp);
  DisplacementField u = DisplacementField::zero(mesh);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    for (int a = 0; a < mesh.dim(); ++a) u.values(a, i) = unit(rng);
  return u;
}

/// Relative error |a - b| / max(|b|, floor).
inline double rel(double a, double b, double floor = 1.0) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace ubn::test
