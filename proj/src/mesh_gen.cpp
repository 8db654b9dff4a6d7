#include "ubn/mesh_gen.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace ubn {

namespace {

struct RingLayout {
  std::vector<double> radii;
  std::vector<int> counts;
  int total = 0;
};

RingLayout ring_layout(double r_inner, double r_outer, double h) {
  RingLayout lay;
  const double gap = r_outer - r_inner;
  const int rings = std::max(2, static_cast<int>(std::lround(gap / (h * std::sqrt(3.0) / 2.0))) + 1);
  for (int k = 0; k < rings; ++k) {
    const double r = r_inner + gap * k / (rings - 1);
    const int n = std::max(8, static_cast<int>(std::lround(2.0 * std::numbers::pi * r / h)));
    lay.radii.push_back(r);
    lay.counts.push_back(n);
    lay.total += n;
  }
  return lay;
}

}  // namespace

ReferenceMesh generate_annulus(double r_inner, double r_outer, int target_node_count) {
  if (!(r_inner > 0.0) || !(r_outer > r_inner))
    throw ArgumentError("annulus radii must satisfy 0 < r_inner < r_outer");
  if (target_node_count < 16) throw ArgumentError("annulus needs at least 16 target nodes");

  // Scan element sizes and keep the layout whose node count is closest.
  RingLayout best;
  int best_err = -1;
  const double h_max = 2.0 * std::numbers::pi * r_outer / 8.0;
  for (int s = 0; s < 4000; ++s) {
    const double h = h_max * std::pow(0.999, s);
    RingLayout lay = ring_layout(r_inner, r_outer, h);
    const int err = std::abs(lay.total - target_node_count);
    const bool done = lay.total > 4 * target_node_count;
    if (best_err < 0 || err < best_err) {
      best = std::move(lay);
      best_err = err;
    }
    if (done) break;
  }

  const int rings = static_cast<int>(best.radii.size());
  std::vector<int> first(rings, 0);
  for (int k = 1; k < rings; ++k) first[k] = first[k - 1] + best.counts[k - 1];

  Eigen::MatrixXd coords(2, best.total);
  std::vector<int> markers(best.total, 0);
  std::vector<double> offset(rings, 0.0);
  for (int k = 0; k < rings; ++k) {
    const int n = best.counts[k];
    offset[k] = (k % 2) * std::numbers::pi / n;
    for (int i = 0; i < n; ++i) {
      const double t = offset[k] + 2.0 * std::numbers::pi * i / n;
      coords(0, first[k] + i) = best.radii[k] * std::cos(t);
      coords(1, first[k] + i) = best.radii[k] * std::sin(t);
    }
  }
  for (int i = 0; i < best.counts.front(); ++i) markers[i] = kInnerCircleMarker;
  for (int i = 0; i < best.counts.back(); ++i) markers[first.back() + i] = kOuterCircleMarker;

  // Zip consecutive rings together, always advancing along the ring whose
  // next node comes first in angle.
  std::vector<int> conn;
  for (int k = 0; k + 1 < rings; ++k) {
    const int na = best.counts[k];
    const int nb = best.counts[k + 1];
    auto angle_a = [&](int i) { return offset[k] + 2.0 * std::numbers::pi * i / na; };
    auto angle_b = [&](int j) { return offset[k + 1] + 2.0 * std::numbers::pi * j / nb; };
    auto node_a = [&](int i) { return first[k] + i % na; };
    auto node_b = [&](int j) { return first[k + 1] + j % nb; };
    int i = 0;
    int j = 0;
    while (i < na || j < nb) {
      const bool advance_a = j == nb || (i < na && angle_a(i + 1) < angle_b(j + 1));
      if (advance_a) {
        conn.insert(conn.end(), {node_a(i), node_a(i + 1), node_b(j)});
        ++i;
      } else {
        conn.insert(conn.end(), {node_a(i), node_b(j + 1), node_b(j)});
        ++j;
      }
    }
  }
  return ReferenceMesh(2, std::move(coords), std::move(conn), std::move(markers));
}

DirichletSpec annulus_dirichlet(const ReferenceMesh& mesh, double f) {
  if (mesh.dim() != 2) throw ClassificationError("annulus boundary conditions need a 2D mesh");
  double r_in = std::numeric_limits<double>::infinity();
  double r_out = 0.0;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (!mesh.is_dirichlet(i)) continue;
    const double r = mesh.node(i).norm();
    r_in = std::min(r_in, r);
    r_out = std::max(r_out, r);
  }
  if (!(r_out > r_in)) throw ClassificationError("mesh has no annular Dirichlet boundary");
  const double tol = 1e-9 * r_out;

  DirichletSpec bc = DirichletSpec::identity(mesh);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (!mesh.is_dirichlet(i)) continue;
    const auto x = mesh.node(i);
    const double r = x.norm();
    const double theta = std::atan2(x[1], x[0]);
    if (std::abs(r - r_out) <= tol) {
      bc.positions(0, i) = r_out * std::cos(theta + f);
      bc.positions(1, i) = r_out * std::sin(theta + f);
    } else if (std::abs(r - r_in) <= tol) {
      const double rn = r_in + f * (r_out - r_in);
      bc.positions(0, i) = rn * std::cos(theta);
      bc.positions(1, i) = rn * std::sin(theta);
    } else {
      std::ostringstream msg;
      msg << "Dirichlet node " << i << " at radius " << r << " lies on neither circle";
      throw ClassificationError(msg.str());
    }
  }
  return bc;
}

ReferenceMesh generate_bar(const BarSpec& spec) {
  const auto [nx, ny, nz] = spec.cells;
  if (nx < 1 || ny < 1 || nz < 1) throw ArgumentError("bar needs at least one cell per axis");
  for (double l : spec.lengths)
    if (!(l > 0.0)) throw ArgumentError("bar lengths must be positive");
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  const int n = (nx + 1) * (ny + 1) * (nz + 1);
  Eigen::MatrixXd coords(3, n);
  std::vector<int> markers(n, 0);
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        const int v = id(i, j, k);
        coords(0, v) = spec.lengths[0] * i / nx;
        coords(1, v) = spec.lengths[1] * j / ny;
        coords(2, v) = spec.lengths[2] * k / nz;
        if (k == 0) markers[v] = kFixedFaceMarker;
        if (k == nz) markers[v] = kPulledFaceMarker;
      }
  const Eigen::MatrixXd lattice = coords;
  if (spec.jitter > 0.0) {
    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> unit(-spec.jitter, spec.jitter);
    for (int k = 1; k < nz; ++k)
      for (int j = 1; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
          for (int a = 0; a < 3; ++a)
            coords(a, id(i, j, k)) += unit(rng) * spec.lengths[a] / spec.cells[a];
  }
  // Kuhn subdivision: one tetrahedron per ordering of the three axes, all
  // sharing the main diagonal of the cube, so neighbouring cubes conform.
  static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                       {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<int> conn;
  conn.reserve(static_cast<std::size_t>(nx) * ny * nz * 24);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& perm : kPerms) {
          std::array<int, 3> c{i, j, k};
          conn.push_back(id(c[0], c[1], c[2]));
          for (int axis : perm) {
            ++c[axis];
            conn.push_back(id(c[0], c[1], c[2]));
          }
        }
  if (spec.jitter > 0.0) {
    Eigen::Matrix<double, 3, 4> x;
    Eigen::Matrix<double, 3, 4> x0;
    for (std::size_t e = 0; e < conn.size(); e += 4) {
      for (int a = 0; a < 4; ++a) {
        x.col(a) = coords.col(conn[e + a]);
        x0.col(a) = lattice.col(conn[e + a]);
      }
      if (!(simplex_signed_volume(x) * simplex_signed_volume(x0) > 0.0))
        throw ArgumentError("bar jitter too large: element " + std::to_string(e / 4) + " inverted");
    }
  }
  return ReferenceMesh(3, std::move(coords), std::move(conn), std::move(markers));
}

SliverResult inject_sliver(const ReferenceMesh& mesh, const SliverSpec& spec) {
  if (mesh.dim() != 3) throw ArgumentError("sliver injection needs a tetrahedral mesh");
  if (!(spec.flatness > 0.0) || !(spec.flatness < 1.0))
    throw ArgumentError("sliver flatness must lie in (0, 1)");
  const Eigen::Vector3d dir = spec.pull_direction.normalized();

  struct Candidate {
    int element = -1;
    int node = -1;
    Eigen::Vector3d position;
    double quality = -1.0;
  };
  Candidate best;

  for (int v = 0; v < mesh.num_nodes(); ++v) {
    if (mesh.node_class(v) != NodeClass::Interior) continue;
    for (int e : mesh.node_elements()[v]) {
      auto conn = mesh.element(e);
      std::array<int, 3> face{};
      int k = 0;
      int pulled = 0;
      for (int a : conn)
        if (a != v) {
          face[k++] = a;
          if (mesh.marker(a) == spec.pulled_marker) ++pulled;
        }
      if (pulled == 0 || pulled == 3) continue;

      const Eigen::Vector3d p0 = mesh.node(face[0]);
      const Eigen::Vector3d p1 = mesh.node(face[1]);
      const Eigen::Vector3d p2 = mesh.node(face[2]);
      Eigen::Vector3d normal = (p1 - p0).cross(p2 - p0).normalized();
      const Eigen::Vector3d xv = mesh.node(v);
      double height = normal.dot(xv - p0);
      if (height < 0.0) {
        normal = -normal;
        height = -height;
      }

      const Eigen::Vector3d target = (p0 + p1 + p2) / 3.0 + spec.flatness * height * normal;

      // The flattened element must shrink when only the pulled vertices advance.
      Eigen::MatrixXd before(3, 4);
      before << target, p0, p1, p2;
      Eigen::MatrixXd after = before;
      for (int a = 0; a < 3; ++a)
        if (mesh.marker(face[a]) == spec.pulled_marker)
          after.col(a + 1) += 1e-3 * spec.flatness * height * dir;
      const double v0 = simplex_signed_volume(before);
      const double v1 = simplex_signed_volume(after);
      if (!(std::abs(v1) < std::abs(v0) && v0 * v1 > 0.0)) continue;

      // Every other tetrahedron around v must stay well shaped.
      double quality = std::numeric_limits<double>::infinity();
      Eigen::MatrixXd x(3, 4);
      for (int other : mesh.node_elements()[v]) {
        if (other == e) continue;
        auto oc = mesh.element(other);
        for (int a = 0; a < 4; ++a) x.col(a) = oc[a] == v ? target : Eigen::Vector3d(mesh.node(oc[a]));
        quality = std::min(quality, simplex_signed_volume(x) / mesh.reference_volume(other));
      }
      if (quality > best.quality) best = {e, v, target, quality};
    }
  }
  if (best.element < 0 || best.quality < 0.05)
    throw ArgumentError("no vertex next to the pulled face can be flattened safely");

  Eigen::MatrixXd coords = mesh.coords();
  coords.col(best.node) = best.position;
  return {ReferenceMesh(3, std::move(coords), mesh.connectivity(), mesh.markers()), best.element,
          best.node};
}

DirichletSpec pull_dirichlet(const ReferenceMesh& mesh, int fixed_marker, int pulled_marker,
                             const Vec& displacement) {
  if (displacement.size() != mesh.dim()) throw ArgumentError("pull vector has the wrong dimension");
  bool has_fixed = false;
  bool has_pulled = false;
  DirichletSpec bc = DirichletSpec::identity(mesh);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.marker(i) == fixed_marker) has_fixed = true;
    if (mesh.marker(i) == pulled_marker) {
      has_pulled = true;
      bc.positions.col(i) += displacement;
    }
  }
  if (!has_fixed || !has_pulled)
    throw ClassificationError("mesh lacks the fixed or pulled Dirichlet surface group");
  return bc;
}

}  // namespace ubn
