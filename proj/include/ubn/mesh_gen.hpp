#pragma once

#include "ubn/mesh.hpp"

#include <array>

namespace ubn {

/// Markers used by the generators.
inline constexpr int kInnerCircleMarker = 1;
inline constexpr int kOuterCircleMarker = 2;
inline constexpr int kFixedFaceMarker = 2;
inline constexpr int kPulledFaceMarker = 3;

/// Ring-based triangulation of the annulus r_inner <= |X| <= r_outer centred
/// at the origin. Nodes on both circles are Dirichlet (inner marker 1, outer
/// marker 2). The node count lands within 25% of the target.
ReferenceMesh generate_annulus(double r_inner, double r_outer, int target_node_count);

/// Dirichlet map for the annulus test: the outer circle rotates by f
/// radians, the inner circle moves a fraction f of the gap outward.
/// Circle membership is decided with tolerance 1e-9 * r_outer.
DirichletSpec annulus_dirichlet(const ReferenceMesh& mesh, double f);

struct BarSpec {
  std::array<double, 3> lengths{24.0, 24.0, 96.0};
  std::array<int, 3> cells{6, 6, 24};
  /// Interior nodes move by up to jitter * cell size per axis (seeded).
  double jitter = 0.0;
  unsigned seed = 1;
};

/// Box [0,Lx]x[0,Ly]x[0,Lz] split into cubes of six tetrahedra each. The
/// z = 0 face carries kFixedFaceMarker and z = Lz carries kPulledFaceMarker.
/// Throws ArgumentError when the jitter inverts an element.
ReferenceMesh generate_bar(const BarSpec& spec);

struct SliverSpec {
  /// Height of the flattened vertex above the opposite face, relative to
  /// its original altitude.
  double flatness = 0.002;
  int pulled_marker = kPulledFaceMarker;
  /// A pure axial pull never shrinks a tetrahedron of a convex structured
  /// bar, so the default leans sideways.
  Eigen::Vector3d pull_direction{1.0, 0.0, 1.0};
};

struct SliverResult {
  ReferenceMesh mesh;
  int element = -1;  // index of the flattened tetrahedron
  int node = -1;     // the relocated vertex
};

/// Moves one unconstrained vertex next to the pulled face almost onto the
/// plane of the opposite face of one of its tetrahedra, producing a flat
/// element whose volume shrinks when only the pulled face moves. The other
/// elements around the vertex keep at least 5% of their volume. Throws
/// ArgumentError when no such vertex exists.
SliverResult inject_sliver(const ReferenceMesh& mesh, const SliverSpec& spec);

/// Nodes with `fixed_marker` keep their position, nodes with
/// `pulled_marker` translate by `displacement`; other Dirichlet nodes stay.
DirichletSpec pull_dirichlet(const ReferenceMesh& mesh, int fixed_marker, int pulled_marker,
                             const Vec& displacement);

}  // namespace ubn
