#pragma once

#include "ubn/assembly.hpp"

#include <iosfwd>
#include <string>

namespace ubn {

struct UntangleOptions {
  int max_iters = 400;
  /// Scale applied to an inverted element's stiffness each time it is flagged.
  double stiffening_factor = 1.5;
  /// When false, multipliers stay at 1 and the first iterate is the plain
  /// linear-elastic warp of the boundary motion.
  bool stiffen = true;
  /// CSV rows "iteration,inverted,min_det" are written here when set.
  std::ostream* trace = nullptr;
};

struct UntangleResult {
  bool success = false;
  DisplacementField u;
  int iterations = 0;  // linear solves performed, one ALS step each
  StiffnessMultipliers multipliers;
  std::vector<int> flag_counts;  // times each element was found inverted
  int remaining_tangled = 0;
  std::string message;
};

/// Iterative stiffening: solve linear elasticity with per-element stiffness
/// multipliers, multiply the stiffness of every element inverted in that
/// solution by 1.5 (compounding across iterations), and repeat until no
/// element is inverted or `max_iters` solves have been spent. A failed
/// linear solve also ends the loop unsuccessfully.
UntangleResult iterative_stiffening(const ReferenceMesh& mesh, const DirichletSpec& dirichlet,
                                    const MaterialParams& p, const LoadSpec& loads = {},
                                    const UntangleOptions& options = {},
                                    AlsCounter* counter = nullptr);

}  // namespace ubn
