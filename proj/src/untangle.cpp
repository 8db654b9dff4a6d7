#include "ubn/untangle.hpp"

#include <algorithm>
#include <ostream>

namespace ubn {

UntangleResult iterative_stiffening(const ReferenceMesh& mesh, const DirichletSpec& dirichlet,
                                    const MaterialParams& p, const LoadSpec& loads,
                                    const UntangleOptions& options, AlsCounter* counter) {
  AlsCounter local;
  AlsCounter& als = counter ? *counter : local;
  const DofMap dofs(mesh);

  UntangleResult out;
  out.multipliers.assign(mesh.num_elements(), 1.0);
  out.flag_counts.assign(mesh.num_elements(), 0);
  out.u = initial_displacement(mesh, dirichlet);
  if (options.trace) *options.trace << "iteration,inverted,min_det\n";

  for (int it = 1; it <= options.max_iters; ++it) {
    const SparseSymSystem sys =
        assemble_linear_system(mesh, dofs, dirichlet, p, out.multipliers, loads);
    Eigen::VectorXd x;
    try {
      x = als.solve(sys);
    } catch (const IndefiniteSystemError& err) {
      out.iterations = it;
      out.message = std::string("linear elasticity solve failed: ") + err.what();
      return out;
    }
    dofs.scatter(x, out.u);
    out.iterations = it;

    const auto dets = element_determinants(mesh, deformed_positions(mesh, out.u));
    std::vector<int> inverted;
    for (int e = 0; e < mesh.num_elements(); ++e)
      if (dets[e] <= 0.0) inverted.push_back(e);
    out.remaining_tangled = static_cast<int>(inverted.size());
    if (options.trace)
      *options.trace << it << ',' << inverted.size() << ','
                     << *std::min_element(dets.begin(), dets.end()) << '\n';
    if (inverted.empty()) {
      out.success = true;
      return out;
    }
    if (options.stiffen) {
      for (int e : inverted) {
        out.multipliers[e] *= options.stiffening_factor;
        ++out.flag_counts[e];
      }
    }
  }
  out.message = "mesh still tangled after the iteration cap";
  return out;
}

}  // namespace ubn
