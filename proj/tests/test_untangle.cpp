#include "support.hpp"

#include "ubn/mesh_gen.hpp"
#include "ubn/untangle.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ubn;
using ubn::test::kMaterial;

namespace {

const ReferenceMesh& annulus() {
  static const ReferenceMesh mesh = generate_annulus(0.3, 1.0, 182);
  return mesh;
}

}  // namespace

TEST_CASE("mild twist untangles on the first solve") {
  AlsCounter als;
  const auto r = iterative_stiffening(annulus(), annulus_dirichlet(annulus(), 0.1), kMaterial, {},
                                      {}, &als);
  CHECK(r.success);
  CHECK(r.iterations == 1);
  CHECK(als.count() == 1);
  CHECK(r.remaining_tangled == 0);
  for (double m : r.multipliers) CHECK(m == 1.0);
}

TEST_CASE("stiffening leaves an untangled field with compounding multipliers") {
  std::ostringstream trace;
  UntangleOptions opt;
  opt.trace = &trace;
  AlsCounter als;
  const auto r =
      iterative_stiffening(annulus(), annulus_dirichlet(annulus(), 0.6), kMaterial, {}, opt, &als);
  REQUIRE(r.success);
  CHECK(r.iterations > 1);
  CHECK(als.count() == r.iterations);
  CHECK(tangled_elements(annulus(), r.u).empty());
  for (double d : element_determinants(annulus(), deformed_positions(annulus(), r.u)))
    CHECK(d > 0.0);
  int flagged = 0;
  for (std::size_t e = 0; e < r.multipliers.size(); ++e) {
    CHECK(r.multipliers[e] == doctest::Approx(std::pow(1.5, r.flag_counts[e])).epsilon(1e-14));
    flagged += r.flag_counts[e] > 0;
  }
  CHECK(flagged > 0);

  // Dirichlet columns carry the prescription exactly.
  const DirichletSpec bc = annulus_dirichlet(annulus(), 0.6);
  for (int i = 0; i < annulus().num_nodes(); ++i)
    if (annulus().is_dirichlet(i))
      CHECK((annulus().node(i) + r.u.values.col(i) - bc.positions.col(i)).norm() < 1e-15);

  // One header plus one row per solve; the last row reports no inversions.
  std::istringstream in(trace.str());
  std::string line, last;
  int rows = -1;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == r.iterations);
  CHECK(last.rfind(std::to_string(r.iterations) + ",0,", 0) == 0);
}

TEST_CASE("without stiffening the first linear solve is returned as is") {
  UntangleOptions opt;
  opt.stiffen = false;
  opt.max_iters = 3;
  const auto r = iterative_stiffening(annulus(), annulus_dirichlet(annulus(), 0.6), kMaterial, {},
                                      opt);
  CHECK(!r.success);
  CHECK(r.iterations == 3);
  CHECK(r.remaining_tangled > 0);
  for (double m : r.multipliers) CHECK(m == 1.0);
}

TEST_CASE("severe twist exhausts the iteration cap") {
  AlsCounter als;
  const auto r = iterative_stiffening(annulus(), annulus_dirichlet(annulus(), 0.8), kMaterial, {},
                                      {}, &als);
  CHECK(!r.success);
  CHECK(r.iterations == 400);
  CHECK(als.count() == 400);
  CHECK(r.remaining_tangled > 0);
}
