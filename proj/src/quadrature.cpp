#include "ubn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ubn {

namespace {

// Adds every distinct permutation of `bary` with the per-point weight w.
void add_orbit(QuadratureRule& r, std::array<double, 4> bary, double w) {
  const int n = r.dim + 1;
  std::array<int, 4> perm{0, 1, 2, 3};
  std::set<std::array<double, 4>> seen;
  do {
    std::array<double, 4> p{0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) p[i] = bary[perm[i]];
    if (seen.insert(p).second) {
      r.points.push_back(p);
      r.weights.push_back(w);
    }
  } while (std::next_permutation(perm.begin(), perm.begin() + n));
}

QuadratureRule make_segment_rule() {
  QuadratureRule r;
  r.dim = 1;
  const double t = 0.5 * std::sqrt(0.6);
  r.points = {{0.5 - t, 0.5 + t, 0.0, 0.0}, {0.5, 0.5, 0.0, 0.0}, {0.5 + t, 0.5 - t, 0.0, 0.0}};
  r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  return r;
}

QuadratureRule make_triangle_rule() {
  QuadratureRule r;
  r.dim = 2;
  const double a1 = 0.4459484909159648863183293;
  const double a2 = 0.09157621350977074345957146;
  add_orbit(r, {a1, a1, 1.0 - 2.0 * a1, 0.0}, 0.670144769034034397085021 / 3.0);
  add_orbit(r, {a2, a2, 1.0 - 2.0 * a2, 0.0}, 0.329855230965965602914979 / 3.0);
  return r;
}

QuadratureRule make_tetrahedron_rule() {
  QuadratureRule r;
  r.dim = 3;
  const double a1 = 0.3169223093539307579829;
  const double a2 = 0.09221134519479177421155;
  const double b = 0.05335316608543087060718;
  add_orbit(r, {0.25, 0.25, 0.25, 0.25}, 0.09034294559407885390167);
  add_orbit(r, {a1, a1, a1, 1.0 - 3.0 * a1}, 0.3214365486878129763457 / 4.0);
  add_orbit(r, {a2, a2, a2, 1.0 - 3.0 * a2}, 0.2896793926755482359991 / 4.0);
  add_orbit(r, {b, b, 0.5 - b, 0.5 - b}, 0.2985411130425599337536 / 6.0);
  return r;
}

}  // namespace

const QuadratureRule& rule(int dim) {
  static const QuadratureRule segment = make_segment_rule();
  static const QuadratureRule triangle = make_triangle_rule();
  static const QuadratureRule tetrahedron = make_tetrahedron_rule();
  switch (dim) {
    case 1: return segment;
    case 2: return triangle;
    case 3: return tetrahedron;
    default: throw ArgumentError("quadrature rules exist for dim 1, 2 and 3 only");
  }
}

double integrate_element(const std::function<double(const QuadraturePoint&)>& f,
                         const ReferenceMesh& mesh, int e, const DisplacementField& u) {
  const int d = mesh.dim();
  const auto& q = rule(d);
  auto conn = mesh.element(e);
  double sum = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    QuadraturePoint pt{std::span<const double>(q.points[k].data(), d + 1), Vec::Zero(d), Vec::Zero(d)};
    for (int a = 0; a <= d; ++a) {
      pt.reference += q.points[k][a] * mesh.node(conn[a]);
      pt.deformed += q.points[k][a] * (mesh.node(conn[a]) + u.values.col(conn[a]));
    }
    sum += q.weights[k] * f(pt);
  }
  return sum * mesh.reference_volume(e);
}

}  // namespace ubn
