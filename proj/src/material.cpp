#include "ubn/material.hpp"

#include <Eigen/LU>

#include <cmath>

namespace ubn {

MaterialParams lame_from_young_poisson(double young, double poisson) {
  if (!(young > 0.0)) throw ArgumentError("Young's modulus must be positive");
  if (!(poisson > 0.0) || !(poisson < 0.5))
    throw ArgumentError("Poisson ratio must lie in (0, 0.5)");
  MaterialParams p;
  p.lambda = poisson * young / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  p.mu = young / (2.0 * (1.0 + poisson));
  return p;
}

ElementKinematics kinematics(const Mat& F) {
  ElementKinematics k;
  const auto d = F.rows();
  k.F = F;
  k.J = F.determinant();
  const Mat c = F.transpose() * F;
  k.I1 = c.trace() + (d == 2 ? 1.0 : 0.0);
  k.green_strain = 0.5 * (c - Mat::Identity(d, d));
  return k;
}

double mr_energy(const Mat& F, const MaterialParams& p) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw DomainError("Mooney-Rivlin energy undefined for det(F) <= 0");
  const double I1 = F.squaredNorm() + (F.rows() == 2 ? 1.0 : 0.0);
  return 0.25 * p.lambda * (J * J - 1.0) - (0.5 * p.lambda + p.mu) * std::log(J) +
         0.5 * p.mu * (I1 - 3.0);
}

Mat mr_stress(const Mat& F, const MaterialParams& p) {
  const double J = F.determinant();
  if (J == 0.0) throw SingularConfigurationError("singular deformation gradient");
  const double c = 0.5 * p.lambda * J * J - 0.5 * p.lambda - p.mu;
  const Mat finv_t = F.inverse().transpose();
  return c * finv_t + p.mu * F;
}

Tangent mr_tangent(const Mat& F, const MaterialParams& p) {
  const double J = F.determinant();
  if (J == 0.0) throw SingularConfigurationError("singular deformation gradient");
  const auto d = F.rows();
  const double c = 0.5 * p.lambda * J * J - 0.5 * p.lambda - p.mu;
  const double a = p.lambda * J * J;
  const Mat g = F.inverse();
  Tangent t(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index jj = 0; jj < d; ++jj)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) {
          double v = a * g(jj, i) * g(l, k) - c * g(jj, k) * g(l, i);
          if (i == k && jj == l) v += p.mu;
          t(i * d + jj, k * d + l) = v;
        }
  return t;
}

double linear_elastic_energy(const Mat& F, const MaterialParams& p) {
  const auto d = F.rows();
  const Mat h = F - Mat::Identity(d, d);
  const Mat eps = 0.5 * (h + h.transpose());
  const double tr = eps.trace();
  return p.mu * eps.squaredNorm() + 0.5 * p.lambda * tr * tr;
}

Mat linear_elastic_stress(const Mat& F, const MaterialParams& p) {
  const auto d = F.rows();
  const Mat h = F - Mat::Identity(d, d);
  const Mat eps = 0.5 * (h + h.transpose());
  return 2.0 * p.mu * eps + p.lambda * eps.trace() * Mat::Identity(d, d);
}

Tangent linear_elastic_tangent(int dim, const MaterialParams& p) {
  const int d = dim;
  Tangent t = Tangent::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double v = 0.0;
          if (i == jj && k == l) v += p.lambda;
          if (i == k && jj == l) v += p.mu;
          if (i == l && jj == k) v += p.mu;
          t(i * d + jj, k * d + l) = v;
        }
  return t;
}

std::vector<double> scalar_newton_doubling(double J0, int steps, const MaterialParams& p) {
  const double c = 0.5 * p.lambda + p.mu;
  if (!(c > 0.0)) throw ArgumentError("lambda/2 + mu must be positive");
  if (J0 == 0.0) throw ArgumentError("J0 must be nonzero");
  // Psi' = -c/J and Psi'' = c/J^2, so the Newton correction -Psi'/Psi''
  // reduces to J itself and each iterate is 2J in exact arithmetic.
  std::vector<double> seq{J0};
  double j = J0;
  for (int s = 0; s < steps; ++s) {
    j = j + j;
    seq.push_back(j);
  }
  return seq;
}

}  // namespace ubn
