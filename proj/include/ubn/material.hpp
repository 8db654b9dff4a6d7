#pragma once

#include "ubn/types.hpp"

#include <vector>

namespace ubn {

/// Lame constants of the compressible Mooney-Rivlin (and linear elastic) law.
struct MaterialParams {
  double lambda = 0.0;
  double mu = 0.0;
};

/// lambda = nu E / ((1 + nu)(1 - 2 nu)), mu = E / (2 (1 + nu)).
/// Throws ArgumentError unless E > 0 and 0 < nu < 0.5.
MaterialParams lame_from_young_poisson(double young, double poisson);

/// Pointwise kinematic quantities. For a 2x2 gradient the plane-strain
/// embedding is used, so I1 carries the unit out-of-plane stretch.
struct ElementKinematics {
  Mat F;
  double J = 0.0;
  double I1 = 0.0;
  Mat green_strain;
};

ElementKinematics kinematics(const Mat& F);

// The Mooney-Rivlin functions below infer the mode from the size of F:
// 2x2 is plane strain, 3x3 is full 3D.
//
//   Psi(F) = lambda/4 (J^2 - 1) - (lambda/2 + mu) ln J + mu/2 (I1 - 3)

/// Strain energy density. Throws DomainError when det(F) <= 0.
double mr_energy(const Mat& F, const MaterialParams& p);

/// First Piola-Kirchhoff stress
///   P = (lambda/2 J^2 - lambda/2 - mu) F^{-T} + mu F.
/// Defined for J < 0 as well; throws SingularConfigurationError when J == 0.
Mat mr_stress(const Mat& F, const MaterialParams& p);

/// dP/dF. With c = lambda/2 J^2 - lambda/2 - mu and G = F^{-1},
///   A_{iJkL} = lambda J^2 G_{Ji} G_{Lk} - c G_{Jk} G_{Li} + mu d_ik d_JL.
Tangent mr_tangent(const Mat& F, const MaterialParams& p);

/// Small-strain energy mu sum eps_ij^2 + lambda/2 (tr eps)^2, eps = sym(F - I).
double linear_elastic_energy(const Mat& F, const MaterialParams& p);

/// 2 mu eps + lambda tr(eps) I.
Mat linear_elastic_stress(const Mat& F, const MaterialParams& p);

/// Isotropic elasticity tensor lambda d_iJ d_kL + mu (d_ik d_JL + d_iL d_Jk).
Tangent linear_elastic_tangent(int dim, const MaterialParams& p);

/// Scalar Newton iteration on Psi(J) = -(lambda/2 + mu) ln J, returning
/// J0 followed by `steps` iterates. Each iterate is exactly twice the last,
/// so a negative start runs off to -infinity.
std::vector<double> scalar_newton_doubling(double J0, int steps,
                                           const MaterialParams& p = {0.576923076923077,
                                                                      0.384615384615385});

}  // namespace ubn
