#include "support.hpp"

#include <doctest.h>

#include <Eigen/QR>

using namespace ubn;
using ubn::test::kMaterial;

namespace {

Mat fd_stress(const Mat& F, const MaterialParams& p, double h) {
  const int d = static_cast<int>(F.rows());
  Mat P(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat fp = F, fm = F;
      fp(i, j) += h;
      fm(i, j) -= h;
      P(i, j) = (mr_energy(fp, p) - mr_energy(fm, p)) / (2 * h);
    }
  return P;
}

Tangent fd_tangent(const Mat& F, const MaterialParams& p, double h) {
  const int d = static_cast<int>(F.rows());
  Tangent A(d * d, d * d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      Mat fp = F, fm = F;
      fp(k, l) += h;
      fm(k, l) -= h;
      const Mat dP = (mr_stress(fp, p) - mr_stress(fm, p)) / (2 * h);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i * d + j, k * d + l) = dP(i, j);
    }
  return A;
}

Mat random_rotation(int d, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace

TEST_CASE("lame constants from E and nu") {
  const auto p = lame_from_young_poisson(1.0, 0.3);
  CHECK(p.lambda == doctest::Approx(0.3 / (1.3 * 0.4)).epsilon(1e-15));
  CHECK(p.mu == doctest::Approx(1.0 / 2.6).epsilon(1e-15));
  CHECK_THROWS_AS(lame_from_young_poisson(0.0, 0.3), ArgumentError);
  CHECK_THROWS_AS(lame_from_young_poisson(1.0, 0.5), ArgumentError);
  CHECK_THROWS_AS(lame_from_young_poisson(1.0, -0.1), ArgumentError);
}

TEST_CASE("reference configuration is stress free") {
  for (int d : {2, 3}) {
    const Mat I = Mat::Identity(d, d);
    CHECK(std::abs(mr_energy(I, kMaterial)) < 1e-14);
    CHECK(mr_stress(I, kMaterial).norm() < 1e-14);
    const Tangent diff = mr_tangent(I, kMaterial) - linear_elastic_tangent(d, kMaterial);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("plane strain invariant carries the out-of-plane stretch") {
  Mat F(2, 2);
  F << 1.2, 0.1, -0.3, 0.9;
  const auto k = kinematics(F);
  CHECK(k.I1 == doctest::Approx(F.squaredNorm() + 1.0));
  CHECK(k.J == doctest::Approx(F.determinant()));
  const Mat E = 0.5 * (F.transpose() * F - Mat::Identity(2, 2));
  CHECK((k.green_strain - E).norm() < 1e-15);
}

TEST_CASE("stress and tangent match finite differences") {
  std::mt19937 rng(7);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Mat F = test::random_gradient(d, rng);
      const Mat P = mr_stress(F, kMaterial);
      const Mat Pfd = fd_stress(F, kMaterial, 1e-6);
      CHECK((P - Pfd).norm() <= 1e-6 * std::max(1.0, P.norm()));
      const Tangent A = mr_tangent(F, kMaterial);
      const Tangent Afd = fd_tangent(F, kMaterial, 1e-6);
      CHECK((A - Afd).norm() <= 1e-5 * std::max(1.0, A.norm()));
      CHECK((A - A.transpose()).norm() <= 1e-12 * A.norm());
    }
  }
}

TEST_CASE("energy is frame indifferent") {
  std::mt19937 rng(11);
  for (int d : {2, 3})
    for (int trial = 0; trial < 20; ++trial) {
      const Mat F = test::random_gradient(d, rng);
      const Mat R = random_rotation(d, rng);
      CHECK(mr_energy(R * F, kMaterial) ==
            doctest::Approx(mr_energy(F, kMaterial)).epsilon(1e-12));
    }
}

TEST_CASE("energy domain and singular gradients") {
  Mat F = Mat::Identity(2, 2);
  F(0, 0) = -1.0;
  CHECK_THROWS_AS(mr_energy(F, kMaterial), DomainError);
  CHECK_NOTHROW(mr_stress(F, kMaterial));
  F(0, 0) = 0.0;
  CHECK_THROWS_AS(mr_stress(F, kMaterial), SingularConfigurationError);
  CHECK_THROWS_AS(mr_tangent(F, kMaterial), SingularConfigurationError);
}

TEST_CASE("linear elastic law is consistent") {
  std::mt19937 rng(3);
  for (int d : {2, 3}) {
    const Mat F = test::random_gradient(d, rng);
    const Mat P = linear_elastic_stress(F, kMaterial);
    const double h = 1e-6;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Mat fp = F, fm = F;
        fp(i, j) += h;
        fm(i, j) -= h;
        const double fd =
            (linear_elastic_energy(fp, kMaterial) - linear_elastic_energy(fm, kMaterial)) / (2 * h);
        CHECK(fd == doctest::Approx(P(i, j)).epsilon(1e-7));
      }
  }
}

TEST_CASE("scalar Newton doubles exactly") {
  for (double j0 : {0.3, 1.0, 2.5, -0.7, -4.0, 1e-3}) {
    const auto it = scalar_newton_doubling(j0, 30);
    REQUIRE(it.size() == 31);
    for (std::size_t k = 1; k < it.size(); ++k) CHECK(it[k] == 2.0 * it[k - 1]);
  }
  CHECK_THROWS_AS(scalar_newton_doubling(0.0, 3), ArgumentError);
}
