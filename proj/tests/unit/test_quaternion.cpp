#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "invobs/errors.hpp"
#include "invobs/ins.hpp"
#include "invobs/noise.hpp"
#include "invobs/quaternion.hpp"

using namespace invobs;
using std::numbers::pi;

namespace {

const Quaternion one{1, 0, 0, 0}, e1{0, 1, 0, 0}, e2{0, 0, 1, 0}, e3{0, 0, 0, 1};

double dist(const Quaternion& a, const Quaternion& b) { return (a.coeffs() - b.coeffs()).norm(); }

}  // namespace

TEST(Quaternion, MultiplicationTable) {
  EXPECT_EQ(dist(e1 * e2, e3), 0.0);
  EXPECT_EQ(dist(e2 * e3, e1), 0.0);
  EXPECT_EQ(dist(e3 * e1, e2), 0.0);
  EXPECT_EQ(dist(e2 * e1, -e3), 0.0);
  EXPECT_EQ(dist(e1 * e1, -one), 0.0);
  EXPECT_EQ(dist(e2 * e2, -one), 0.0);
  EXPECT_EQ(dist(e3 * e3, -one), 0.0);
  const Quaternion q{0.3, -1.2, 2.0, 0.7};
  EXPECT_EQ(dist(one * q, q), 0.0);
  EXPECT_EQ(dist(q * one, q), 0.0);
}

TEST(Quaternion, ProductMatchesHamiltonFormulaAndMatrices) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Quaternion p{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    const Quaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    // scalar/vector form: (p0 q0 - pv.qv, p0 qv + q0 pv + pv x qv)
    const Eigen::Vector3d pv = p.vec(), qv = q.vec();
    const Eigen::Vector3d vec = p.q0 * qv + q.q0 * pv + pv.cross(qv);
    const Quaternion ref{p.q0 * q.q0 - pv.dot(qv), vec.x(), vec.y(), vec.z()};
    EXPECT_LT(dist(p * q, ref), 1e-13);
    EXPECT_LT((left_mult_matrix(p) * q.coeffs() - ref.coeffs()).norm(), 1e-13);
    EXPECT_LT((right_mult_matrix(q) * p.coeffs() - ref.coeffs()).norm(), 1e-13);
  }
}

TEST(Quaternion, NormAndInverse) {
  EXPECT_DOUBLE_EQ(norm({1, 2, 2, 4}), 5.0);
  EXPECT_EQ(dist(qinv(one), one), 0.0);
  EXPECT_EQ(dist(qinv(e1), -e1), 0.0);
  EXPECT_THROW(qinv({0, 0, 0, 0}), DomainError);
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Quaternion u = ins::random_unit_quaternion(rng);
    EXPECT_LT(std::abs(norm(u) - 1.0), 1e-15);
    EXPECT_LT(dist(u * qinv(u), one), 1e-14);
  }
  const Quaternion q{2, 0, 0, 0};
  EXPECT_LT(dist(q * qinv(q), one), 1e-15);
}

TEST(Quaternion, WedgeIsCrossProductAndStaysPure) {
  const Eigen::Vector3d a(1, 2, 3), b(-0.5, 4, 1);
  EXPECT_LT((wedge(a, b) - a.cross(b)).norm(), 1e-14);
  const Quaternion c = 0.5 * (Quaternion::pure(a) * Quaternion::pure(b) - Quaternion::pure(b) * Quaternion::pure(a));
  EXPECT_EQ(c.q0, 0.0);
}

TEST(Rotate, IdentityAndPureness) {
  const Eigen::Vector3d p(0.2, -3, 1);
  EXPECT_EQ((rotate(one, p) - p).norm(), 0.0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Quaternion q = ins::random_unit_quaternion(rng);
    const Quaternion r = qinv(q) * Quaternion::pure(p) * q;
    EXPECT_LT(std::abs(r.q0), 1e-14);
    EXPECT_LT((r.vec() - rotate(q, p)).norm(), 1e-13);
  }
}

TEST(Rotate, QuarterTurnAboutE3MatchesMatrixOracle) {
  // p -> q^{-1} p q with q = (cos(pi/4), 0, 0, sin(pi/4)) turns by -pi/2 about e3
  const Quaternion q = axis_angle({0, 0, 1}, pi / 2);
  Eigen::Matrix3d Rz;
  const double c = std::cos(-pi / 2), s = std::sin(-pi / 2);
  Rz << c, -s, 0, s, c, 0, 0, 0, 1;
  const Eigen::Vector3d p(1, 0, 0);
  EXPECT_LT((rotate(q, p) - Rz * p).norm(), 1e-12);
  EXPECT_LT((rotation_matrix(q) - Rz).norm(), 1e-12);
}

TEST(Rotate, RejectsNonUnit) {
  EXPECT_THROW(rotate({1.1, 0, 0, 0}, Eigen::Vector3d(1, 0, 0)), DomainError);
  EXPECT_NO_THROW(rotate({1.0 + 5e-7, 0, 0, 0}, Eigen::Vector3d(1, 0, 0)));
}

TEST(BetweenVectors, Cases) {
  EXPECT_LT(dist(between_vectors({0, 0, 1}, {0, 0, 1}), one), 1e-15);
  const Quaternion q = between_vectors({0, 0, 1}, {1, 0, 0});
  EXPECT_LT((rotate(q, Eigen::Vector3d(0, 0, 1)) - Eigen::Vector3d(1, 0, 0)).norm(), 1e-10);
  EXPECT_THROW(between_vectors({0, 0, 1}, {0, 0, -1}), DomainError);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d a = rng.normal3(), b = rng.normal3();
    const Quaternion r = between_vectors(a, b);
    EXPECT_LT((rotate(r, a.normalized()) - b.normalized()).norm(), 1e-10);
  }
}

TEST(RotationAngle, SpinEquivalence) {
  const Quaternion q = axis_angle({1, 1, 0}, 2 * pi / 3);
  EXPECT_NEAR(rotation_angle(q), 2 * pi / 3, 1e-14);
  EXPECT_NEAR(rotation_angle(-q), 2 * pi / 3, 1e-14);
  // the initial estimate of the navigation scenario
  EXPECT_NEAR(rotation_angle({0.5, 0.5, -0.5, 0.5}), 2 * pi / 3, 1e-14);
}

TEST(Normalize, RenormalizedUnitNorm) {
  EXPECT_LT(std::abs(norm(normalized({3, -1, 2, 7})) - 1.0), 1e-15);
  EXPECT_THROW(normalized({0, 0, 0, 0}), DomainError);
}
