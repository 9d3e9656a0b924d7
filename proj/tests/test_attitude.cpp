#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace scvx;
using scvx::test::random_quat;
using scvx::test::random_vec;

namespace {

Eigen::Quaterniond eig(const UnitQuaternion& q) { return {q.w(), q.x(), q.y(), q.z()}; }

void expect_quat_near(const UnitQuaternion& a, const UnitQuaternion& b, double tol) {
  EXPECT_LT((a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(), tol)
      << a.coeffs().transpose() << " vs " << b.coeffs().transpose();
}

void expect_same_rotation(const UnitQuaternion& a, const UnitQuaternion& b, double tol) {
  const double d = std::min((a.coeffs() - b.coeffs()).norm(), (a.coeffs() + b.coeffs()).norm());
  EXPECT_LT(d, tol);
}

}  // namespace

TEST(Quaternion, ConstructorNormalizes) {
  const UnitQuaternion q(1.0, 2.0, 3.0, 4.0);
  EXPECT_NEAR(q.coeffs().norm(), 1.0, 1e-15);
  EXPECT_NEAR(q.w(), 1.0 / std::sqrt(30.0), 1e-15);
  EXPECT_THROW(UnitQuaternion(0.0, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(QuatMul, IdentityIsNeutral) {
  std::mt19937_64 rng(1);
  const UnitQuaternion q = random_quat(rng);
  expect_quat_near(quat_mul(UnitQuaternion(), q), q, 1e-15);
  expect_quat_near(quat_mul(q, UnitQuaternion()), q, 1e-15);
}

TEST(QuatMul, HandExpandedProduct) {
  // j * j = -1.
  const UnitQuaternion j(0.0, 0.0, 1.0, 0.0);
  expect_quat_near(quat_mul(j, j), UnitQuaternion(-1.0, 0.0, 0.0, 0.0), 1e-15);
  // i * j = k, j * i = -k.
  const UnitQuaternion i(0.0, 1.0, 0.0, 0.0);
  expect_quat_near(quat_mul(i, j), UnitQuaternion(0.0, 0.0, 0.0, 1.0), 1e-15);
  expect_quat_near(quat_mul(j, i), UnitQuaternion(0.0, 0.0, 0.0, -1.0), 1e-15);
}

TEST(QuatMul, MatchesEigenHamiltonProduct) {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 100; ++n) {
    const UnitQuaternion a = random_quat(rng), b = random_quat(rng);
    const Eigen::Quaterniond r = eig(a) * eig(b);
    expect_quat_near(quat_mul(a, b), UnitQuaternion(r.w(), r.x(), r.y(), r.z()), 1e-14);
  }
}

TEST(QuatMul, InverseGivesIdentity) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 100; ++n) {
    const UnitQuaternion a = random_quat(rng);
    expect_quat_near(quat_mul(a, a.conjugate()), UnitQuaternion(), 1e-14);
  }
}

TEST(QuatMul, Associative) {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 200; ++n) {
    const UnitQuaternion a = random_quat(rng), b = random_quat(rng), c = random_quat(rng);
    expect_quat_near(quat_mul(quat_mul(a, b), c), quat_mul(a, quat_mul(b, c)), 1e-12);
  }
}

TEST(ProductMatrices, LeftAndRightForms) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    const Vec4 q = random_quat(rng).coeffs(), r = random_quat(rng).coeffs();
    EXPECT_LT((left_product_matrix(q) * r - hamilton(q, r)).norm(), 1e-14);
    EXPECT_LT((right_product_matrix(q) * r - hamilton(r, q)).norm(), 1e-14);
  }
  const Vec4 q = random_quat(rng).coeffs();
  EXPECT_LT((right_product_matrix(q) * Vec4(1, 0, 0, 0) - q).norm(), 1e-15);
}

TEST(Rotate, KnownRotations) {
  const Vec3 u(1.0, 2.0, 3.0);
  EXPECT_LT((rotate(UnitQuaternion(), u) - u).norm(), 1e-15);
  const auto qz = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), 0.5 * std::numbers::pi);
  EXPECT_LT((rotate(qz, Vec3::UnitX()) - Vec3::UnitY()).norm(), 1e-15);
}

TEST(Rotate, MatchesEigenAndPreservesInnerProducts) {
  std::mt19937_64 rng(6);
  for (int n = 0; n < 200; ++n) {
    const UnitQuaternion q = random_quat(rng);
    const Vec3 a = random_vec(rng, 5.0), b = random_vec(rng, 5.0);
    EXPECT_LT((rotate(q, a) - eig(q) * a).norm(), 1e-13);
    EXPECT_NEAR(rotate(q, a).norm(), a.norm(), 1e-12);
    EXPECT_NEAR(rotate(q, a).dot(rotate(q, b)), a.dot(b), 1e-12);
    EXPECT_LT((q.to_rotation_matrix() * a - rotate(q, a)).norm(), 1e-12);
  }
}

TEST(ErrorQuat, Examples) {
  std::mt19937_64 rng(7);
  const UnitQuaternion q = random_quat(rng);
  expect_quat_near(error_quat(q, q), UnitQuaternion(), 1e-14);
  const UnitQuaternion qf(0.0, 0.0, 1.0, 0.0);
  expect_quat_near(error_quat(UnitQuaternion(), qf), qf, 1e-15);
}

TEST(ErrorQuat, ScalarPartFromRightProductMatrix) {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 100; ++n) {
    const UnitQuaternion q = random_quat(rng), qf = random_quat(rng);
    const double oracle = (right_product_matrix(qf.coeffs()) * conjugate(q.coeffs()))[0];
    EXPECT_NEAR(error_quat(q, qf).w(), oracle, 1e-14);
  }
}

TEST(Slerp, Endpoints) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 50; ++n) {
    const UnitQuaternion a = random_quat(rng), b = random_quat(rng);
    expect_quat_near(slerp(a, b, 0.0).q, a, 1e-9);
    expect_quat_near(slerp(a, b, 1.0).q, b, 1e-9);
  }
}

TEST(Slerp, HalfOfHalfTurnAboutZ) {
  const auto qf = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), std::numbers::pi);
  const SlerpResult r = slerp(UnitQuaternion(), qf, 0.5);
  expect_quat_near(r.q, UnitQuaternion::from_axis_angle(Vec3::UnitZ(), 0.5 * std::numbers::pi),
                   1e-12);
  EXPECT_FALSE(r.degenerate);
}

TEST(Slerp, AngleLinearInFractionAndUnitNorm) {
  std::mt19937_64 rng(10);
  for (int n = 0; n < 50; ++n) {
    const UnitQuaternion a = random_quat(rng), b = random_quat(rng);
    const double total = slerp(a, b, 1.0).angle;
    for (double f : {0.1, 0.25, 0.5, 0.8}) {
      const UnitQuaternion qf = slerp(a, b, f).q;
      EXPECT_NEAR(qf.coeffs().norm(), 1.0, 1e-12);
      const AxisAngle aa = to_axis_angle(error_quat(a, qf));
      EXPECT_NEAR(aa.angle, f * total, 1e-9);
    }
  }
}

TEST(Slerp, DegenerateFullTurnIsFlagged) {
  // q and -q: relative rotation of 2 pi about an undefined axis.
  const UnitQuaternion a(1.0, 0.0, 0.0, 0.0), b(-1.0, 0.0, 0.0, 0.0);
  const SlerpResult r = slerp(a, b, 0.5);
  EXPECT_TRUE(r.degenerate);
  EXPECT_LT((r.axis - Vec3::UnitX()).norm(), 1e-15);
  EXPECT_NEAR(r.q.coeffs().norm(), 1.0, 1e-12);
  EXPECT_THROW(slerp(a, b, 1.5), std::invalid_argument);
}

TEST(TaitBryan, IdentityAndSixtyDegreeRoll) {
  const TaitBryan id = to_tait_bryan(UnitQuaternion());
  EXPECT_EQ(id.roll, 0.0);
  EXPECT_EQ(id.pitch, 0.0);
  EXPECT_EQ(id.yaw, 0.0);
  const TaitBryan r = to_tait_bryan(UnitQuaternion::from_axis_angle(Vec3::UnitX(), deg2rad(60.0)));
  EXPECT_NEAR(r.roll, 60.0 * std::numbers::pi / 180.0, 1e-14);
  EXPECT_NEAR(r.pitch, 0.0, 1e-15);
  EXPECT_NEAR(r.yaw, 0.0, 1e-15);
}

TEST(TaitBryan, RoundTripAwayFromGimbalLock) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int n = 0; n < 1000; ++n) {
    const UnitQuaternion q = random_quat(rng);
    const TaitBryan tb = to_tait_bryan(q);
    if (tb.gimbal_lock) continue;
    expect_same_rotation(from_tait_bryan(tb.roll, tb.pitch, tb.yaw), q, 1e-9);
    ++checked;
  }
  EXPECT_EQ(checked, 1000);
}

TEST(TaitBryan, GimbalLockFlagged) {
  const auto q = from_tait_bryan(0.3, 0.5 * std::numbers::pi, 0.2);
  const TaitBryan tb = to_tait_bryan(q);
  EXPECT_TRUE(tb.gimbal_lock);
  EXPECT_EQ(tb.yaw, 0.0);
  // With yaw folded into roll the rotation is unchanged.
  expect_same_rotation(from_tait_bryan(tb.roll, tb.pitch, tb.yaw), q, 1e-6);
}
