#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace scvx;

namespace {

Vec3 radial_at(const Vec3& position) {
  Vec3 r(0.0, position.y(), position.z());
  return r.normalized();
}

}  // namespace

TEST(ApolloCsm, MassInertiaAndCount) {
  const VehicleModel v = build_apollo_csm();
  EXPECT_EQ(v.mass(), 30322.9);
  EXPECT_EQ(v.inertia()(0, 0), 49248.7);
  EXPECT_EQ(v.inertia()(1, 1), 108514.2);
  EXPECT_EQ(v.inertia()(2, 2), 110771.7);
  EXPECT_EQ(v.inertia()(0, 1), 2862.1);
  EXPECT_EQ(v.inertia()(1, 2), -3075.0);
  EXPECT_EQ(v.inertia()(0, 2), -370.1);
  EXPECT_EQ(v.thruster_count(), 16u);
  for (const Thruster& t : v.thrusters()) {
    EXPECT_NEAR(t.force().norm(), 445.0, 1e-12);
    EXPECT_NEAR(t.direction.norm(), 1.0, 1e-12);
  }
  EXPECT_EQ(v.dt_min(), 0.1);
  EXPECT_EQ(v.dt_max(), 0.5);
  EXPECT_EQ(v.t_c(), 2.0);
}

TEST(ApolloCsm, ForwardSet) {
  const VehicleModel v = build_apollo_csm();
  EXPECT_EQ(v.forward_set(), (std::vector<int>{1, 5, 9, 13}));
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(v.is_forward(i), i % 4 == 0) << i;
    EXPECT_EQ(v.thrusters()[i].index, static_cast<int>(i) + 1);
  }
  // The forward engines' nozzles face +x, so their thrust points aft.
  for (int label : v.forward_set()) {
    EXPECT_LT(v.thrusters()[static_cast<std::size_t>(label - 1)].direction.x(), -0.9);
  }
}

TEST(ApolloCsm, CantAngleToHullTangentPlane) {
  const VehicleModel v = build_apollo_csm();
  for (const Thruster& t : v.thrusters()) {
    const double angle = std::asin(std::abs(t.direction.dot(radial_at(t.position))));
    EXPECT_NEAR(rad2deg(angle), 10.0, 0.1) << t.index;
  }
}

TEST(ApolloCsm, QuadOffsetAndRollEngineStation) {
  const VehicleModel v = build_apollo_csm();
  const Thruster& first = v.thrusters()[0];
  EXPECT_NEAR(rad2deg(std::atan2(first.position.z(), first.position.y())), 7.25, 1e-12);
  EXPECT_NEAR(std::hypot(first.position.y(), first.position.z()), 2.1, 1e-12);
  EXPECT_NEAR(v.thrusters()[2].position.x() - v.thrusters()[0].position.x(), 0.048, 1e-15);
}

TEST(ApolloCsm, QuadSymmetryWithoutRollOffset) {
  ApolloGeometry g;
  g.apply_roll_offset = false;
  const VehicleModel v = build_apollo_csm(g);
  const Mat3 rx = Eigen::AngleAxisd(0.5 * std::numbers::pi, Vec3::UnitX()).toRotationMatrix();
  for (int q = 0; q < 4; ++q) {
    for (int t = 0; t < 4; ++t) {
      const Thruster& a = v.thrusters()[static_cast<std::size_t>(4 * q + t)];
      const Thruster& b = v.thrusters()[static_cast<std::size_t>(4 * ((q + 1) % 4) + t)];
      EXPECT_LT((rx * a.position - b.position).norm(), 1e-9);
      EXPECT_LT((rx * a.direction - b.direction).norm(), 1e-9);
    }
  }
}

TEST(ApolloCsm, InvalidOverridesNameTheInvariant) {
  ApolloGeometry g;
  g.dt_min = 0.6;
  try {
    build_apollo_csm(g);
    FAIL() << "expected InvalidVehicle";
  } catch (const InvalidVehicle& e) {
    EXPECT_NE(std::string(e.what()).find("dt_min < dt_max"), std::string::npos);
  }
  g = {};
  g.forward_set = {1, 17};
  EXPECT_THROW(build_apollo_csm(g), InvalidVehicle);
  g = {};
  g.inertia(0, 0) = -1.0;
  EXPECT_THROW(build_apollo_csm(g), InvalidVehicle);
  g = {};
  g.dt_max = 2.5;
  EXPECT_THROW(build_apollo_csm(g), InvalidVehicle);
}

TEST(NetForceTorque, AllInactiveIsZero) {
  const VehicleModel& v = test::apollo();
  const ForceTorque ft = net_force_torque(v, std::vector<bool>(16, false));
  EXPECT_EQ(ft.force, Vec3::Zero());
  EXPECT_EQ(ft.torque, Vec3::Zero());
  EXPECT_THROW(net_force_torque(v, std::vector<bool>(3, false)), std::invalid_argument);
}

TEST(NetForceTorque, ParallelPositionGivesNoTorque) {
  VehicleModel::Params p;
  p.mass = 10.0;
  p.dt_min = 0.1;
  p.dt_max = 0.5;
  p.t_c = 1.0;
  p.thrusters.push_back({Vec3(0.0, 0.0, 2.0), Vec3(0.0, 0.0, 1.0), 5.0, 1});
  const VehicleModel v(p);
  const ForceTorque ft = net_force_torque(v, {true});
  EXPECT_LT((ft.force - Vec3(0.0, 0.0, 5.0)).norm(), 1e-15);
  EXPECT_LT(ft.torque.norm(), 1e-15);
}

TEST(NetForceTorque, OpposedRollPairIsPureRollTorque) {
  const VehicleModel& v = test::apollo();
  std::vector<bool> active(16, false);
  active[2] = true;   // quad 0, +tangent roll engine
  active[10] = true;  // quad 2, diametrically opposite
  const ForceTorque ft = net_force_torque(v, active);
  EXPECT_LT(ft.force.norm(), 1e-9);
  // r_perp x (445 cos(cant) tangent) from each engine, same sign about +x.
  const double oracle = 2.0 * 2.1 * 445.0 * std::cos(deg2rad(10.0));
  EXPECT_NEAR(ft.torque.x(), oracle, 1e-9);
  EXPECT_LT(ft.torque.tail<2>().norm(), 1e-9);
}
