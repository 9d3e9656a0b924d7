#include "scvx/vehicle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

namespace scvx {

namespace {

void require(bool ok, const std::string& invariant) {
  if (!ok) {
    throw InvalidVehicle("vehicle invariant violated: " + invariant);
  }
}

}  // namespace

VehicleModel::VehicleModel(Params params) : p_(std::move(params)) {
  require(std::isfinite(p_.mass) && p_.mass > 0.0, "mass > 0");
  require(p_.inertia.allFinite(), "inertia finite");
  require((p_.inertia - p_.inertia.transpose()).cwiseAbs().maxCoeff() <=
              1e-9 * p_.inertia.cwiseAbs().maxCoeff(),
          "inertia symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(p_.inertia);
  require(eig.eigenvalues().minCoeff() > 0.0, "inertia positive definite");
  require(!p_.thrusters.empty(), "at least one thruster");
  require(p_.dt_min > 0.0, "0 < dt_min");
  require(p_.dt_min < p_.dt_max, "dt_min < dt_max");
  require(p_.dt_max <= p_.t_c, "dt_max <= t_c");

  for (std::size_t i = 0; i < p_.thrusters.size(); ++i) {
    Thruster& t = p_.thrusters[i];
    const std::string tag = "thruster " + std::to_string(i + 1);
    require(t.position.allFinite(), tag + " position finite");
    require(t.direction.allFinite() && std::abs(t.direction.norm() - 1.0) <= 1e-12,
            tag + " direction unit norm");
    require(std::isfinite(t.thrust) && t.thrust > 0.0, tag + " thrust magnitude > 0");
    if (t.index == 0) {
      t.index = static_cast<int>(i + 1);
    }
    require(t.index == static_cast<int>(i + 1), tag + " index matches its slot");
  }

  forward_mask_.assign(p_.thrusters.size(), false);
  std::set<int> seen;
  for (int label : p_.forward_set) {
    require(label >= 1 && label <= static_cast<int>(p_.thrusters.size()),
            "forward set is a subset of {1..M}");
    require(seen.insert(label).second, "forward set has no duplicates");
    forward_mask_[static_cast<std::size_t>(label - 1)] = true;
  }
  inertia_inv_ = p_.inertia.inverse();
}

Mat3 ApolloGeometry::default_inertia() {
  Mat3 j;
  j << 49248.7, 2862.1, -370.1,
       2862.1, 108514.2, -3075.0,
       -370.1, -3075.0, 110771.7;
  return j;
}

VehicleModel build_apollo_csm(const ApolloGeometry& g) {
  VehicleModel::Params p;
  p.mass = g.mass;
  p.inertia = g.inertia;
  p.dt_min = g.dt_min;
  p.dt_max = g.dt_max;
  p.t_c = g.t_c;
  p.forward_set = g.forward_set;

  const double cant = deg2rad(g.cant_deg);
  const double cc = std::cos(cant);
  const double sc = std::sin(cant);
  for (int quad = 0; quad < 4; ++quad) {
    // Azimuth measured about +x from +y toward +z.
    const double phi = deg2rad(90.0 * quad + g.quad_offset_deg);
    const Vec3 radial(0.0, std::cos(phi), std::sin(phi));
    const Vec3 tangent(0.0, -std::sin(phi), std::cos(phi));
    const Vec3 base = g.quad_station * Vec3::UnitX() + g.ring_radius * radial;
    const Vec3 roll_base = base + (g.apply_roll_offset ? g.roll_offset : 0.0) * Vec3::UnitX();

    // Thrust axes lean 10 deg inward so the plumes lean away from the hull.
    const Vec3 axes[4] = {
        -cc * Vec3::UnitX() - sc * radial,
        cc * Vec3::UnitX() - sc * radial,
        cc * tangent - sc * radial,
        -cc * tangent - sc * radial,
    };
    for (int t = 0; t < 4; ++t) {
      Thruster th;
      th.position = t < 2 ? base : roll_base;
      th.direction = axes[t].normalized();
      th.thrust = g.thrust;
      th.index = 4 * quad + t + 1;
      p.thrusters.push_back(th);
    }
  }
  return VehicleModel(std::move(p));
}

ForceTorque net_force_torque(const VehicleModel& model, const std::vector<bool>& active) {
  if (active.size() != model.thruster_count()) {
    throw std::invalid_argument("net_force_torque: active mask length must equal M");
  }
  ForceTorque out;
  const auto& ts = model.thrusters();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (active[i]) {
      out.force += ts[i].force();
      out.torque += ts[i].torque();
    }
  }
  return out;
}

}  // namespace scvx
