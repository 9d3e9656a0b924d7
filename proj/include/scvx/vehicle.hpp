#pragma once

// Chaser mass properties and reaction-control thruster geometry.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scvx/attitude.hpp"

namespace scvx {

/// Raised when a vehicle definition violates one of its invariants. The
/// message names the violated invariant.
class InvalidVehicle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Thruster {
  Vec3 position;      // m, body frame
  Vec3 direction;     // unit thrust axis, body frame
  double thrust = 0;  // N
  int index = 0;      // 1-based label

  /// Thrust vector f_i = thrust * direction (N, body frame).
  Vec3 force() const { return thrust * direction; }
  /// r_i x f_i (N m, body frame).
  Vec3 torque() const { return position.cross(force()); }
};

class VehicleModel {
 public:
  struct Params {
    double mass = 0.0;
    Mat3 inertia = Mat3::Identity();
    std::vector<Thruster> thrusters;
    double dt_min = 0.0;
    double dt_max = 0.0;
    double t_c = 0.0;
    std::vector<int> forward_set;  // 1-based thruster labels
  };

  /// Validates every invariant; throws InvalidVehicle naming the first violation.
  explicit VehicleModel(Params params);

  double mass() const { return p_.mass; }
  const Mat3& inertia() const { return p_.inertia; }
  const Mat3& inertia_inverse() const { return inertia_inv_; }
  const std::vector<Thruster>& thrusters() const { return p_.thrusters; }
  std::size_t thruster_count() const { return p_.thrusters.size(); }
  double dt_min() const { return p_.dt_min; }
  double dt_max() const { return p_.dt_max; }
  double t_c() const { return p_.t_c; }
  const std::vector<int>& forward_set() const { return p_.forward_set; }
  /// True when the zero-based thruster slot belongs to the forward set.
  bool is_forward(std::size_t slot) const { return forward_mask_[slot]; }

  const Params& params() const { return p_; }

 private:
  Params p_;
  Mat3 inertia_inv_;
  std::vector<bool> forward_mask_;
};

/// Parametric description of the Apollo SM RCS layout. Angles in degrees,
/// lengths in meters. Thruster slot t within each quad: 0 = nozzle facing
/// forward (thrust toward -x), 1 = nozzle facing aft (thrust toward +x),
/// 2 / 3 = roll engines thrusting along +/- the local tangent.
struct ApolloGeometry {
  double mass = 30322.9;
  Mat3 inertia = default_inertia();
  double thrust = 445.0;
  double ring_radius = 2.1;
  double quad_station = 0.0;
  double quad_offset_deg = 7.25;  // 7 deg 15 min
  double cant_deg = 10.0;
  double roll_offset = 0.048;
  bool apply_roll_offset = true;
  double dt_min = 0.1;
  double dt_max = 0.5;
  double t_c = 2.0;
  std::vector<int> forward_set = {1, 5, 9, 13};

  static Mat3 default_inertia();
};

VehicleModel build_apollo_csm(const ApolloGeometry& geometry = {});

struct ForceTorque {
  Vec3 force = Vec3::Zero();   // N, body frame
  Vec3 torque = Vec3::Zero();  // N m, body frame
};

/// Sums f_i and r_i x f_i over the active thrusters.
ForceTorque net_force_torque(const VehicleModel& model, const std::vector<bool>& active);

}  // namespace scvx
