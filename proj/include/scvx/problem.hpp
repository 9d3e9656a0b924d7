#pragma once

// Fixed-time rendezvous problem definition and its derivation from the
// target (LM) state.

#include <optional>
#include <stdexcept>

#include "scvx/dynamics.hpp"
#include "scvx/vehicle.hpp"

namespace scvx {

class InvalidProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RendezvousProblem {
  double t_f = 0.0;        // s
  ChaserState initial;
  ChaserState terminal;
  ChaserState target;      // LM state
  Vec3 p_d = Vec3::Zero(); // docking port position, m (inertial)
  Vec3 e_d = Vec3::UnitX();// approach-cone axis, unit
  double r_a = 0.0;        // impingement radius, m
  double dtheta_max = 0.0; // rad, full attitude error bound inside r_a
  double gamma = 0.0;      // approach-cone half angle, rad
  VehicleModel vehicle;

  int N() const;
  double t_c() const { return vehicle.t_c(); }
  /// Throws InvalidProblem naming the violated invariant.
  void validate() const;
};

/// How the terminal state, port and cone axis follow from the LM state.
/// Every derived quantity can be replaced through the optional overrides.
struct DockingGeometry {
  double port_offset = 2.0;       // LM CoM to docking port along e_d, m
  double nose_length = 4.5;       // CSM nose to CSM CoM, m
  double closure_speed = 0.1;     // m/s, toward the port
  double docking_yaw_deg = 180.0;
  double docking_roll_deg = -60.0;

  std::optional<Vec3> e_d;
  std::optional<Vec3> p_d;
  std::optional<Vec3> p_f;
  std::optional<Vec3> v_f;
  std::optional<UnitQuaternion> q_f;
  std::optional<Vec3> w_f;
};

struct MissionSpec {
  double t_f = 150.0;
  ChaserState initial;  // defaults: origin, at rest, q = (0, 0, 1, 0)
  ChaserState lm;       // defaults: (20, 0, 0) m, at rest, q = (0, 0, 1, 0)
  DockingGeometry docking;
  double r_a = 4.0;
  double dtheta_max_deg = 2.0;
  double gamma_deg = 30.0;

  MissionSpec();
};

/// Fills in the LM-derived terminal state, port, and cone axis:
///   e_d = rotate(q_l, +x), p_d = p_l + port_offset e_d,
///   p_f = p_d + nose_length e_d, v_f = v_l - closure_speed e_d,
///   q_f = q_l (x) yaw(docking_yaw) (x) roll(docking_roll), w_f = w_l.
RendezvousProblem make_problem(const MissionSpec& spec, const VehicleModel& vehicle);

}  // namespace scvx
