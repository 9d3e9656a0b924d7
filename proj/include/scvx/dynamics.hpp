#pragma once

// Rigid-body translational and rotational dynamics of the chaser under
// pulsed RCS thrust, plus the per-interval nonlinear propagation.

#include <Eigen/Core>
#include <vector>

#include "scvx/attitude.hpp"
#include "scvx/integrator.hpp"
#include "scvx/vehicle.hpp"

namespace scvx {

inline constexpr int kStateDim = 13;
using Vec13 = Eigen::Matrix<double, kStateDim, 1>;
using Mat13 = Eigen::Matrix<double, kStateDim, kStateDim>;

// Offsets of each block inside the stacked 13-vector (p, v, q, w).
namespace sidx {
inline constexpr int p = 0;
inline constexpr int v = 3;
inline constexpr int q = 6;
inline constexpr int w = 10;
}  // namespace sidx

struct ChaserState {
  Vec3 p = Vec3::Zero();  // m, inertial
  Vec3 v = Vec3::Zero();  // m/s, inertial
  UnitQuaternion q;       // body -> inertial
  Vec3 w = Vec3::Zero();  // rad/s, body

  Vec13 to_vector() const;
  /// Normalizes the quaternion block.
  static ChaserState from_vector(const Vec13& x);
};

/// N x M matrix of pulse widths (s). Pulse i of interval k fires over
/// [k t_c, k t_c + widths(k, i)].
struct ImpulseSchedule {
  Eigen::MatrixXd widths;
  double t_c = 0.0;

  int N() const { return static_cast<int>(widths.rows()); }
  int M() const { return static_cast<int>(widths.cols()); }
  static ImpulseSchedule constant(int n, int m, double t_c, double width);
  /// Every entry is 0 or within [dt_min, dt_max], up to `tol`.
  bool mib_feasible(double dt_min, double dt_max, double tol = 1e-9) const;
};

/// Time derivative of the stacked state for a fixed net body force and torque.
/// The quaternion block uses the raw coordinates without renormalization.
Vec13 state_derivative(const Vec13& x, const Vec3& force_body, const Vec3& torque_body,
                       const VehicleModel& model);

Vec13 derivative(const ChaserState& state, const std::vector<bool>& active,
                 const VehicleModel& model);

/// Piece of a control interval over which the set of firing thrusters is constant.
struct ThrustSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<bool> active;
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

inline constexpr double kEdgeTolerance = 1e-12;

/// Sorted falling edges strictly inside (0, t_c), merged within kEdgeTolerance.
std::vector<double> falling_edges(const Eigen::VectorXd& pulse_row, double t_c);
std::vector<ThrustSegment> thrust_segments(const Eigen::VectorXd& pulse_row,
                                           const VehicleModel& model);

struct IntervalTrajectory {
  ChaserState end;
  std::vector<double> t;  // local time (s) of each dense sample
  std::vector<ChaserState> samples;
  StepStats stats;
};

/// Integrates over one control interval [0, t_c]. When `dense_samples` > 0,
/// samples at t = j t_c / dense_samples for j = 0 .. dense_samples - 1.
IntervalTrajectory propagate_interval_dense(const ChaserState& start,
                                            const Eigen::VectorXd& pulse_row,
                                            const VehicleModel& model, const Tolerance& tol,
                                            int dense_samples);

ChaserState propagate_interval(const ChaserState& start, const Eigen::VectorXd& pulse_row,
                               const VehicleModel& model, const Tolerance& tol = {});

enum class Execution { serial, parallel };

inline constexpr int kDenseSamplesPerInterval = 50;

struct ResetPropagation {
  std::vector<ChaserState> endpoints;          // size N, state at (k+1) t_c
  std::vector<IntervalTrajectory> intervals;   // size N
};

/// Propagates every interval from its own reference state. Results do not
/// depend on `exec`.
ResetPropagation propagate_with_reset(const std::vector<ChaserState>& reference,
                                      const ImpulseSchedule& schedule,
                                      const VehicleModel& model, const Tolerance& tol = {},
                                      int dense_samples = kDenseSamplesPerInterval,
                                      Execution exec = Execution::serial);

/// Chained (single-shooting) propagation from node k1 to node k2.
ChaserState propagate_chain(const ChaserState& start, const ImpulseSchedule& schedule,
                            const VehicleModel& model, int k1, int k2,
                            const Tolerance& tol = {});

struct PropagationError {
  double p = 0.0;          // m
  double v = 0.0;          // m/s
  double theta_deg = 0.0;  // deg
  double w_deg = 0.0;      // deg/s
};

/// Error angle (rad) between two attitudes, insensitive to quaternion sign.
double attitude_error_angle(const UnitQuaternion& a, const UnitQuaternion& b);

/// Compares optimizer node k2 against a chained propagation started from node k1.
PropagationError propagation_error(const std::vector<ChaserState>& optimizer_states,
                                   const ImpulseSchedule& schedule, const VehicleModel& model,
                                   int k1, int k2, const Tolerance& tol = {});

}  // namespace scvx
