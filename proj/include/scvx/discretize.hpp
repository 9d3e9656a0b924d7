#pragma once

// Linearization of the chaser dynamics about a reference and exact
// zero-order-hold style discretization of the pulse-width inputs.

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <vector>

#include "scvx/dynamics.hpp"

namespace scvx {

/// Partial derivatives of the nonlinear dynamics at one reference point, with
/// affine residuals r = f(xbar) - A xbar so the linear model is exact there.
struct ContinuousJacobians {
  Mat3 A_ww;                          // d f_w / d w
  Mat4 A_qq;                          // d f_q / d q
  Eigen::Matrix<double, 4, 3> A_qw;   // d f_q / d w
  Eigen::Matrix<double, 3, 4> A_vq;   // d f_v / d q
  Vec3 r_v;
  Vec4 r_q;
  Vec3 r_w;

  /// Assembled 13x13 system matrix (A_pv = I).
  Mat13 full() const;
  Vec13 residual() const;
};

/// `forces` holds one body-frame thrust vector per thruster (zero when off).
ContinuousJacobians jacobians_at(const ChaserState& reference, const std::vector<Vec3>& forces,
                                 const VehicleModel& model);
ContinuousJacobians jacobians_at(const Vec13& reference, const Vec3& force_body,
                                 const VehicleModel& model);

/// Result of integrating Phi' = A(t) Phi, Phi(t0) = I over [t0, t1].
class StmPath {
 public:
  using SystemMatrix = std::function<Eigen::MatrixXd(double)>;

  StmPath(SystemMatrix a, double t0, double t1, const Tolerance& tol);

  const Eigen::MatrixXd& at_end() const { return phi_end_; }
  /// Phi(t0 + s) for any s in [0, t1 - t0], re-integrated from the nearest checkpoint.
  Eigen::MatrixXd from_start(double t) const;
  /// Phi(t1, tau) = Phi(t1, t0) Phi(tau, t0)^-1.
  Eigen::MatrixXd to_end(double tau) const;

 private:
  SystemMatrix a_;
  double t0_;
  double t1_;
  Tolerance tol_;
  Eigen::MatrixXd phi_end_;
  std::vector<double> cp_t_;
  std::vector<Eigen::VectorXd> cp_phi_;
};

StmPath stm_over_interval(StmPath::SystemMatrix a, double t0, double t1,
                          const Tolerance& tol = {});

/// Discrete affine update x_{k+1} = A x_k + B u_k + r for one control interval.
/// Block layout follows the stacked state (p, v, q, w).
struct DiscreteInterval {
  Mat13 A;
  Eigen::Matrix<double, kStateDim, Eigen::Dynamic> B;
  Vec13 r;
  Vec13 x_end;                 // reference endpoint from the co-integration
  std::vector<bool> one_sided; // pulse at the interval end, left derivative used

  auto block(int row, int col, int rows, int cols) const { return A.block(row, col, rows, cols); }
};

struct DiscreteLTV {
  std::vector<DiscreteInterval> intervals;
  int N() const { return static_cast<int>(intervals.size()); }
};

class DiscretizationError : public std::runtime_error {
 public:
  DiscretizationError(const std::string& what, std::vector<int> intervals)
      : std::runtime_error(what), intervals_(std::move(intervals)) {}
  const std::vector<int>& intervals() const { return intervals_; }

 private:
  std::vector<int> intervals_;
};

/// Co-integrates the reference, the STM and one input-sensitivity column per
/// thruster in a single forward sweep. Each column starts at the thruster's
/// falling edge (or t = 0 for a zero reference pulse) with the thrust
/// contribution evaluated there.
DiscreteInterval discretize_interval(const ChaserState& reference,
                                     const Eigen::VectorXd& pulse_row,
                                     const VehicleModel& model, const Tolerance& tol = {});

DiscreteLTV discretize_trajectory(const std::vector<ChaserState>& reference,
                                  const ImpulseSchedule& schedule, const VehicleModel& model,
                                  const Tolerance& tol = {}, Execution exec = Execution::serial);

/// Input contribution column b_i = d xdot / d(thruster i on) at state x.
Vec13 thrust_column(const Vec13& x, const Thruster& thruster, const VehicleModel& model);

}  // namespace scvx
