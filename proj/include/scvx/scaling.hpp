#pragma once

// Affine non-dimensionalization of the subproblem decision variables.

#include <Eigen/Core>
#include <string>
#include <vector>

#include "scvx/dynamics.hpp"

namespace scvx {

inline constexpr double kScaleFloor = 1e-6;

struct ScalingTransform {
  Vec13 Sx = Vec13::Ones();   // diagonal of blkdiag(S_p, S_v, I_4, S_w)
  Vec13 sx = Vec13::Zero();   // offset, zero on the quaternion block
  Eigen::VectorXd Su;         // diagonal, s
  Eigen::VectorXd su;         // offset, s
  Vec13 Sl = Vec13::Ones();   // virtual-control scale diagonal
  double SJ = 1.0;            // cost scale, s
  std::vector<std::string> warnings;

  Vec13 scale_state(const Vec13& x) const { return ((x - sx).array() / Sx.array()).matrix(); }
  Vec13 unscale_state(const Vec13& xh) const { return (Sx.array() * xh.array()).matrix() + sx; }
  Eigen::VectorXd scale_input(const Eigen::VectorXd& u) const {
    return ((u - su).array() / Su.array()).matrix();
  }
  Eigen::VectorXd unscale_input(const Eigen::VectorXd& uh) const {
    return (Su.array() * uh.array()).matrix() + su;
  }
  Vec13 scale_vc(const Vec13& l) const { return (l.array() / Sl.array()).matrix(); }
  Vec13 unscale_vc(const Vec13& lh) const { return (Sl.array() * lh.array()).matrix(); }
};

/// Offsets are trajectory means of the guess; scales are the per-axis maximum
/// deviation from the mean. An axis with zero deviation falls back to the
/// largest deviation in its block, then to the block's largest |mean|, then
/// to 1, and is never below kScaleFloor. Each fallback is recorded in
/// `warnings`.
ScalingTransform fit_scaling(const std::vector<ChaserState>& guess, const VehicleModel& model,
                             int n_intervals);

}  // namespace scvx
