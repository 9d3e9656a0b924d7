#pragma once

// Convex local subproblem about a reference trajectory: scaled discrete
// dynamics with virtual control, pulse bounds, state-triggered constraints,
// approach cone, trust region and boundary conditions, lowered to a conic
// program.

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scvx/conic.hpp"
#include "scvx/discretize.hpp"
#include "scvx/problem.hpp"
#include "scvx/scaling.hpp"

namespace scvx {

// ---------------------------------------------------------------------------
// State-triggered constraints. Triggers use reference quantities only.

enum class StcKind { none, input_zero, state_inequality };

struct StcSpec {
  double trigger = 0.0;  // g evaluated on the reference; fires when g < 0
  StcKind kind = StcKind::none;
  std::vector<int> indices;  // affected thruster slots (input_zero) or node (state)
  double bound = 0.0;        // right-hand side for state_inequality
  bool active() const { return kind != StcKind::none; }
};

/// Fires when ref_width < dt_min; ties do not trigger.
StcSpec min_pulse_stc(double ref_width, double dt_min, int slot = 0);
/// Fires when |p_next - p_f| < r_a; constraint q_f' q_k >= cos(dtheta_max / 2).
StcSpec impingement_attitude_stc(const Vec3& ref_next_position, const Vec3& p_f, double r_a,
                                 double dtheta_max, int node = 0);
/// Fires when |p - p_f| < r_a; forces every forward thruster silent.
StcSpec impingement_silence_stc(const Vec3& ref_position, const Vec3& p_f, double r_a,
                                const VehicleModel& vehicle);
/// -min(g, 0) c <= 0.
bool stc_exact_check(double g, double c);

// ---------------------------------------------------------------------------

using BoundSet = std::set<std::pair<int, int>>;  // (k, zero-based thruster slot)

class LrgpBuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LrgpWeights {
  double w_tr = 1e3;
  double w_vc = 1e7;
  bool min_pulse = true;  // false drops the minimum-pulse trigger entirely
};

/// Offsets of each variable group in the decision vector.
struct LrgpLayout {
  int N = 0, M = 0;
  int x = 0;    // 13 (N+1) scaled states
  int u = 0;    // M N scaled widths
  int l = 0;    // 13 N scaled virtual controls
  int t = 0;    // 13 N epigraph variables for |l|
  int eta = 0;  // N-1 trust-region sizes, nodes 1..N-1
  int total = 0;

  int xi(int k, int j) const { return x + kStateDim * k + j; }
  int ui(int k, int i) const { return u + M * k + i; }
  int li(int k, int j) const { return l + kStateDim * k + j; }
  int ti(int k, int j) const { return t + kStateDim * k + j; }
  int ei(int k) const { return eta + k - 1; }
  /// Decisions before the |l| epigraph auxiliaries.
  int core() const { return total - kStateDim * N; }
};

struct ConstraintCounts {
  int dynamics = 0;
  int initial = 0;
  int terminal = 0;
  int box = 0;
  int forced_zero = 0;
  int min_pulse = 0;  // (k, i) pairs silenced by the min-pulse trigger
  int silence = 0;    // (k, i) pairs silenced by the impingement trigger
  int attitude = 0;
  int cone = 0;
  int trust = 0;
  int reset_bound = 0;
  int vc_abs = 0;
};

struct ConicProgram {
  ConeProblem cone;
  LrgpLayout layout;
  ConstraintCounts counts;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> forced_zero;  // N x M
  std::vector<bool> attitude_nodes;  // size N+1
  std::vector<bool> silence_nodes;   // size N
  ScalingTransform scaling;
  LrgpWeights weights;
  BoundSet bounds;
  double dt_min = 0.0, dt_max = 0.0, t_c = 0.0;
};

ConicProgram build_lrgp(const std::vector<ChaserState>& ref_states,
                        const ImpulseSchedule& ref_schedule, const DiscreteLTV& dltv,
                        const ScalingTransform& scaling, const RendezvousProblem& problem,
                        const BoundSet& extra_lower_bounds, const LrgpWeights& weights = {});

struct SubproblemSolution {
  std::vector<ChaserState> states;
  ImpulseSchedule schedule;
  std::vector<Vec13> virtual_controls;  // physical units
  std::vector<double> eta;              // scaled, nodes 1..N-1
  double J_f_scaled = 0.0;
  double J_f = 0.0;                     // s
  double J_vc = 0.0;                    // weighted, scaled
  double J_vc_physical = 0.0;           // sum |l| in physical units
  double J_tr = 0.0;                    // weighted, scaled
  double objective = 0.0;               // solver objective
  double quat_norm_deviation = 0.0;     // max |1 - |q|| before renormalization
  SolveStatus status = SolveStatus::numerical_failure;
  bool reduced_accuracy = false;
  int solver_iterations = 0;
  double solve_time = 0.0;
  std::string message;
};

inline constexpr double kPulseZeroTol = 1e-6;

/// Solves and unscales. Widths at or below `zero_tol` snap to 0, widths are
/// clamped to [0, dt_max] and reset-bounded pairs to >= dt_min.
SubproblemSolution solve_lrgp(const ConicProgram& program, const ConicSolver& solver,
                              double zero_tol = kPulseZeroTol);

}  // namespace scvx
