#pragma once

// Successive convexification loop with state-triggered constraints and the
// solution-reset heuristic for locked minimum-pulse constraints.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scvx/lrgp.hpp"

namespace scvx {

struct FeasibilityTolerances {
  double p = 0.01;    // m
  double v = 0.001;   // m/s
  double theta = 0.5; // deg
  double w = 0.01;    // deg/s

  bool satisfied_by(const PropagationError& e) const {
    return e.p < p && e.v < v && e.theta_deg < theta && e.w_deg < w;
  }
};

struct ScvxConfig {
  double w_tr = 1e3;
  double w_vc = 1e7;
  int j_max = 30;
  double dJ_tol = 1e-4;         // relative
  double cost_abs_tol = 1e-5;   // s, absolute slack on the cost-change test
  FeasibilityTolerances tol;
  Tolerance integrator;
  double pulse_zero_tol = kPulseZeroTol;
  double mib_tol = 1e-9;        // s
  Execution exec = Execution::parallel;
  // Until the first iterate with Σ eta below warmup_eta_tol, subproblems are built without the minimum-pulse trigger.
  bool min_pulse_warmup = true;
  double warmup_eta_tol = 1e-3;
  // A reset that adds no bound multiplies w_tr by w_tr_growth, up to
  // w_tr_growth_cap times the configured value.
  double w_tr_growth = 10.0;
  double w_tr_growth_cap = 1e3;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct ScvxIterate {
  int j = 0;
  std::vector<ChaserState> states;
  ImpulseSchedule schedule;
  std::vector<Vec13> virtual_controls;
  std::vector<double> eta;
  double J = 0.0;           // s, total firing time
  double J_f_scaled = 0.0;
  double J_vc = 0.0;
  double J_tr = 0.0;
  double eta_sum = 0.0;
  PropagationError error;
  bool feasible = false;
  bool mib_satisfied = false;
  bool reset_applied = false;
  bool warmup = false;      // solved without the minimum-pulse trigger
  int reset_anchor = -1;    // j* used by the reset following this iterate
  int bounds_added = 0;
  int bound_count = 0;      // size of the bound set this iterate was solved with
  SolveStatus solver_status = SolveStatus::numerical_failure;
  bool reduced_accuracy = false;
  int solver_iterations = 0;
  double solve_time = 0.0;  // s, conic solver only
  double quat_norm_deviation = 0.0;
};

enum class ScvxStatus { converged, max_iterations, infeasible, solver_failure };
const char* to_string(ScvxStatus s);

struct ScvxResult {
  ScvxStatus status = ScvxStatus::infeasible;
  int best = -1;  // index into history, -1 when no feasible iterate exists
  std::vector<ScvxIterate> history;
  BoundSet bounds;
  double solver_time = 0.0;  // s, summed over iterations
  double wall_time = 0.0;    // s
  double initial_cost = 0.0;
  std::vector<std::string> events;
  std::string message;

  bool converged() const { return status == ScvxStatus::converged; }
  const ScvxIterate* best_iterate() const {
    return best >= 0 ? &history[static_cast<std::size_t>(best)] : nullptr;
  }
};

struct InitialGuess {
  std::vector<ChaserState> states;
  ImpulseSchedule schedule;
};

/// Straight-line positions, constant velocity, slerp attitude with the
/// matching constant body rate, every width at dt_min.
InitialGuess initial_guess(const RendezvousProblem& problem);

/// Sum of all widths (s).
double discrete_cost(const ImpulseSchedule& schedule);

/// Latest iterate with index in [1, current) that meets the error
/// tolerances and the pulse-width constraint; failing that, the latest that
/// meets the error tolerances. Returns the iterate index j, not a position.
std::optional<int> find_reset_anchor(const std::vector<ScvxIterate>& history, int current);

struct ResetResult {
  std::vector<ChaserState> states;
  ImpulseSchedule schedule;
  BoundSet added;
};

/// Restores iterate j_star and bounds every (k, i) that any iterate
/// l in (j_star, j) fired with a width in (0, dt_min). When j_star itself
/// violates the pulse-width constraint its own offending pairs are bounded too.
ResetResult reset(const std::vector<ScvxIterate>& history, int j_star, int j, double dt_min);

/// Optional warm state: a reference trajectory and an existing bound set.
struct ScvxStart {
  std::vector<ChaserState> states;
  ImpulseSchedule schedule;
  BoundSet bounds;
  std::vector<ScvxIterate> history;  // prior iterates, indices 1..j-1
};

using IterationCallback = std::function<void(const ScvxIterate&)>;

ScvxResult run(const RendezvousProblem& problem, const ScvxConfig& config,
               const ConicSolver& solver, const ScvxStart* start = nullptr,
               const IterationCallback& on_iteration = {});

}  // namespace scvx
