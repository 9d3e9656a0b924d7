#include "scvx/scvx.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scvx {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Drops bounds that the silence trigger would contradict on this reference.
// Returns the released pairs.
std::vector<std::pair<int, int>> release_silenced_bounds(BoundSet& bounds,
                                                         const std::vector<ChaserState>& ref,
                                                         const RendezvousProblem& problem) {
  std::vector<std::pair<int, int>> released;
  for (auto it = bounds.begin(); it != bounds.end();) {
    const auto [k, i] = *it;
    const bool silenced =
        problem.vehicle.is_forward(static_cast<std::size_t>(i)) &&
        impingement_silence_stc(ref[static_cast<std::size_t>(k)].p, problem.terminal.p,
                                problem.r_a, problem.vehicle)
            .active();
    if (silenced) {
      released.push_back(*it);
      it = bounds.erase(it);
    } else {
      ++it;
    }
  }
  return released;
}

}  // namespace

void ScvxConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid scvx setting: ") + what);
  };
  require(w_tr > 0.0, "w_tr > 0");
  require(w_vc > 0.0, "w_vc > 0");
  require(j_max >= 1, "j_max >= 1");
  require(dJ_tol >= 0.0, "dJ_tol >= 0");
  require(cost_abs_tol >= 0.0, "cost_abs_tol >= 0");
  require(tol.p > 0.0 && tol.v > 0.0 && tol.theta > 0.0 && tol.w > 0.0,
          "feasibility tolerances > 0");
  require(integrator.rel > 0.0 && integrator.abs > 0.0, "integrator tolerances > 0");
  require(pulse_zero_tol >= 0.0, "pulse_zero_tol >= 0");
  require(warmup_eta_tol >= 0.0, "warmup_eta_tol >= 0");
}

const char* to_string(ScvxStatus s) {
  switch (s) {
    case ScvxStatus::converged: return "converged";
    case ScvxStatus::max_iterations: return "max_iterations";
    case ScvxStatus::infeasible: return "infeasible";
    case ScvxStatus::solver_failure: return "solver_failure";
  }
  return "unknown";
}

InitialGuess initial_guess(const RendezvousProblem& problem) {
  const int N = problem.N();
  const int M = static_cast<int>(problem.vehicle.thruster_count());
  const ChaserState& x0 = problem.initial;
  const ChaserState& xf = problem.terminal;

  const SlerpResult whole = slerp(x0.q, xf.q, 1.0);
  const Vec3 rate = (whole.angle / problem.t_f) * whole.axis;
  const Vec3 vel = (xf.p - x0.p) / problem.t_f;

  InitialGuess g;
  g.states.resize(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) {
    const double f = static_cast<double>(k) / N;
    ChaserState& s = g.states[static_cast<std::size_t>(k)];
    s.p = x0.p + f * (xf.p - x0.p);
    s.v = vel;
    s.q = slerp(x0.q, xf.q, f).q;
    s.w = rate;
  }
  g.schedule = ImpulseSchedule::constant(N, M, problem.t_c(), problem.vehicle.dt_min());
  return g;
}

double discrete_cost(const ImpulseSchedule& schedule) { return schedule.widths.sum(); }

std::optional<int> find_reset_anchor(const std::vector<ScvxIterate>& history, int current) {
  std::optional<int> feasible_only;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->j < 1 || it->j >= current || !it->feasible) continue;
    if (it->mib_satisfied) return it->j;
    if (!feasible_only) feasible_only = it->j;
  }
  return feasible_only;
}

ResetResult reset(const std::vector<ScvxIterate>& history, int j_star, int j, double dt_min) {
  const ScvxIterate* anchor = nullptr;
  for (const auto& it : history) {
    if (it.j == j_star) anchor = &it;
  }
  if (anchor == nullptr) {
    throw std::invalid_argument("reset: iterate " + std::to_string(j_star) + " not in history");
  }
  ResetResult out{anchor->states, anchor->schedule, {}};
  for (const auto& it : history) {
    if (it.j < j_star || it.j >= j || (it.j == j_star && anchor->mib_satisfied)) continue;
    const auto& w = it.schedule.widths;
    for (int k = 0; k < w.rows(); ++k) {
      for (int i = 0; i < w.cols(); ++i) {
        if (w(k, i) > 0.0 && w(k, i) < dt_min) out.added.insert({k, i});
      }
    }
  }
  for (const auto& [k, i] : out.added) out.schedule.widths(k, i) = dt_min;
  return out;
}

ScvxResult run(const RendezvousProblem& problem, const ScvxConfig& config,
               const ConicSolver& solver, const ScvxStart* start,
               const IterationCallback& on_iteration) {
  problem.validate();
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const VehicleModel& vehicle = problem.vehicle;
  const int N = problem.N();
  const double dt_min = vehicle.dt_min();

  const InitialGuess guess = initial_guess(problem);
  const ScalingTransform scaling = fit_scaling(guess.states, vehicle, N);

  ScvxResult result;
  for (const auto& w : scaling.warnings) result.events.push_back("scaling: " + w);

  std::vector<ChaserState> ref_states = guess.states;
  ImpulseSchedule ref_schedule = guess.schedule;
  int j0 = 1;
  if (start != nullptr) {
    ref_states = start->states;
    ref_schedule = start->schedule;
    result.bounds = start->bounds;
    result.history = start->history;
    if (!result.history.empty()) j0 = result.history.back().j + 1;
  }
  if (static_cast<int>(ref_states.size()) != N + 1 || ref_schedule.N() != N ||
      ref_schedule.M() != static_cast<int>(vehicle.thruster_count())) {
    throw std::invalid_argument("reference trajectory does not match the problem dimensions");
  }

  result.initial_cost = discrete_cost(guess.schedule);
  double J_prev = result.history.empty() ? result.initial_cost : result.history.back().J;
  double w_tr = config.w_tr;
  result.status = ScvxStatus::max_iterations;
  // Warm-up: no minimum-pulse trigger until the subproblem settles.
  bool relaxed = config.min_pulse_warmup && (start == nullptr || start->history.empty());

  for (int j = j0; j <= config.j_max; ++j) {
    for (const auto& [k, i] : release_silenced_bounds(result.bounds, ref_states, problem)) {
      result.events.push_back("iteration " + std::to_string(j) + ": released bound (k=" +
                              std::to_string(k) + ", thruster " + std::to_string(i + 1) +
                              "), impingement-silenced on the reference");
    }

    ScvxIterate it;
    it.j = j;
    it.bound_count = static_cast<int>(result.bounds.size());
    SubproblemSolution sol;
    try {
      const DiscreteLTV dltv =
          discretize_trajectory(ref_states, ref_schedule, vehicle, config.integrator, config.exec);
      const ConicProgram prog =
          build_lrgp(ref_states, ref_schedule, dltv, scaling, problem, result.bounds,
                     LrgpWeights{w_tr, config.w_vc, !relaxed});
      sol = solve_lrgp(prog, solver, config.pulse_zero_tol);
    } catch (const std::exception& e) {
      result.status = ScvxStatus::solver_failure;
      result.message = "iteration " + std::to_string(j) + ": " + e.what();
      break;
    }
    result.solver_time += sol.solve_time;
    it.solver_status = sol.status;
    it.reduced_accuracy = sol.reduced_accuracy;
    it.solver_iterations = sol.solver_iterations;
    it.solve_time = sol.solve_time;
    if (!is_solved(sol.status)) {
      result.status = ScvxStatus::solver_failure;
      result.message = "iteration " + std::to_string(j) + ": subproblem " +
                       to_string(sol.status) + (sol.message.empty() ? "" : ": " + sol.message);
      break;
    }

    it.states = std::move(sol.states);
    it.schedule = std::move(sol.schedule);
    it.virtual_controls = std::move(sol.virtual_controls);
    it.eta = std::move(sol.eta);
    it.J = discrete_cost(it.schedule);
    it.J_f_scaled = sol.J_f_scaled;
    it.J_vc = sol.J_vc;
    it.J_tr = sol.J_tr;
    for (double e : it.eta) it.eta_sum += e;
    it.quat_norm_deviation = sol.quat_norm_deviation;
    try {
      it.error = propagation_error(it.states, it.schedule, vehicle, 0, N, config.integrator);
    } catch (const std::exception& e) {
      result.status = ScvxStatus::solver_failure;
      result.message = "iteration " + std::to_string(j) + ": propagation failed: " + e.what();
      break;
    }
    it.feasible = config.tol.satisfied_by(it.error);
    it.mib_satisfied = it.schedule.mib_feasible(dt_min, vehicle.dt_max(), config.mib_tol);

    const bool cost_settled =
        std::abs(it.J - J_prev) <= config.dJ_tol * std::abs(J_prev) + config.cost_abs_tol;
    J_prev = it.J;
    it.warmup = relaxed;
    if (relaxed && it.eta_sum < config.warmup_eta_tol) {
      relaxed = false;
      result.events.push_back("iteration " + std::to_string(j) +
                              ": warm-up finished, minimum-pulse trigger enabled");
    }

    if (it.feasible) {
      result.history.push_back(it);
      if (on_iteration) on_iteration(result.history.back());
      if (cost_settled && it.mib_satisfied && !it.warmup) {
        result.status = ScvxStatus::converged;
        break;
      }
      ref_states = result.history.back().states;
      ref_schedule = result.history.back().schedule;
      continue;
    }

    std::optional<int> anchor = it.warmup ? std::nullopt : find_reset_anchor(result.history, j);
    // The reset window (j*, j) excludes the current iterate, so it is
    // recorded only after the bounds are collected.
    std::optional<ResetResult> rr;
    int added = 0;
    if (anchor) {
      rr = reset(result.history, *anchor, j, dt_min);
      for (const auto& b : rr->added) added += result.bounds.count(b) == 0 ? 1 : 0;
      // Once the step cannot shrink further, a reset that adds no bound would
      // replay the same subproblem forever; move on from the current iterate.
      if (added == 0 && w_tr >= config.w_tr * config.w_tr_growth_cap) {
        result.events.push_back("iteration " + std::to_string(j) + ": reset to iterate " +
                                std::to_string(*anchor) + " would add no bound; continuing from it");
        anchor.reset();
      }
    }
    if (!anchor) {
      result.history.push_back(it);
      if (on_iteration) on_iteration(result.history.back());
      ref_states = result.history.back().states;
      ref_schedule = result.history.back().schedule;
      continue;
    }

    for (const auto& b : rr->added) result.bounds.insert(b);
    it.reset_applied = true;
    it.reset_anchor = *anchor;
    it.bounds_added = added;
    std::ostringstream ev;
    ev << "iteration " << j << ": reset to iterate " << *anchor << ", " << added
       << " new bound(s), " << result.bounds.size() << " total";
    // A reset that adds nothing would replay the same subproblem, so the
    // step is shortened instead.
    if (added == 0 && w_tr < config.w_tr * config.w_tr_growth_cap) {
      w_tr = std::min(w_tr * config.w_tr_growth, config.w_tr * config.w_tr_growth_cap);
      ev << ", w_tr raised to " << w_tr;
    }
    result.events.push_back(ev.str());
    result.history.push_back(it);
    if (on_iteration) on_iteration(result.history.back());
    ref_states = std::move(rr->states);
    ref_schedule = std::move(rr->schedule);
    for (const auto& [k, i] : result.bounds) ref_schedule.widths(k, i) =
        std::max(ref_schedule.widths(k, i), dt_min);
  }

  // Best iterate: the converged one, else the lowest-cost feasible iterate
  // that also satisfies the pulse-width constraint, else any feasible one.
  if (result.status == ScvxStatus::converged) {
    result.best = static_cast<int>(result.history.size()) - 1;
  } else {
    for (int pass = 0; pass < 2 && result.best < 0; ++pass) {
      for (std::size_t n = 0; n < result.history.size(); ++n) {
        const ScvxIterate& h = result.history[n];
        if (!h.feasible || (pass == 0 && !h.mib_satisfied)) continue;
        if (result.best < 0 || h.J < result.history[static_cast<std::size_t>(result.best)].J) {
          result.best = static_cast<int>(n);
        }
      }
    }
    if (result.status == ScvxStatus::max_iterations) {
      if (result.best < 0) {
        result.status = ScvxStatus::infeasible;
        result.message = "no iterate met the propagation tolerances in " +
                         std::to_string(config.j_max) + " iterations";
      } else {
        result.message = "iteration limit reached; returning iterate " +
                         std::to_string(result.history[static_cast<std::size_t>(result.best)].j);
      }
    }
  }
  result.wall_time = seconds_since(t_start);
  return result;
}

}  // namespace scvx
