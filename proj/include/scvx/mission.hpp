#pragma once

// Fuel accounting and t_f trade-study sweeps.

#include <optional>
#include <string>
#include <vector>

#include "scvx/scvx.hpp"

namespace scvx {

inline constexpr double kDefaultC1 = 0.168;          // kg/s
inline constexpr double kApolloFuelTarget = 50.0;    // kg, G-type mission nominal

enum class FuelModel { squared, linear };
const char* to_string(FuelModel m);

struct FuelStep {
  double t = 0.0;  // s, start of the step
  int n = 0;       // thrusters firing on [t, next step)
};

struct FuelReport {
  double total = 0.0;                 // kg
  std::vector<double> per_interval;   // kg
  std::vector<FuelStep> timeline;     // n(t) as a step function, ends with n = 0 at t_f
  double target_ratio = 0.0;          // total / kApolloFuelTarget
  FuelModel model = FuelModel::squared;
  double c1 = kDefaultC1;
};

/// Integrates c1 * n(t)^2 (or c1 * n(t)) exactly over every control interval.
FuelReport fuel_consumed(const ImpulseSchedule& schedule, double c1 = kDefaultC1,
                         FuelModel model = FuelModel::squared);

struct SweepRow {
  double t_f = 0.0;
  bool ok = false;            // the run produced a usable iterate
  bool converged = false;
  ScvxStatus status = ScvxStatus::infeasible;
  double fuel = 0.0;          // kg, squared model
  double fuel_linear = 0.0;   // kg
  double baseline_fuel = 0.0; // kg, initial guess under the squared model
  int iterations = 0;
  double solve_time = 0.0;    // s, conic solver
  double wall_time = 0.0;     // s
  std::string error;
  FuelReport report;
  ScvxResult result;
  std::optional<RendezvousProblem> problem;  // empty when the problem was rejected
};

/// One independent driver run per final time. Failures are recorded per row.
/// Rows come back sorted by t_f.
std::vector<SweepRow> sweep_tf(const MissionSpec& spec, const VehicleModel& vehicle,
                               std::vector<double> tf_list, const ScvxConfig& config,
                               const ConicSolver& solver, double c1 = kDefaultC1,
                               const IterationCallback& on_iteration = {});

}  // namespace scvx
