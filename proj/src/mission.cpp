#include "scvx/mission.hpp"

#include <algorithm>

namespace scvx {

const char* to_string(FuelModel m) { return m == FuelModel::squared ? "squared" : "linear"; }

FuelReport fuel_consumed(const ImpulseSchedule& schedule, double c1, FuelModel model) {
  FuelReport rep;
  rep.model = model;
  rep.c1 = c1;
  const int N = schedule.N();
  const int M = schedule.M();
  rep.per_interval.assign(static_cast<std::size_t>(N), 0.0);
  std::vector<double> w(static_cast<std::size_t>(M));
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < M; ++i) w[static_cast<std::size_t>(i)] = std::max(0.0, schedule.widths(k, i));
    std::sort(w.begin(), w.end());
    const double t0 = k * schedule.t_c;
    double prev = 0.0;
    double fuel = 0.0;
    for (int i = 0; i < M; ++i) {
      const double wi = w[static_cast<std::size_t>(i)];
      if (wi <= prev) continue;
      const int n = M - i;
      const double rate = model == FuelModel::squared ? static_cast<double>(n) * n : n;
      fuel += c1 * rate * (wi - prev);
      rep.timeline.push_back({t0 + prev, n});
      prev = wi;
    }
    rep.timeline.push_back({t0 + prev, 0});
    rep.per_interval[static_cast<std::size_t>(k)] = fuel;
    rep.total += fuel;
  }
  rep.target_ratio = rep.total / kApolloFuelTarget;
  return rep;
}

std::vector<SweepRow> sweep_tf(const MissionSpec& spec, const VehicleModel& vehicle,
                               std::vector<double> tf_list, const ScvxConfig& config,
                               const ConicSolver& solver, double c1,
                               const IterationCallback& on_iteration) {
  std::sort(tf_list.begin(), tf_list.end());
  std::vector<SweepRow> rows;
  rows.reserve(tf_list.size());
  for (double tf : tf_list) {
    SweepRow row;
    row.t_f = tf;
    try {
      MissionSpec s = spec;
      s.t_f = tf;
      row.problem = make_problem(s, vehicle);
      row.baseline_fuel = fuel_consumed(initial_guess(*row.problem).schedule, c1).total;
      row.result = run(*row.problem, config, solver, nullptr, on_iteration);
      row.status = row.result.status;
      row.converged = row.result.converged();
      row.iterations = static_cast<int>(row.result.history.size());
      row.solve_time = row.result.solver_time;
      row.wall_time = row.result.wall_time;
      if (const ScvxIterate* best = row.result.best_iterate()) {
        row.ok = true;
        row.report = fuel_consumed(best->schedule, c1, FuelModel::squared);
        row.fuel = row.report.total;
        row.fuel_linear = fuel_consumed(best->schedule, c1, FuelModel::linear).total;
      }
      if (!row.result.message.empty()) row.error = row.result.message;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace scvx
