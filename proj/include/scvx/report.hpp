#pragma once

// Plot-ready artifacts: JSON for trajectories and logs, CSV for tables.
// Every double is printed in its shortest round-trip form.

#include <filesystem>
#include <string>
#include <vector>

#include "scvx/config.hpp"
#include "scvx/mission.hpp"

namespace scvx {

/// Shortest decimal that parses back to exactly `x`.
std::string format_double(double x);

struct TrajectoryFile {
  double t_c = 0.0;
  std::vector<ChaserState> states;
  ImpulseSchedule schedule;
};

/// Node-wise p, v, q (scalar first), w in rad/s and deg/s, Z-Y-X angles in
/// degrees, and the per-thruster widths of each interval.
std::string trajectory_json(const RendezvousProblem& problem, const ScvxIterate& iterate);
TrajectoryFile parse_trajectory_json(const std::string& text);

/// Chained propagation of the widths from the initial node, `per_interval`
/// samples per control interval plus the final node.
std::string dense_csv(const RendezvousProblem& problem, const ScvxIterate& iterate,
                      int per_interval, const Tolerance& tol = {});

/// Per-iteration history plus the driver events; fuel uses the squared
/// model with `c1`. `include_timing` = false drops the timing fields so
/// identical runs give identical text.
std::string convergence_json(const ScvxResult& result, double c1 = kDefaultC1,
                             bool include_timing = true);

std::string fuel_json(const FuelReport& report, double linear_total);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct WrittenBundle {
  std::vector<std::filesystem::path> files;
};

/// Writes trajectory.json, dense.csv, convergence.json and fuel.json into
/// `dir` (created if needed). The trajectory files are skipped when the run
/// has no usable iterate.
WrittenBundle write_run_bundle(const std::filesystem::path& dir, const RendezvousProblem& problem,
                               const ScvxResult& result, const RunConfig& config);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace scvx
