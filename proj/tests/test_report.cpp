#include <gtest/gtest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include "scvx/report.hpp"
#include "test_support.hpp"

using namespace scvx;

namespace {

double parse(const std::string& s) {
  double x = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), x);
  return x;
}

// A 10-interval iterate whose nodes come from chained propagation, end node nudged.
struct Synthetic {
  RendezvousProblem problem = test::null_problem(20.0);
  ScvxIterate it;

  Synthetic() {
    std::mt19937_64 rng(21);
    it.j = 4;
    it.schedule = ImpulseSchedule::constant(10, 16, 2.0, 0.0);
    for (int k = 0; k < 10; ++k) it.schedule.widths.row(k) = test::random_pulses(rng, 16, 0.5, 0.8).transpose();
    it.states.push_back(problem.initial);
    for (int k = 0; k < 10; ++k) {
      it.states.push_back(propagate_interval(it.states.back(), it.schedule.widths.row(k).transpose(),
                                             problem.vehicle));
    }
    it.states[10].p.x() += 1e-3;
    it.J = discrete_cost(it.schedule);
    it.error = propagation_error(it.states, it.schedule, problem.vehicle, 0, 10);
  }
};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(150.0), "150");
  EXPECT_EQ(format_double(-2.5e-7), "-2.5e-07");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 30));
    EXPECT_EQ(parse(format_double(x)), x);
  }
  EXPECT_EQ(parse(format_double(std::numeric_limits<double>::denorm_min())),
            std::numeric_limits<double>::denorm_min());
}

TEST(TrajectoryJson, RoundTripsExactly) {
  const Synthetic s;
  const TrajectoryFile f = parse_trajectory_json(trajectory_json(s.problem, s.it));
  EXPECT_EQ(f.t_c, 2.0);
  EXPECT_EQ(f.schedule.widths, s.it.schedule.widths);
  ASSERT_EQ(f.states.size(), 11u);
  for (std::size_t k = 0; k < 11; ++k) {
    EXPECT_EQ(f.states[k].to_vector(), s.it.states[k].to_vector()) << k;
  }
  const PropagationError e = propagation_error(f.states, f.schedule, s.problem.vehicle, 0, 10);
  EXPECT_NEAR(e.p, s.it.error.p, 1e-9);
  EXPECT_NEAR(e.v, s.it.error.v, 1e-9);
  EXPECT_NEAR(e.theta_deg, s.it.error.theta_deg, 1e-9);
  EXPECT_NEAR(e.w_deg, s.it.error.w_deg, 1e-9);
  EXPECT_GT(e.p, 5e-4);
}

TEST(TrajectoryJson, RejectsTruncatedFile) {
  const Synthetic s;
  ScvxIterate cut = s.it;
  cut.states.pop_back();
  EXPECT_THROW(parse_trajectory_json(trajectory_json(s.problem, cut)), std::runtime_error);
}

TEST(DenseCsv, ShapeAndFiringCounts) {
  const Synthetic s;
  const std::vector<std::string> lines = lines_of(dense_csv(s.problem, s.it, 4));
  ASSERT_EQ(lines.size(), 1u + 10 * 4 + 1);
  EXPECT_EQ(lines[0].rfind("t,px,", 0), 0u);
  for (const std::string& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), 17) << l;
  EXPECT_EQ(lines[1].rfind("0,", 0), 0u);
  EXPECT_EQ(lines.back().rfind("20,", 0), 0u);
  const int n0 = static_cast<int>((s.it.schedule.widths.row(0).array() > 0.0).count());
  EXPECT_EQ(lines[1].substr(lines[1].rfind(',') + 1), std::to_string(n0));
  EXPECT_EQ(lines.back().substr(lines.back().rfind(',') + 1), "0");
}

TEST(ConvergenceJson, IdenticalRunsGiveIdenticalText) {
  const RendezvousProblem p = test::null_problem(20.0);
  const ScvxResult a = run(p, ScvxConfig{}, InteriorPointSolver());
  const ScvxResult b = run(p, ScvxConfig{}, InteriorPointSolver());
  EXPECT_EQ(convergence_json(a, kDefaultC1, false), convergence_json(b, kDefaultC1, false));
  const std::string timed = convergence_json(a);
  EXPECT_NE(timed.find("\"solver_time_s\""), std::string::npos);
  const std::string untimed = convergence_json(a, kDefaultC1, false);
  for (const char* key : {"\"solve_time_s\"", "\"solver_time_s\"", "\"wall_time_s\""}) {
    EXPECT_EQ(untimed.find(key), std::string::npos) << key;
  }
  EXPECT_NE(timed.find("\"status\": \"converged\""), std::string::npos);
}

TEST(SweepCsv, RowsAndRejections) {
  std::vector<SweepRow> rows(2);
  rows[0].t_f = 150.0;
  rows[0].fuel = 12.5;
  rows[0].converged = true;
  rows[0].status = ScvxStatus::converged;
  rows[0].iterations = 15;
  rows[0].problem = test::apollo_problem(150.0);
  rows[1].t_f = 151.0;
  rows[1].error = "mission.t_f: bad, really\nbad";
  const std::vector<std::string> lines = lines_of(sweep_csv(rows));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1], "150,12.5,0,0,0.25,15,0,1,converged,");
  EXPECT_EQ(lines[2], "151,0,0,0,0,0,0,0,rejected,mission.t_f: bad  really bad");
}

TEST(WriteRunBundle, WritesFilesForUsableRuns) {
  const auto dir = std::filesystem::temp_directory_path() / "scvx_report_bundle";
  std::filesystem::remove_all(dir);
  RunConfig cfg;
  cfg.dense_samples = 2;
  const RendezvousProblem p = test::null_problem(20.0);
  const ScvxResult r = run(p, cfg.scvx, InteriorPointSolver());
  const WrittenBundle w = write_run_bundle(dir, p, r, cfg);
  EXPECT_EQ(w.files.size(), 4u);
  for (const char* name : {"convergence.json", "trajectory.json", "dense.csv", "fuel.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  EXPECT_NE(read_text(dir / "fuel.json").find("\"total_kg\": 0"), std::string::npos);

  ScvxResult empty;
  const auto dir2 = dir / "empty";
  EXPECT_EQ(write_run_bundle(dir2, p, empty, cfg).files.size(), 1u);
  EXPECT_FALSE(std::filesystem::exists(dir2 / "trajectory.json"));
  std::filesystem::remove_all(dir);
}
