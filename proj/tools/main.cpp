// scvx: rendezvous trajectory optimization from a JSON run configuration.
//
//   scvx solve        --config run.json [--output-dir DIR] [-v]
//   scvx sweep        --config run.json [--output-dir DIR] [-v]
//   scvx check-config --config run.json
//
// Exit codes: 0 success, 1 usage or configuration error, 2 infeasible or not
// converged, 3 conic solver failure. SCVX_SOLVER picks the conic solver when
// the configuration does not.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "scvx/config.hpp"
#include "scvx/report.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kSolverFailure = 3 };

struct Options {
  std::string config_path;
  std::string output_dir;
  int verbosity = 0;
};

int exit_code(scvx::ScvxStatus s) {
  switch (s) {
    case scvx::ScvxStatus::converged: return kOk;
    case scvx::ScvxStatus::solver_failure: return kSolverFailure;
    default: return kInfeasible;
  }
}

scvx::IterationCallback progress(int verbosity, const std::string& prefix) {
  if (verbosity < 1) return {};
  return [prefix](const scvx::ScvxIterate& it) {
    std::fprintf(stderr,
                 "%sj=%-3d J=%9.4f s  Jvc=%.3e  eta=%.3e  p_e=%.2e  feasible=%d mib=%d%s%s\n",
                 prefix.c_str(), it.j, it.J, it.J_vc, it.eta_sum, it.error.p, it.feasible ? 1 : 0,
                 it.mib_satisfied ? 1 : 0, it.warmup ? " warm-up" : "",
                 it.reset_applied ? " reset" : "");
  };
}

scvx::RunConfig load(const Options& opt) {
  scvx::RunConfig rc = opt.config_path.empty() ? scvx::parse_config("")
                                               : scvx::load_config(opt.config_path);
  if (!opt.output_dir.empty()) rc.output_dir = opt.output_dir;
  for (const auto& w : rc.warnings) std::cerr << "warning: " << w << "\n";
  return rc;
}

void print_events(const scvx::ScvxResult& r, int verbosity) {
  if (verbosity < 2) return;
  for (const auto& e : r.events) std::cerr << "  " << e << "\n";
}

void summarize(const std::string& label, const scvx::ScvxResult& r, const scvx::RunConfig& rc) {
  std::cout << label << to_string(r.status) << " after " << r.history.size()
            << " iteration(s), solver time " << r.solver_time << " s";
  if (const scvx::ScvxIterate* best = r.best_iterate()) {
    const double fuel = scvx::fuel_consumed(best->schedule, rc.c1, rc.fuel_model).total;
    std::cout << "; iterate " << best->j << ": firing time " << best->J << " s, fuel " << fuel
              << " kg (" << to_string(rc.fuel_model) << ")";
  }
  std::cout << "\n";
  if (!r.message.empty()) std::cout << "  " << r.message << "\n";
}

int cmd_solve(const Options& opt) {
  const scvx::RunConfig rc = load(opt);
  const scvx::RendezvousProblem problem = rc.build_problem();
  const auto solver = scvx::make_solver(rc.solver, rc.solver_settings);
  const scvx::ScvxResult r =
      scvx::run(problem, rc.scvx, *solver, nullptr, progress(opt.verbosity, ""));
  print_events(r, opt.verbosity);
  const auto bundle = scvx::write_run_bundle(rc.output_dir, problem, r, rc);
  summarize("", r, rc);
  for (const auto& f : bundle.files) std::cout << "  wrote " << f.string() << "\n";
  return exit_code(r.status);
}

int cmd_sweep(const Options& opt) {
  const scvx::RunConfig rc = load(opt);
  const scvx::VehicleModel vehicle = rc.build_vehicle();
  const auto solver = scvx::make_solver(rc.solver, rc.solver_settings);
  const auto rows = scvx::sweep_tf(rc.mission, vehicle, rc.sweep, rc.scvx, *solver, rc.c1,
                                   progress(opt.verbosity, "  "));
  int code = kOk;
  for (const auto& row : rows) {
    std::ostringstream dir;
    dir << "tf_" << scvx::format_double(row.t_f);
    const std::string label = "t_f = " + scvx::format_double(row.t_f) + " s: ";
    if (!row.problem) {
      std::cout << label << "rejected: " << row.error << "\n";
      code = std::max<int>(code, kInfeasible);
      continue;
    }
    print_events(row.result, opt.verbosity);
    scvx::write_run_bundle(rc.output_dir / dir.str(), *row.problem, row.result, rc);
    summarize(label, row.result, rc);
    const int c = exit_code(row.status);
    if (c == kSolverFailure || code == kSolverFailure) {
      code = kSolverFailure;
    } else {
      code = std::max(code, c);
    }
  }
  std::filesystem::create_directories(rc.output_dir);
  const auto table = rc.output_dir / "sweep.csv";
  scvx::write_text(table, scvx::sweep_csv(rows));
  std::cout << "wrote " << table.string() << "\n";
  return code;
}

int cmd_check(const Options& opt) {
  const scvx::RunConfig rc = load(opt);
  const scvx::RendezvousProblem p = rc.build_problem();
  std::cout << "configuration OK: t_f = " << p.t_f << " s, N = " << p.N()
            << ", M = " << p.vehicle.thruster_count() << ", dt_min = " << p.vehicle.dt_min()
            << " s, t_c = " << p.t_c() << " s, r_a = " << p.r_a << " m, w_tr = " << rc.scvx.w_tr
            << ", w_vc = " << rc.scvx.w_vc << ", sweep of " << rc.sweep.size() << " final time(s), "
            << rc.warnings.size() << " warning(s)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spacecraft rendezvous trajectory optimization by successive convexification"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("-c,--config", opt.config_path, "JSON run configuration (omitted: defaults)")
      ->check(CLI::ExistingFile);
  app.add_option("-o,--output-dir", opt.output_dir, "Override the configured output directory");
  app.add_flag("-v,--verbose", opt.verbosity, "Per-iteration progress; twice adds driver events");

  auto* solve = app.add_subcommand("solve", "Solve one rendezvous problem");
  auto* sweep = app.add_subcommand("sweep", "Solve once per final time in the sweep list");
  auto* check = app.add_subcommand("check-config", "Validate the configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (check->parsed()) return cmd_check(opt);
  } catch (const scvx::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}
