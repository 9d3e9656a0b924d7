#include "scvx/report.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace scvx {

namespace {

using json = nlohmann::json;

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }
json quat(const UnitQuaternion& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

Vec3 read_vec3(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

json error_json(const PropagationError& e) {
  return {{"p", e.p}, {"v", e.v}, {"theta_deg", e.theta_deg}, {"w_deg", e.w_deg}};
}

void append_state(std::string& line, const ChaserState& s) {
  const TaitBryan tb = to_tait_bryan(s.q);
  const double values[] = {s.p[0], s.p[1], s.p[2], s.v[0], s.v[1], s.v[2],
                           s.q.w(), s.q.x(), s.q.y(), s.q.z(),
                           rad2deg(s.w[0]), rad2deg(s.w[1]), rad2deg(s.w[2]),
                           rad2deg(tb.roll), rad2deg(tb.pitch), rad2deg(tb.yaw)};
  for (double x : values) {
    line += ',';
    line += format_double(x);
  }
}

int firing_count(const Eigen::VectorXd& row, double local_t) {
  int n = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) n += row[i] > local_t ? 1 : 0;
  return n;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string trajectory_json(const RendezvousProblem& problem, const ScvxIterate& iterate) {
  const ImpulseSchedule& sch = iterate.schedule;
  json nodes = json::array();
  for (std::size_t k = 0; k < iterate.states.size(); ++k) {
    const ChaserState& s = iterate.states[k];
    const TaitBryan tb = to_tait_bryan(s.q);
    json n = {{"k", k},
              {"t", static_cast<double>(k) * sch.t_c},
              {"p", vec(s.p)},
              {"v", vec(s.v)},
              {"q", quat(s.q)},
              {"w", vec(s.w)},
              {"w_deg", vec(s.w * rad2deg(1.0))},
              {"tait_bryan_deg",
               {{"roll", rad2deg(tb.roll)}, {"pitch", rad2deg(tb.pitch)}, {"yaw", rad2deg(tb.yaw)}}}};
    if (static_cast<int>(k) < sch.N()) {
      json w = json::array();
      for (int i = 0; i < sch.M(); ++i) w.push_back(sch.widths(static_cast<Eigen::Index>(k), i));
      n["widths"] = std::move(w);
    }
    nodes.push_back(std::move(n));
  }
  json doc = {{"t_f", problem.t_f},
              {"t_c", sch.t_c},
              {"N", sch.N()},
              {"M", sch.M()},
              {"iteration", iterate.j},
              {"firing_time_s", iterate.J},
              {"propagation_error", error_json(iterate.error)},
              {"nodes", std::move(nodes)}};
  return doc.dump(1) + "\n";
}

TrajectoryFile parse_trajectory_json(const std::string& text) {
  const json doc = json::parse(text);
  TrajectoryFile out;
  out.t_c = doc.at("t_c").get<double>();
  const int N = doc.at("N").get<int>();
  const int M = doc.at("M").get<int>();
  const json& nodes = doc.at("nodes");
  if (static_cast<int>(nodes.size()) != N + 1) {
    throw std::runtime_error("trajectory file: expected " + std::to_string(N + 1) + " nodes");
  }
  out.schedule.t_c = out.t_c;
  out.schedule.widths = Eigen::MatrixXd::Zero(N, M);
  for (int k = 0; k <= N; ++k) {
    const json& n = nodes.at(static_cast<std::size_t>(k));
    ChaserState s;
    s.p = read_vec3(n.at("p"));
    s.v = read_vec3(n.at("v"));
    const json& q = n.at("q");
    s.q = UnitQuaternion(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                         q.at(3).get<double>());
    s.w = read_vec3(n.at("w"));
    out.states.push_back(s);
    if (k < N) {
      const json& w = n.at("widths");
      for (int i = 0; i < M; ++i) out.schedule.widths(k, i) = w.at(static_cast<std::size_t>(i)).get<double>();
    }
  }
  return out;
}

std::string dense_csv(const RendezvousProblem& problem, const ScvxIterate& iterate,
                      int per_interval, const Tolerance& tol) {
  std::string out =
      "t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx_deg,wy_deg,wz_deg,roll_deg,pitch_deg,yaw_deg,n_firing\n";
  const ImpulseSchedule& sch = iterate.schedule;
  ChaserState s = iterate.states.front();
  for (int k = 0; k < sch.N(); ++k) {
    const Eigen::VectorXd row = sch.widths.row(k).transpose();
    const IntervalTrajectory seg =
        propagate_interval_dense(s, row, problem.vehicle, tol, per_interval);
    for (std::size_t n = 0; n < seg.samples.size(); ++n) {
      std::string line = format_double(k * sch.t_c + seg.t[n]);
      append_state(line, seg.samples[n]);
      line += ',' + std::to_string(firing_count(row, seg.t[n]));
      out += line + '\n';
    }
    s = seg.end;
  }
  std::string line = format_double(sch.N() * sch.t_c);
  append_state(line, s);
  out += line + ",0\n";
  return out;
}

std::string convergence_json(const ScvxResult& result, double c1, bool include_timing) {
  json iters = json::array();
  for (const ScvxIterate& it : result.history) {
    json row = {{"j", it.j},
                {"firing_time_s", it.J},
                {"fuel_kg", fuel_consumed(it.schedule, c1, FuelModel::squared).total},
                {"J_f_scaled", it.J_f_scaled},
                {"J_vc", it.J_vc},
                {"J_tr", it.J_tr},
                {"eta_sum", it.eta_sum},
                {"propagation_error", error_json(it.error)},
                {"feasible", it.feasible},
                {"mib_satisfied", it.mib_satisfied},
                {"warmup", it.warmup},
                {"reset_applied", it.reset_applied},
                {"reset_anchor", it.reset_anchor},
                {"bounds_added", it.bounds_added},
                {"bound_count", it.bound_count},
                {"solver_status", to_string(it.solver_status)},
                {"reduced_accuracy", it.reduced_accuracy},
                {"solver_iterations", it.solver_iterations},
                {"quat_norm_deviation", it.quat_norm_deviation}};
    if (include_timing) row["solve_time_s"] = it.solve_time;
    iters.push_back(std::move(row));
  }
  const ScvxIterate* best = result.best_iterate();
  json doc = {{"status", to_string(result.status)},
              {"converged", result.converged()},
              {"message", result.message},
              {"best_iteration", best != nullptr ? json(best->j) : json(nullptr)},
              {"initial_firing_time_s", result.initial_cost},
              {"bound_count", result.bounds.size()},
              {"iterations", std::move(iters)},
              {"events", result.events}};
  if (include_timing) {
    doc["solver_time_s"] = result.solver_time;
    doc["wall_time_s"] = result.wall_time;
  }
  return doc.dump(1) + "\n";
}

std::string fuel_json(const FuelReport& report, double linear_total) {
  json timeline = json::array();
  for (const FuelStep& s : report.timeline) timeline.push_back({{"t", s.t}, {"n", s.n}});
  json doc = {{"model", to_string(report.model)},
              {"c1_kg_per_s", report.c1},
              {"total_kg", report.total},
              {"total_linear_kg", linear_total},
              {"target_kg", kApolloFuelTarget},
              {"target_ratio", report.target_ratio},
              {"per_interval_kg", report.per_interval},
              {"thruster_count", std::move(timeline)}};
  return doc.dump(1) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "t_f,fuel_kg,fuel_linear_kg,baseline_fuel_kg,target_ratio,iterations,solve_time_s,"
      "converged,status,error\n";
  for (const SweepRow& r : rows) {
    std::string err = r.error;
    for (char& ch : err) {
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    }
    out += format_double(r.t_f) + ',' + format_double(r.fuel) + ',' +
           format_double(r.fuel_linear) + ',' + format_double(r.baseline_fuel) + ',' +
           format_double(r.fuel / kApolloFuelTarget) + ',' + std::to_string(r.iterations) + ',' +
           format_double(r.solve_time) + ',' + (r.converged ? "1" : "0") + ',' +
           (r.problem ? to_string(r.status) : "rejected") + ',' + err + '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WrittenBundle write_run_bundle(const std::filesystem::path& dir, const RendezvousProblem& problem,
                               const ScvxResult& result, const RunConfig& config) {
  std::filesystem::create_directories(dir);
  WrittenBundle out;
  auto emit = [&](const char* name, const std::string& text) {
    const auto path = dir / name;
    write_text(path, text);
    out.files.push_back(path);
  };
  emit("convergence.json", convergence_json(result, config.c1));
  if (const ScvxIterate* best = result.best_iterate()) {
    emit("trajectory.json", trajectory_json(problem, *best));
    emit("dense.csv", dense_csv(problem, *best, config.dense_samples, config.scvx.integrator));
    const FuelReport fr = fuel_consumed(best->schedule, config.c1, config.fuel_model);
    const double linear = fuel_consumed(best->schedule, config.c1, FuelModel::linear).total;
    emit("fuel.json", fuel_json(fr, linear));
  }
  return out;
}

}  // namespace scvx
