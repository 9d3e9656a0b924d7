#include "scvx/lrgp.hpp"

#include <algorithm>
#include <cmath>

namespace scvx {

StcSpec min_pulse_stc(double ref_width, double dt_min, int slot) {
  StcSpec s;
  s.trigger = ref_width - dt_min;
  if (s.trigger < 0.0) {
    s.kind = StcKind::input_zero;
    s.indices = {slot};
  }
  return s;
}

StcSpec impingement_attitude_stc(const Vec3& ref_next_position, const Vec3& p_f, double r_a,
                                 double dtheta_max, int node) {
  StcSpec s;
  s.trigger = (ref_next_position - p_f).norm() - r_a;
  if (s.trigger < 0.0) {
    s.kind = StcKind::state_inequality;
    s.indices = {node};
    s.bound = std::cos(0.5 * dtheta_max);
  }
  return s;
}

StcSpec impingement_silence_stc(const Vec3& ref_position, const Vec3& p_f, double r_a,
                                const VehicleModel& vehicle) {
  StcSpec s;
  s.trigger = (ref_position - p_f).norm() - r_a;
  if (s.trigger < 0.0) {
    s.kind = StcKind::input_zero;
    for (int label : vehicle.forward_set()) s.indices.push_back(label - 1);
  }
  return s;
}

bool stc_exact_check(double g, double c) { return -std::min(g, 0.0) * c <= 0.0; }

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct RowBuilder {
  Triplets t;
  std::vector<double> rhs;
  int rows = 0;

  int add_row(double r) {
    rhs.push_back(r);
    return rows++;
  }
  void coef(int row, int col, double v) {
    if (v != 0.0) t.emplace_back(row, col, v);
  }
};

}  // namespace

ConicProgram build_lrgp(const std::vector<ChaserState>& ref_states,
                        const ImpulseSchedule& ref_schedule, const DiscreteLTV& dltv,
                        const ScalingTransform& sc, const RendezvousProblem& pr,
                        const BoundSet& extra_lower_bounds, const LrgpWeights& weights) {
  const int N = ref_schedule.N();
  const int M = ref_schedule.M();
  const VehicleModel& veh = pr.vehicle;
  if (static_cast<int>(ref_states.size()) != N + 1 || dltv.N() != N ||
      M != static_cast<int>(veh.thruster_count()) || sc.Su.size() != M) {
    throw LrgpBuildError("build_lrgp: inconsistent dimensions");
  }
  constexpr int n = kStateDim;

  ConicProgram prog;
  prog.scaling = sc;
  prog.weights = weights;
  prog.bounds = extra_lower_bounds;
  prog.dt_min = veh.dt_min();
  prog.dt_max = veh.dt_max();
  prog.t_c = veh.t_c();

  LrgpLayout& L = prog.layout;
  L.N = N;
  L.M = M;
  L.x = 0;
  L.u = L.x + n * (N + 1);
  L.l = L.u + M * N;
  L.t = L.l + n * N;
  L.eta = L.t + n * N;
  L.total = L.eta + std::max(0, N - 1);

  const Vec3& p_f = pr.terminal.p;

  // Which inputs are forced to zero by the triggers.
  prog.forced_zero.setConstant(N, M, false);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> by_min(N, M), by_sil(N, M);
  by_min.setConstant(false);
  by_sil.setConstant(false);
  prog.silence_nodes.assign(static_cast<std::size_t>(N), false);
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < M; ++i) {
      if (weights.min_pulse && min_pulse_stc(ref_schedule.widths(k, i), veh.dt_min(), i).active()) by_min(k, i) = true;
    }
    const StcSpec sil = impingement_silence_stc(ref_states[static_cast<std::size_t>(k)].p, p_f,
                                                pr.r_a, veh);
    if (sil.active()) {
      prog.silence_nodes[static_cast<std::size_t>(k)] = true;
      for (int i : sil.indices) by_sil(k, i) = true;
    }
  }
  for (const auto& [k, i] : extra_lower_bounds) {
    if (k < 0 || k >= N || i < 0 || i >= M) {
      throw LrgpBuildError("reset bound outside the schedule: (k=" + std::to_string(k) +
                           ", i=" + std::to_string(i) + ")");
    }
    if (by_sil(k, i) || by_min(k, i)) {
      throw LrgpBuildError("conflicting constraints: pair (k=" + std::to_string(k) +
                           ", thruster " + std::to_string(i + 1) + ") is reset-bounded and " +
                           (by_sil(k, i) ? "impingement-silenced" : "min-pulse-silenced"));
    }
  }
  prog.forced_zero = by_min.array() || by_sil.array();
  prog.counts.min_pulse = static_cast<int>(by_min.count());
  prog.counts.silence = static_cast<int>(by_sil.count());

  RowBuilder eq, lin;
  const Vec13 Sx = sc.Sx, sx = sc.sx;

  // Discrete dynamics in scaled variables.
  for (int k = 0; k < N; ++k) {
    const DiscreteInterval& d = dltv.intervals[static_cast<std::size_t>(k)];
    const Mat13 Ahat = Sx.cwiseInverse().asDiagonal() * d.A * Sx.asDiagonal();
    const Eigen::MatrixXd Bhat = Sx.cwiseInverse().asDiagonal() * d.B * sc.Su.asDiagonal();
    const Vec13 rhs = ((d.A * sx + d.B * sc.su + d.r - sx).array() / Sx.array()).matrix();
    for (int j = 0; j < n; ++j) {
      const int row = eq.add_row(rhs[j]);
      eq.coef(row, L.xi(k + 1, j), 1.0);
      for (int c = 0; c < n; ++c) eq.coef(row, L.xi(k, c), -Ahat(j, c));
      for (int i = 0; i < M; ++i) eq.coef(row, L.ui(k, i), -Bhat(j, i));
      eq.coef(row, L.li(k, j), -sc.Sl[j] / Sx[j]);
      ++prog.counts.dynamics;
    }
  }

  // Boundary conditions.
  const Vec13 x0h = sc.scale_state(pr.initial.to_vector());
  const Vec13 xfh = sc.scale_state(pr.terminal.to_vector());
  for (int j = 0; j < n; ++j) {
    eq.coef(eq.add_row(x0h[j]), L.xi(0, j), 1.0);
    ++prog.counts.initial;
  }
  for (int j = 0; j < n; ++j) {
    eq.coef(eq.add_row(xfh[j]), L.xi(N, j), 1.0);
    ++prog.counts.terminal;
  }

  // Pulse widths: forced-zero pairs get an equality only, others a box.
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < M; ++i) {
      const int col = L.ui(k, i);
      const double su = sc.su[i], Su = sc.Su[i];
      if (prog.forced_zero(k, i)) {
        eq.coef(eq.add_row((0.0 - su) / Su), col, 1.0);
        ++prog.counts.forced_zero;
        continue;
      }
      const bool reset = extra_lower_bounds.count({k, i}) > 0;
      const double lo = reset ? veh.dt_min() : 0.0;
      lin.coef(lin.add_row(-(lo - su) / Su), col, -1.0);
      lin.coef(lin.add_row((veh.dt_max() - su) / Su), col, 1.0);
      ++prog.counts.box;
      if (reset) ++prog.counts.reset_bound;
    }
  }

  // |l| <= t elementwise.
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j < n; ++j) {
      int r = lin.add_row(0.0);
      lin.coef(r, L.li(k, j), 1.0);
      lin.coef(r, L.ti(k, j), -1.0);
      r = lin.add_row(0.0);
      lin.coef(r, L.li(k, j), -1.0);
      lin.coef(r, L.ti(k, j), -1.0);
      ++prog.counts.vc_abs;
    }
  }

  // Attitude bound inside the impingement radius, phase lead on the trigger.
  prog.attitude_nodes.assign(static_cast<std::size_t>(N + 1), false);
  const Vec4 qf = pr.terminal.q.coeffs();
  for (int k = 1; k <= N - 1; ++k) {
    const StcSpec st = impingement_attitude_stc(ref_states[static_cast<std::size_t>(k + 1)].p,
                                                p_f, pr.r_a, pr.dtheta_max, k);
    if (!st.active()) continue;
    prog.attitude_nodes[static_cast<std::size_t>(k)] = true;
    const int r = lin.add_row(-st.bound);
    for (int a = 0; a < 4; ++a) lin.coef(r, L.xi(k, sidx::q + a), -qf[a]);
    ++prog.counts.attitude;
  }

  // Second-order cones are appended after all orthant rows.
  RowBuilder soc;
  std::vector<int> soc_dims;
  const double cg = std::cos(pr.gamma);
  for (int k = 1; k <= N - 1; ++k) {
    const Vec3 sp = sx.segment<3>(sidx::p), Sp = Sx.segment<3>(sidx::p);
    const int r0 = soc.add_row(pr.e_d.dot(sp - pr.p_d) / cg);
    for (int a = 0; a < 3; ++a) soc.coef(r0, L.xi(k, sidx::p + a), -pr.e_d[a] * Sp[a] / cg);
    for (int a = 0; a < 3; ++a) {
      const int r = soc.add_row(sp[a] - pr.p_d[a]);
      soc.coef(r, L.xi(k, sidx::p + a), -Sp[a]);
    }
    soc_dims.push_back(4);
    ++prog.counts.cone;
  }
  for (int k = 1; k <= N - 1; ++k) {
    const Vec13 xbar = sc.scale_state(ref_states[static_cast<std::size_t>(k)].to_vector());
    int r = soc.add_row(1.0);
    soc.coef(r, L.ei(k), -1.0);
    r = soc.add_row(-1.0);
    soc.coef(r, L.ei(k), -1.0);
    for (int j = 0; j < n; ++j) {
      r = soc.add_row(-2.0 * xbar[j]);
      soc.coef(r, L.xi(k, j), -2.0);
    }
    soc_dims.push_back(2 + n);
    ++prog.counts.trust;
  }

  ConeProblem& cp = prog.cone;
  cp.c = Eigen::VectorXd::Zero(L.total);
  double offset = 0.0;
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < M; ++i) {
      cp.c[L.ui(k, i)] = sc.Su[i] / sc.SJ;
      offset += sc.su[i] / sc.SJ;
    }
    for (int j = 0; j < n; ++j) cp.c[L.ti(k, j)] = weights.w_vc;
  }
  for (int k = 1; k <= N - 1; ++k) cp.c[L.ei(k)] = weights.w_tr;
  cp.objective_offset = offset;

  cp.A.resize(eq.rows, L.total);
  cp.A.setFromTriplets(eq.t.begin(), eq.t.end());
  cp.b = Eigen::Map<Eigen::VectorXd>(eq.rhs.data(), eq.rows);

  Triplets g = lin.t;
  for (const auto& tr : soc.t) g.emplace_back(tr.row() + lin.rows, tr.col(), tr.value());
  cp.G.resize(lin.rows + soc.rows, L.total);
  cp.G.setFromTriplets(g.begin(), g.end());
  cp.h.resize(lin.rows + soc.rows);
  for (int i = 0; i < lin.rows; ++i) cp.h[i] = lin.rhs[static_cast<std::size_t>(i)];
  for (int i = 0; i < soc.rows; ++i) cp.h[lin.rows + i] = soc.rhs[static_cast<std::size_t>(i)];
  cp.l = lin.rows;
  cp.soc_dims = soc_dims;
  cp.validate();
  return prog;
}

SubproblemSolution solve_lrgp(const ConicProgram& prog, const ConicSolver& solver,
                              double zero_tol) {
  const LrgpLayout& L = prog.layout;
  const ScalingTransform& sc = prog.scaling;
  const ConeSolution cs = solver.solve(prog.cone);

  SubproblemSolution out;
  out.status = cs.status;
  out.reduced_accuracy = cs.status == SolveStatus::optimal_inaccurate;
  out.solver_iterations = cs.iterations;
  out.solve_time = cs.solve_time;
  out.objective = cs.primal_objective;
  out.message = cs.message;
  if (!is_solved(cs.status)) {
    return out;
  }
  const Eigen::VectorXd& z = cs.x;
  constexpr int n = kStateDim;

  out.states.resize(static_cast<std::size_t>(L.N + 1));
  for (int k = 0; k <= L.N; ++k) {
    const Vec13 xh = z.segment<n>(L.xi(k, 0));
    const Vec13 x = sc.unscale_state(xh);
    out.quat_norm_deviation =
        std::max(out.quat_norm_deviation, std::abs(1.0 - x.segment<4>(sidx::q).norm()));
    out.states[static_cast<std::size_t>(k)] = ChaserState::from_vector(x);
  }

  out.schedule.t_c = prog.t_c;
  out.schedule.widths.resize(L.N, L.M);
  double jf_scaled = 0.0;
  for (int k = 0; k < L.N; ++k) {
    const Eigen::VectorXd uh = z.segment(L.ui(k, 0), L.M);
    jf_scaled += ((sc.Su.array() * uh.array() + sc.su.array()) / sc.SJ).sum();
    const Eigen::VectorXd u = sc.unscale_input(uh);
    for (int i = 0; i < L.M; ++i) {
      double w = std::clamp(u[i], 0.0, prog.dt_max);
      if (w <= zero_tol || prog.forced_zero(k, i)) w = 0.0;
      if (prog.bounds.count({k, i}) > 0) w = std::max(w, prog.dt_min);
      out.schedule.widths(k, i) = w;
    }
  }
  out.J_f_scaled = jf_scaled;
  out.J_f = out.schedule.widths.sum();

  out.virtual_controls.resize(static_cast<std::size_t>(L.N));
  double vc_scaled = 0.0;
  for (int k = 0; k < L.N; ++k) {
    const Vec13 lh = z.segment<n>(L.li(k, 0));
    vc_scaled += lh.lpNorm<1>();
    const Vec13 l = sc.unscale_vc(lh);
    out.J_vc_physical += l.lpNorm<1>();
    out.virtual_controls[static_cast<std::size_t>(k)] = l;
  }
  out.J_vc = prog.weights.w_vc * vc_scaled;

  for (int k = 1; k <= L.N - 1; ++k) out.eta.push_back(z[L.ei(k)]);
  double eta_sum = 0.0;
  for (double e : out.eta) eta_sum += e;
  out.J_tr = prog.weights.w_tr * eta_sum;
  return out;
}

}  // namespace scvx
