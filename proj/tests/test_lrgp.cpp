#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace scvx;

namespace {

struct Built {
  RendezvousProblem problem;
  InitialGuess guess;
  ScalingTransform scaling;
  DiscreteLTV dltv;

  explicit Built(RendezvousProblem p, bool zero_widths = false)
      : problem(std::move(p)), guess(initial_guess(problem)) {
    if (zero_widths) guess.schedule.widths.setZero();
    scaling = fit_scaling(guess.states, problem.vehicle, problem.N());
    dltv = discretize_trajectory(guess.states, guess.schedule, problem.vehicle);
  }

  ConicProgram program(const BoundSet& bounds = {}, LrgpWeights w = {}) const {
    return build_lrgp(guess.states, guess.schedule, dltv, scaling, problem, bounds, w);
  }
};

const Built& apollo150() {
  static const Built b(test::apollo_problem(150.0));
  return b;
}

}  // namespace

TEST(Stc, MinimumPulseTrigger) {
  const StcSpec a = min_pulse_stc(0.05, 0.1, 7);
  EXPECT_TRUE(a.active());
  EXPECT_EQ(a.kind, StcKind::input_zero);
  EXPECT_EQ(a.indices, std::vector<int>{7});
  EXPECT_NEAR(a.trigger, -0.05, 1e-15);
  EXPECT_FALSE(min_pulse_stc(0.2, 0.1).active());
  EXPECT_FALSE(min_pulse_stc(0.1, 0.1).active());
  EXPECT_TRUE(min_pulse_stc(0.0, 0.1).active());
}

TEST(Stc, ImpingementAttitudeTrigger) {
  const Vec3 pf(13.5, 0.0, 0.0);
  EXPECT_FALSE(impingement_attitude_stc(pf - Vec3(10.0, 0.0, 0.0), pf, 4.0, deg2rad(2.0)).active());
  const StcSpec s = impingement_attitude_stc(pf - Vec3(0.0, 2.0, 0.0), pf, 4.0, deg2rad(2.0), 9);
  EXPECT_TRUE(s.active());
  EXPECT_EQ(s.kind, StcKind::state_inequality);
  EXPECT_EQ(s.indices, std::vector<int>{9});
  EXPECT_NEAR(s.bound, std::cos(deg2rad(1.0)), 1e-15);
  EXPECT_FALSE(impingement_attitude_stc(pf - Vec3(4.0, 0.0, 0.0), pf, 4.0, deg2rad(2.0)).active());
}

TEST(Stc, ImpingementSilenceTrigger) {
  const Vec3 pf(13.5, 0.0, 0.0);
  const StcSpec s = impingement_silence_stc(Vec3(12.0, 0.5, 0.0), pf, 4.0, test::apollo());
  EXPECT_TRUE(s.active());
  EXPECT_EQ(s.indices, (std::vector<int>{0, 4, 8, 12}));
  EXPECT_FALSE(impingement_silence_stc(Vec3(0.0, 0.0, 0.0), pf, 4.0, test::apollo()).active());
}

TEST(Stc, ExactFormMatchesImplicationOnGrid) {
  int mismatches = 0;
  for (int a = 0; a <= 400; ++a) {
    for (int b = 0; b <= 400; ++b) {
      const double g = -2.0 + 0.01 * a;
      const double c = -2.0 + 0.01 * b;
      const bool implication = !(g < 0.0) || c <= 0.0;
      mismatches += implication != stc_exact_check(g, c);
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(BuildLrgp, LayoutForApollo150) {
  const ConicProgram p = apollo150().program();
  const LrgpLayout& L = p.layout;
  EXPECT_EQ(L.N, 75);
  EXPECT_EQ(L.M, 16);
  EXPECT_EQ(L.u, 13 * 76);
  EXPECT_EQ(L.l, L.u + 16 * 75);
  EXPECT_EQ(L.t, L.l + 13 * 75);
  EXPECT_EQ(L.eta, L.t + 13 * 75);
  EXPECT_EQ(L.total, 4212);
  EXPECT_EQ(L.core(), 4212 - 975);
  EXPECT_EQ(p.cone.num_vars(), 4212);
  EXPECT_EQ(L.ei(1), L.eta);
  EXPECT_EQ(L.ei(74), L.total - 1);
}

TEST(BuildLrgp, CountsForTheGuess) {
  const ConicProgram p = apollo150().program();
  const ConstraintCounts& c = p.counts;
  EXPECT_EQ(c.dynamics, 13 * 75);
  EXPECT_EQ(c.initial, 13);
  EXPECT_EQ(c.terminal, 13);
  // Every guess width equals dt_min, and ties do not trigger.
  EXPECT_EQ(c.min_pulse, 0);
  // Straight-line guess: node k at 13.5 k / 75 m, silenced when within 4 m of
  // p_f, i.e. k = 53 .. 74 for nodes with an outgoing interval.
  EXPECT_EQ(c.silence, 22 * 4);
  EXPECT_EQ(c.forced_zero, 88);
  EXPECT_EQ(c.box, 1200 - 88);
  // Attitude rows lead by one node: k = 52 .. 74.
  EXPECT_EQ(c.attitude, 23);
  EXPECT_TRUE(p.attitude_nodes[52]);
  EXPECT_FALSE(p.attitude_nodes[51]);
  EXPECT_FALSE(p.attitude_nodes[75]);
  EXPECT_EQ(c.cone, 74);
  EXPECT_EQ(c.trust, 74);
  EXPECT_EQ(c.vc_abs, 975);
  EXPECT_EQ(c.reset_bound, 0);
  EXPECT_EQ(p.cone.A.rows(), 975 + 26 + 88);
  EXPECT_EQ(p.cone.l, 2 * 1112 + 2 * 975 + 23);
  EXPECT_EQ(p.cone.soc_dims.size(), 148u);
}

TEST(BuildLrgp, MinimumPulseTriggerOnShortReference) {
  Built b(test::apollo_problem(150.0));
  b.guess.schedule.widths(3, 2) = 0.05;
  b.guess.schedule.widths(4, 2) = 0.0;
  b.dltv = discretize_trajectory(b.guess.states, b.guess.schedule, b.problem.vehicle);
  const ConicProgram on = b.program();
  EXPECT_EQ(on.counts.min_pulse, 2);
  EXPECT_TRUE(on.forced_zero(3, 2));
  EXPECT_TRUE(on.forced_zero(4, 2));
  const ConicProgram off = b.program({}, LrgpWeights{1e3, 1e7, false});
  EXPECT_EQ(off.counts.min_pulse, 0);
  EXPECT_FALSE(off.forced_zero(3, 2));
}

TEST(BuildLrgp, ResetBoundsAndConflicts) {
  const Built& b = apollo150();
  const ConicProgram p = b.program({{2, 3}, {10, 0}});
  EXPECT_EQ(p.counts.reset_bound, 2);
  // Bound on a silenced forward thruster.
  EXPECT_THROW(b.program({{60, 0}}), LrgpBuildError);
  EXPECT_THROW(b.program({{75, 0}}), LrgpBuildError);
  EXPECT_THROW(b.program({{0, 16}}), LrgpBuildError);
  // A silenced slot that is not forward is fine.
  EXPECT_NO_THROW(b.program({{60, 1}}));
}

TEST(BuildLrgp, RejectsInconsistentReference) {
  const Built& b = apollo150();
  std::vector<ChaserState> short_ref(b.guess.states.begin(), b.guess.states.end() - 1);
  EXPECT_THROW(build_lrgp(short_ref, b.guess.schedule, b.dltv, b.scaling, b.problem, {}),
               LrgpBuildError);
}

TEST(SolveLrgp, GuessSubproblemSatisfiesEveryBlock) {
  const Built& b = apollo150();
  const ConicProgram p = b.program();
  const SubproblemSolution s = solve_lrgp(p, InteriorPointSolver());
  ASSERT_TRUE(is_solved(s.status)) << s.message;
  const RendezvousProblem& pr = b.problem;
  EXPECT_LT((s.states.front().to_vector() - pr.initial.to_vector()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((s.states.back().to_vector() - pr.terminal.to_vector()).cwiseAbs().maxCoeff(), 1e-6);

  for (int k = 0; k < 75; ++k) {
    for (int i = 0; i < 16; ++i) {
      const double w = s.schedule.widths(k, i);
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, 0.5);
      if (p.forced_zero(k, i)) EXPECT_EQ(w, 0.0);
    }
  }
  const double cg = std::cos(pr.gamma);
  for (int k = 1; k < 75; ++k) {
    const Vec3 d = s.states[static_cast<std::size_t>(k)].p - pr.p_d;
    EXPECT_LE(d.norm(), pr.e_d.dot(d) / cg + 1e-6) << k;
    // Trust region: eta_k >= |xhat_k - xbar_k|^2.
    const Vec13 dx = b.scaling.scale_state(s.states[static_cast<std::size_t>(k)].to_vector()) -
                     b.scaling.scale_state(b.guess.states[static_cast<std::size_t>(k)].to_vector());
    EXPECT_GE(s.eta[static_cast<std::size_t>(k - 1)], dx.squaredNorm() - 1e-6) << k;
    if (p.attitude_nodes[static_cast<std::size_t>(k)]) {
      // The row bounds the raw quaternion; states come back renormalized.
      EXPECT_GE(pr.terminal.q.coeffs().dot(s.states[static_cast<std::size_t>(k)].q.coeffs()),
                (std::cos(0.5 * pr.dtheta_max) - 1e-6) / (1.0 + s.quat_norm_deviation));
    }
  }

  // Objective decomposition.
  // |l| <= t holds to the solver's feasibility tolerance only, and w_vc magnifies the gap.
  EXPECT_NEAR(s.objective, s.J_f_scaled + s.J_vc + s.J_tr, 1e-2 * std::abs(s.objective));
  EXPECT_LT(s.quat_norm_deviation, 0.05);
  EXPECT_NEAR(s.J_f_scaled * b.scaling.SJ, s.J_f, 1200 * kPulseZeroTol + 1e-6);
}

TEST(SolveLrgp, NullManeuverHasZeroCost) {
  const Built b(test::null_problem(20.0), true);
  const ConicProgram p = b.program({}, LrgpWeights{1e3, 1e7, false});
  const SubproblemSolution s = solve_lrgp(p, InteriorPointSolver());
  ASSERT_TRUE(is_solved(s.status)) << s.message;
  EXPECT_EQ(s.J_f, 0.0);
  EXPECT_LT(std::abs(s.objective), 1e-6);
  EXPECT_LT(s.J_vc_physical, 1e-6);
  for (const ChaserState& st : s.states) {
    EXPECT_LT((st.to_vector() - b.problem.initial.to_vector()).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(SolveLrgp, UnreachableTargetUsesVirtualControl) {
  MissionSpec spec;
  spec.t_f = 4.0;
  spec.docking.p_f = Vec3(5.0, 0.0, 0.0);
  spec.docking.v_f = Vec3::Zero();
  spec.docking.q_f = spec.initial.q;
  spec.docking.w_f = Vec3::Zero();
  spec.docking.p_d = Vec3(10.0, 0.0, 0.0);
  const Built b(make_problem(spec, test::apollo()));
  const SubproblemSolution s = solve_lrgp(b.program(), InteriorPointSolver());
  ASSERT_TRUE(is_solved(s.status)) << s.message;
  // Full thrust for 4 s gives well under 1 m of travel.
  EXPECT_GT(s.J_vc_physical, 1.0);
  EXPECT_GT(s.J_vc, 0.0);
}
