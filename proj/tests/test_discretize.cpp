#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "test_support.hpp"

using namespace scvx;
using scvx::test::apollo;
using scvx::test::random_pulses;
using scvx::test::random_state;
using scvx::test::random_vec;

namespace {

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Central differences of the stacked derivative with respect to block
// `col0..col0+cols` of the raw state.
Eigen::MatrixXd fd_block(const Vec13& x, const Vec3& force, int row0, int rows, int col0, int cols) {
  const double h = 1e-6;
  Eigen::MatrixXd out(rows, cols);
  for (int c = 0; c < cols; ++c) {
    Vec13 xp = x, xm = x;
    xp[col0 + c] += h;
    xm[col0 + c] -= h;
    const Vec13 d = state_derivative(xp, force, Vec3::Zero(), apollo()) -
                    state_derivative(xm, force, Vec3::Zero(), apollo());
    out.col(c) = d.segment(row0, rows) / (2.0 * h);
  }
  return out;
}

}  // namespace

TEST(Jacobians, ZeroRateGivesZeroGyroscopicBlock) {
  std::mt19937_64 rng(1);
  ChaserState s = random_state(rng);
  s.w.setZero();
  const ContinuousJacobians j = jacobians_at(s, std::vector<Vec3>(16, Vec3::Zero()), apollo());
  EXPECT_EQ(j.A_ww, Mat3::Zero());
}

TEST(Jacobians, MatchCentralDifferences) {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 25; ++n) {
    const Vec13 x = random_state(rng, 0.2).to_vector();
    const Vec3 f = random_vec(rng, 2000.0);
    const ContinuousJacobians j = jacobians_at(x, f, apollo());
    EXPECT_LT(rel_err(j.A_ww, fd_block(x, f, sidx::w, 3, sidx::w, 3)), 1e-6);
    EXPECT_LT(rel_err(j.A_qq, fd_block(x, f, sidx::q, 4, sidx::q, 4)), 1e-6);
    EXPECT_LT(rel_err(j.A_qw, fd_block(x, f, sidx::q, 4, sidx::w, 3)), 1e-6);
    EXPECT_LT(rel_err(j.A_vq, fd_block(x, f, sidx::v, 3, sidx::q, 4)), 1e-6);
  }
}

TEST(Jacobians, AffineModelExactAtReference) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    const ChaserState s = random_state(rng, 0.2);
    std::vector<Vec3> forces;
    std::vector<bool> active;
    for (const Thruster& t : apollo().thrusters()) {
      const bool on = (rng() % 3) == 0;
      active.push_back(on);
      forces.push_back(on ? t.force() : Vec3::Zero());
    }
    const ContinuousJacobians j = jacobians_at(s, forces, apollo());
    const Vec13 lin = j.full() * s.to_vector() + j.residual();
    EXPECT_LT((lin - derivative(s, active, apollo())).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Stm, ZeroSystemIsIdentity) {
  const StmPath p = stm_over_interval([](double) { return Eigen::MatrixXd::Zero(5, 5); }, 0.0, 2.0);
  EXPECT_EQ(p.at_end(), Eigen::MatrixXd::Identity(5, 5));
  EXPECT_EQ(p.from_start(0.0), Eigen::MatrixXd::Identity(5, 5));
}

TEST(Stm, ConstantSystemMatchesMatrixExponential) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (int n = 0; n < 5; ++n) {
    Eigen::MatrixXd a(6, 6);
    for (int i = 0; i < 36; ++i) a(i) = nd(rng);
    const StmPath p = stm_over_interval([a](double) { return a; }, 0.0, 2.0);
    const Eigen::MatrixXd e = (2.0 * a).exp();
    EXPECT_LT((p.at_end() - e).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, e.cwiseAbs().maxCoeff()));
  }
}

TEST(Stm, SemigroupComposition) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 0.3);
  Eigen::MatrixXd a0(4, 4), a1(4, 4);
  for (int i = 0; i < 16; ++i) {
    a0(i) = nd(rng);
    a1(i) = nd(rng);
  }
  auto a = [&](double t) -> Eigen::MatrixXd { return a0 + std::sin(t) * a1; };
  std::uniform_real_distribution<double> u(0.1, 1.9);
  const StmPath full = stm_over_interval(a, 0.0, 2.0);
  for (int n = 0; n < 10; ++n) {
    const double t1 = u(rng);
    const StmPath first = stm_over_interval(a, 0.0, t1);
    const StmPath second = stm_over_interval(a, t1, 2.0);
    EXPECT_LT((second.at_end() * first.at_end() - full.at_end()).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT((full.from_start(t1) - first.at_end()).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT((full.to_end(t1) - second.at_end()).cwiseAbs().maxCoeff(), 1e-7);
  }
  EXPECT_THROW(full.from_start(2.5), std::invalid_argument);
}

TEST(DiscretizeInterval, ExactAtReference) {
  std::mt19937_64 rng(6);
  for (int n = 0; n < 10; ++n) {
    const ChaserState s = random_state(rng, 0.02);
    const Eigen::VectorXd row = random_pulses(rng, 16);
    const DiscreteInterval d = discretize_interval(s, row, apollo());
    const Vec13 end = propagate_interval(s, row, apollo()).to_vector();
    const Vec13 lin = d.A * s.to_vector() + d.B * row + d.r;
    EXPECT_LT((lin - end).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((d.x_end - end).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(DiscretizeInterval, CoastDoubleIntegrator) {
  std::mt19937_64 rng(7);
  ChaserState s = random_state(rng);
  s.w.setZero();
  const DiscreteInterval d = discretize_interval(s, Eigen::VectorXd::Zero(16), apollo());
  EXPECT_LT((d.A.block<3, 3>(sidx::p, sidx::v) - 2.0 * Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((d.A.block<3, 4>(sidx::v, sidx::q)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DiscretizeInterval, VelocityColumnFollowsLeibnizRule) {
  // The last pulse to end sees no thrust afterwards, so d v_end / d width is
  // the inertial thrust at its falling edge divided by mass.
  std::mt19937_64 rng(8);
  for (int n = 0; n < 10; ++n) {
    const ChaserState s = random_state(rng, 0.02);
    Eigen::VectorXd row = random_pulses(rng, 16, 0.3);
    const int i = static_cast<int>(rng() % 16);
    row[i] = 0.45;
    const DiscreteInterval d = discretize_interval(s, row, apollo());
    VehicleModel::Params p = apollo().params();
    p.t_c = 0.45;
    p.dt_max = 0.45;
    p.dt_min = 0.01;
    const ChaserState at_edge = propagate_interval(s, row.cwiseMin(0.45), VehicleModel(p));
    const Vec3 oracle = rotate(at_edge.q, apollo().thrusters()[static_cast<std::size_t>(i)].force()) /
                        apollo().mass();
    const Vec3 col = d.B.block<3, 1>(sidx::v, i);
    EXPECT_LT((col - oracle).norm(), 1e-6 * oracle.norm());
  }
}

TEST(DiscretizeInterval, FirstOrderInPulsePerturbation) {
  std::mt19937_64 rng(9);
  const ChaserState s = random_state(rng, 0.02);
  Eigen::VectorXd row = random_pulses(rng, 16, 0.4, 0.0);
  const DiscreteInterval d = discretize_interval(s, row, apollo(), {1e-12, 1e-14});
  const Vec13 base = propagate_interval(s, row, apollo(), {1e-12, 1e-14}).to_vector();
  for (int i : {0, 5, 11}) {
    double prev = 0.0;
    for (double delta : {2e-3, 1e-3, 5e-4}) {
      Eigen::VectorXd r = row;
      r[i] += delta;
      const Vec13 moved = propagate_interval(s, r, apollo(), {1e-12, 1e-14}).to_vector();
      const double res = (moved - base - d.B.col(i) * delta).norm();
      if (prev > 0.0) EXPECT_NEAR(res / prev, 0.25, 0.05) << "thruster " << i;
      prev = res;
    }
  }
}

TEST(DiscretizeInterval, ZeroReferencePulseKeepsThrusterControllable) {
  std::mt19937_64 rng(10);
  const ChaserState s = random_state(rng, 0.02);
  const DiscreteInterval d = discretize_interval(s, Eigen::VectorXd::Zero(16), apollo());
  for (int i = 0; i < 16; ++i) {
    const Vec3 oracle = rotate(s.q, apollo().thrusters()[static_cast<std::size_t>(i)].force()) /
                        apollo().mass();
    EXPECT_LT((d.B.block<3, 1>(sidx::v, i) - oracle).norm(), 1e-9);
    EXPECT_FALSE(d.one_sided[static_cast<std::size_t>(i)]);
  }
}

TEST(DiscretizeInterval, FullWidthPulseIsOneSided) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(16);
  row[4] = 2.0;
  const DiscreteInterval d = discretize_interval(ChaserState{}, row, apollo());
  EXPECT_TRUE(d.one_sided[4]);
  EXPECT_FALSE(d.one_sided[3]);
  EXPECT_TRUE(d.B.allFinite());
}

TEST(DiscretizeTrajectory, LengthsSerialParallelAndSingleInterval) {
  std::mt19937_64 rng(11);
  const RendezvousProblem pr = test::apollo_problem(150.0);
  EXPECT_EQ(pr.N(), 75);
  const int N = 8;
  ImpulseSchedule sch = ImpulseSchedule::constant(N, 16, 2.0, 0.0);
  std::vector<ChaserState> ref;
  for (int k = 0; k < N; ++k) sch.widths.row(k) = random_pulses(rng, 16).transpose();
  for (int k = 0; k <= N; ++k) ref.push_back(random_state(rng, 0.02));
  const DiscreteLTV a = discretize_trajectory(ref, sch, apollo());
  const DiscreteLTV b = discretize_trajectory(ref, sch, apollo(), {}, Execution::parallel);
  ASSERT_EQ(a.N(), N);
  for (int k = 0; k < N; ++k) {
    EXPECT_EQ(a.intervals[static_cast<std::size_t>(k)].A, b.intervals[static_cast<std::size_t>(k)].A);
    EXPECT_EQ(a.intervals[static_cast<std::size_t>(k)].B, b.intervals[static_cast<std::size_t>(k)].B);
    EXPECT_EQ(a.intervals[static_cast<std::size_t>(k)].r, b.intervals[static_cast<std::size_t>(k)].r);
  }
  ImpulseSchedule one = sch;
  one.widths = sch.widths.topRows(1);
  const DiscreteLTV c = discretize_trajectory({ref[0], ref[1]}, one, apollo());
  EXPECT_EQ(c.intervals[0].A,
            discretize_interval(ref[0], sch.widths.row(0).transpose(), apollo()).A);
}

TEST(DiscretizeTrajectory, FailuresCarryIntervalIndices) {
  std::mt19937_64 rng(12);
  ImpulseSchedule sch = ImpulseSchedule::constant(3, 16, 2.0, 0.1);
  sch.widths(1, 2) = -1.0;
  std::vector<ChaserState> ref(4);
  try {
    discretize_trajectory(ref, sch, apollo());
    FAIL() << "expected DiscretizationError";
  } catch (const DiscretizationError& e) {
    EXPECT_EQ(e.intervals(), std::vector<int>{1});
  }
}
