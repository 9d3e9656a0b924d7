#include "scvx/problem.hpp"

#include <cmath>
#include <numbers>

namespace scvx {

int RendezvousProblem::N() const {
  return static_cast<int>(std::lround(t_f / t_c()));
}

void RendezvousProblem::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidProblem("problem invariant violated: " + what);
  };
  require(std::isfinite(t_f) && t_f > 0.0, "t_f > 0");
  const double ratio = t_f / t_c();
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio) && N() >= 1,
          "t_f is a positive integer multiple of t_c");
  require(std::abs(e_d.norm() - 1.0) <= 1e-9, "|e_d| = 1");
  require(r_a > 0.0, "r_a > 0");
  require(dtheta_max > 0.0 && dtheta_max < std::numbers::pi, "0 < dtheta_max < pi");
  require(gamma > 0.0 && gamma < 0.5 * std::numbers::pi, "gamma in (0, pi/2)");
  for (const ChaserState* s : {&initial, &terminal, &target}) {
    require(s->p.allFinite() && s->v.allFinite() && s->w.allFinite(), "finite boundary states");
    require(std::abs(s->q.coeffs().norm() - 1.0) <= 1e-9, "normalized boundary quaternions");
  }
}

MissionSpec::MissionSpec() {
  initial.q = UnitQuaternion(0.0, 0.0, 1.0, 0.0);
  lm.p = Vec3(20.0, 0.0, 0.0);
  lm.q = UnitQuaternion(0.0, 0.0, 1.0, 0.0);
}

RendezvousProblem make_problem(const MissionSpec& spec, const VehicleModel& vehicle) {
  RendezvousProblem pr{spec.t_f, spec.initial, {}, spec.lm, Vec3::Zero(), Vec3::UnitX(),
                       spec.r_a, deg2rad(spec.dtheta_max_deg), deg2rad(spec.gamma_deg), vehicle};
  const DockingGeometry& g = spec.docking;
  const ChaserState& lm = spec.lm;

  pr.e_d = g.e_d ? g.e_d->normalized() : rotate(lm.q, Vec3::UnitX());
  pr.p_d = g.p_d ? *g.p_d : Vec3(lm.p + g.port_offset * pr.e_d);
  pr.terminal.p = g.p_f ? *g.p_f : Vec3(pr.p_d + g.nose_length * pr.e_d);
  pr.terminal.v = g.v_f ? *g.v_f : Vec3(lm.v - g.closure_speed * pr.e_d);
  if (g.q_f) {
    pr.terminal.q = *g.q_f;
  } else {
    const auto yaw = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), deg2rad(g.docking_yaw_deg));
    const auto roll = UnitQuaternion::from_axis_angle(Vec3::UnitX(), deg2rad(g.docking_roll_deg));
    pr.terminal.q = quat_mul(quat_mul(lm.q, yaw), roll);
  }
  pr.terminal.w = g.w_f ? *g.w_f : lm.w;
  pr.validate();
  return pr;
}

}  // namespace scvx
