#include "scvx/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace scvx {

Vec13 ChaserState::to_vector() const {
  Vec13 x;
  x.segment<3>(sidx::p) = p;
  x.segment<3>(sidx::v) = v;
  x.segment<4>(sidx::q) = q.coeffs();
  x.segment<3>(sidx::w) = w;
  return x;
}

ChaserState ChaserState::from_vector(const Vec13& x) {
  ChaserState s;
  s.p = x.segment<3>(sidx::p);
  s.v = x.segment<3>(sidx::v);
  s.q = UnitQuaternion(Vec4(x.segment<4>(sidx::q)));
  s.w = x.segment<3>(sidx::w);
  return s;
}

ImpulseSchedule ImpulseSchedule::constant(int n, int m, double t_c, double width) {
  ImpulseSchedule s;
  s.widths = Eigen::MatrixXd::Constant(n, m, width);
  s.t_c = t_c;
  return s;
}

bool ImpulseSchedule::mib_feasible(double dt_min, double dt_max, double tol) const {
  for (Eigen::Index k = 0; k < widths.rows(); ++k) {
    for (Eigen::Index i = 0; i < widths.cols(); ++i) {
      const double w = widths(k, i);
      if (w == 0.0) {
        continue;
      }
      if (w < dt_min - tol || w > dt_max + tol) {
        return false;
      }
    }
  }
  return true;
}

Vec13 state_derivative(const Vec13& x, const Vec3& force_body, const Vec3& torque_body,
                       const VehicleModel& model) {
  const Vec3 v = x.segment<3>(sidx::v);
  const double qw = x[sidx::q];
  const Vec3 qv = x.segment<3>(sidx::q + 1);
  const Vec3 w = x.segment<3>(sidx::w);

  Vec13 dx;
  dx.segment<3>(sidx::p) = v;
  // q (x) (0,f) (x) q* expanded on raw coordinates.
  const Vec3 f_inertial =
      (qw * qw - qv.squaredNorm()) * force_body + 2.0 * qv.dot(force_body) * qv +
      2.0 * qw * qv.cross(force_body);
  dx.segment<3>(sidx::v) = f_inertial / model.mass();
  dx[sidx::q] = -0.5 * qv.dot(w);
  dx.segment<3>(sidx::q + 1) = 0.5 * (qw * w + qv.cross(w));
  const Mat3& J = model.inertia();
  dx.segment<3>(sidx::w) = model.inertia_inverse() * (torque_body - w.cross(J * w));
  return dx;
}

Vec13 derivative(const ChaserState& state, const std::vector<bool>& active,
                 const VehicleModel& model) {
  const ForceTorque ft = net_force_torque(model, active);
  return state_derivative(state.to_vector(), ft.force, ft.torque, model);
}

std::vector<double> falling_edges(const Eigen::VectorXd& pulse_row, double t_c) {
  std::vector<double> edges;
  for (Eigen::Index i = 0; i < pulse_row.size(); ++i) {
    const double w = pulse_row[i];
    if (w > kEdgeTolerance && w < t_c - kEdgeTolerance) {
      edges.push_back(w);
    }
  }
  std::sort(edges.begin(), edges.end());
  std::vector<double> merged;
  for (double e : edges) {
    if (merged.empty() || e - merged.back() > kEdgeTolerance) {
      merged.push_back(e);
    }
  }
  return merged;
}

std::vector<ThrustSegment> thrust_segments(const Eigen::VectorXd& pulse_row,
                                           const VehicleModel& model) {
  const auto m = static_cast<Eigen::Index>(model.thruster_count());
  if (pulse_row.size() != m) {
    throw std::invalid_argument("pulse row length must equal the thruster count");
  }
  const double t_c = model.t_c();
  std::vector<double> bounds = {0.0};
  for (double e : falling_edges(pulse_row, t_c)) {
    bounds.push_back(e);
  }
  bounds.push_back(t_c);

  std::vector<ThrustSegment> out;
  const auto& ts = model.thrusters();
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    ThrustSegment seg;
    seg.t0 = bounds[s];
    seg.t1 = bounds[s + 1];
    seg.active.assign(ts.size(), false);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (pulse_row[static_cast<Eigen::Index>(i)] >= seg.t1 - kEdgeTolerance) {
        seg.active[i] = true;
        seg.force += ts[i].force();
        seg.torque += ts[i].torque();
      }
    }
    out.push_back(std::move(seg));
  }
  return out;
}

namespace {

void renormalize_quaternion(Vec13& x) {
  x.segment<4>(sidx::q).normalize();
}

}  // namespace

IntervalTrajectory propagate_interval_dense(const ChaserState& start,
                                            const Eigen::VectorXd& pulse_row,
                                            const VehicleModel& model, const Tolerance& tol,
                                            int dense_samples) {
  const double t_c = model.t_c();
  for (Eigen::Index i = 0; i < pulse_row.size(); ++i) {
    if (!(pulse_row[i] >= 0.0 && pulse_row[i] <= t_c)) {
      throw std::invalid_argument("pulse widths must lie in [0, t_c]");
    }
  }
  IntervalTrajectory out;
  Vec13 x = start.to_vector();
  int next_sample = 0;
  auto sample_time = [&](int j) { return t_c * j / dense_samples; };
  if (dense_samples > 0) {
    out.t.push_back(0.0);
    out.samples.push_back(start);
    next_sample = 1;
  }

  double h = 0.0;
  const auto segs = thrust_segments(pulse_row, model);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const ThrustSegment& seg = segs[s];
    auto rhs = [&](double, const Vec13& y, Vec13& dy) {
      dy = state_derivative(y, seg.force, seg.torque, model);
    };
    auto observer = [&](double t0, const Vec13& y0, const Vec13& f0, double t1, const Vec13& y1,
                        const Vec13& f1) {
      while (next_sample < dense_samples && sample_time(next_sample) <= t1) {
        const double ts = sample_time(next_sample);
        out.t.push_back(ts);
        out.samples.push_back(ChaserState::from_vector(hermite(t0, y0, f0, t1, y1, f1, ts)));
        ++next_sample;
      }
    };
    const StepStats st = dopri5(rhs, seg.t0, seg.t1, x, tol, h, static_cast<int>(s), observer);
    out.stats.accepted += st.accepted;
    out.stats.rejected += st.rejected;
    renormalize_quaternion(x);
  }
  out.end = ChaserState::from_vector(x);
  return out;
}

ChaserState propagate_interval(const ChaserState& start, const Eigen::VectorXd& pulse_row,
                               const VehicleModel& model, const Tolerance& tol) {
  return propagate_interval_dense(start, pulse_row, model, tol, 0).end;
}

ResetPropagation propagate_with_reset(const std::vector<ChaserState>& reference,
                                      const ImpulseSchedule& schedule,
                                      const VehicleModel& model, const Tolerance& tol,
                                      int dense_samples, Execution exec) {
  const int n = schedule.N();
  if (static_cast<int>(reference.size()) != n + 1) {
    throw std::invalid_argument("propagate_with_reset: need N+1 reference states");
  }
  ResetPropagation out;
  out.endpoints.resize(static_cast<std::size_t>(n));
  out.intervals.resize(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));

  auto one = [&](int k) {
    try {
      const Eigen::VectorXd row = schedule.widths.row(k).transpose();
      auto& slot = out.intervals[static_cast<std::size_t>(k)];
      slot = propagate_interval_dense(reference[static_cast<std::size_t>(k)], row, model, tol,
                                      dense_samples);
      out.endpoints[static_cast<std::size_t>(k)] = slot.end;
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  };

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) {
      one(k);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      one(k);
    }
  }
  for (int k = 0; k < n; ++k) {
    if (errors[static_cast<std::size_t>(k)]) {
      try {
        std::rethrow_exception(errors[static_cast<std::size_t>(k)]);
      } catch (const IntegrationError& e) {
        throw IntegrationError(std::string("interval ") + std::to_string(k) + ": " + e.what(),
                               e.segment(), e.t_reached());
      }
    }
  }
  return out;
}

ChaserState propagate_chain(const ChaserState& start, const ImpulseSchedule& schedule,
                            const VehicleModel& model, int k1, int k2, const Tolerance& tol) {
  if (!(k2 > k1) || k1 < 0 || k2 > schedule.N()) {
    throw std::invalid_argument("propagate_chain: need 0 <= k1 < k2 <= N");
  }
  ChaserState x = start;
  for (int k = k1; k < k2; ++k) {
    x = propagate_interval(x, schedule.widths.row(k).transpose(), model, tol);
  }
  return x;
}

double attitude_error_angle(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double c = std::abs(hamilton(conjugate(a.coeffs()), b.coeffs())[0]);
  return 2.0 * std::acos(std::min(1.0, c));
}

PropagationError propagation_error(const std::vector<ChaserState>& optimizer_states,
                                   const ImpulseSchedule& schedule, const VehicleModel& model,
                                   int k1, int k2, const Tolerance& tol) {
  if (static_cast<int>(optimizer_states.size()) < k2 + 1) {
    throw std::invalid_argument("propagation_error: span exceeds the state list");
  }
  const ChaserState prop =
      propagate_chain(optimizer_states[static_cast<std::size_t>(k1)], schedule, model, k1, k2, tol);
  const ChaserState& opt = optimizer_states[static_cast<std::size_t>(k2)];
  PropagationError e;
  e.p = (opt.p - prop.p).lpNorm<Eigen::Infinity>();
  e.v = (opt.v - prop.v).lpNorm<Eigen::Infinity>();
  e.w_deg = rad2deg((opt.w - prop.w).lpNorm<Eigen::Infinity>());
  e.theta_deg = rad2deg(attitude_error_angle(opt.q, prop.q));
  return e;
}

}  // namespace scvx
