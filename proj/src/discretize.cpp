#include "scvx/discretize.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <exception>

namespace scvx {

namespace {

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Vec3 rotate_raw(const Vec4& q, const Vec3& f) {
  const double qw = q[0];
  const Vec3 qv = q.tail<3>();
  return (qw * qw - qv.squaredNorm()) * f + 2.0 * qv.dot(f) * qv + 2.0 * qw * qv.cross(f);
}

}  // namespace

Mat13 ContinuousJacobians::full() const {
  Mat13 a = Mat13::Zero();
  a.block<3, 3>(sidx::p, sidx::v) = Mat3::Identity();
  a.block<3, 4>(sidx::v, sidx::q) = A_vq;
  a.block<4, 4>(sidx::q, sidx::q) = A_qq;
  a.block<4, 3>(sidx::q, sidx::w) = A_qw;
  a.block<3, 3>(sidx::w, sidx::w) = A_ww;
  return a;
}

Vec13 ContinuousJacobians::residual() const {
  Vec13 r = Vec13::Zero();
  r.segment<3>(sidx::v) = r_v;
  r.segment<4>(sidx::q) = r_q;
  r.segment<3>(sidx::w) = r_w;
  return r;
}

ContinuousJacobians jacobians_at(const Vec13& x, const Vec3& force_body,
                                 const VehicleModel& model) {
  const Vec4 q = x.segment<4>(sidx::q);
  const Vec3 w = x.segment<3>(sidx::w);
  const Mat3& J = model.inertia();
  const double m = model.mass();

  ContinuousJacobians jac;
  jac.A_ww = -model.inertia_inverse() * (skew(w) * J - skew(J * w));

  Vec4 w_quat;
  w_quat << 0.0, w;
  jac.A_qq = 0.5 * right_product_matrix(w_quat);
  jac.A_qw = 0.5 * left_product_matrix(q).rightCols<3>();

  // d/dq of q (x) F (x) q*, keeping the vector part.
  Vec4 f_quat;
  f_quat << 0.0, force_body;
  const Mat4 conj = Vec4(1.0, -1.0, -1.0, -1.0).asDiagonal();
  const Mat4 d = right_product_matrix(hamilton(f_quat, conjugate(q))) +
                 left_product_matrix(hamilton(q, f_quat)) * conj;
  jac.A_vq = d.bottomRows<3>() / m;

  // Residuals from the nonlinear derivative at this point. Torque does not
  // enter the Jacobians, so it is irrelevant for r_w beyond f(xbar).
  const Vec13 f = state_derivative(x, force_body, Vec3::Zero(), model);
  jac.r_v = f.segment<3>(sidx::v) - jac.A_vq * q;
  jac.r_q = f.segment<4>(sidx::q) - jac.A_qq * q - jac.A_qw * w;
  jac.r_w = f.segment<3>(sidx::w) - jac.A_ww * w;
  return jac;
}

ContinuousJacobians jacobians_at(const ChaserState& reference, const std::vector<Vec3>& forces,
                                 const VehicleModel& model) {
  if (forces.size() != model.thruster_count()) {
    throw std::invalid_argument("jacobians_at: one force per thruster required");
  }
  Vec3 f = Vec3::Zero();
  Vec3 t = Vec3::Zero();
  const auto& ts = model.thrusters();
  for (std::size_t i = 0; i < forces.size(); ++i) {
    f += forces[i];
    t += ts[i].position.cross(forces[i]);
  }
  const Vec13 x = reference.to_vector();
  ContinuousJacobians jac = jacobians_at(x, f, model);
  // Torque is affine in the inputs and enters only through the residual.
  jac.r_w += model.inertia_inverse() * t;
  return jac;
}

Vec13 thrust_column(const Vec13& x, const Thruster& thruster, const VehicleModel& model) {
  Vec13 b = Vec13::Zero();
  const Vec3 f = thruster.force();
  b.segment<3>(sidx::v) = rotate_raw(x.segment<4>(sidx::q), f) / model.mass();
  b.segment<3>(sidx::w) = model.inertia_inverse() * thruster.position.cross(f);
  return b;
}

// ---------------------------------------------------------------------------
// STM path

StmPath::StmPath(SystemMatrix a, double t0, double t1, const Tolerance& tol)
    : a_(std::move(a)), t0_(t0), t1_(t1), tol_(tol) {
  const Eigen::MatrixXd a0 = a_(t0_);
  const Eigen::Index n = a0.rows();
  Eigen::VectorXd y = Eigen::MatrixXd::Identity(n, n).reshaped();
  cp_t_.push_back(t0_);
  cp_phi_.push_back(y);
  auto rhs = [&](double t, const Eigen::VectorXd& yy, Eigen::VectorXd& dy) {
    const Eigen::MatrixXd phi = yy.reshaped(n, n);
    dy = (a_(t) * phi).reshaped();
  };
  auto observer = [&](double, const Eigen::VectorXd&, const Eigen::VectorXd&, double t,
                      const Eigen::VectorXd& y1, const Eigen::VectorXd&) {
    cp_t_.push_back(t);
    cp_phi_.push_back(y1);
  };
  double h = 0.0;
  if (t1_ > t0_) {
    dopri5(rhs, t0_, t1_, y, tol_, h, 0, observer);
  }
  phi_end_ = y.reshaped(n, n);
}

Eigen::MatrixXd StmPath::from_start(double t) const {
  if (t < t0_ || t > t1_) {
    throw std::invalid_argument("StmPath: time outside the integrated interval");
  }
  const auto it = std::upper_bound(cp_t_.begin(), cp_t_.end(), t);
  const std::size_t idx = static_cast<std::size_t>(std::distance(cp_t_.begin(), it)) - 1;
  const Eigen::Index n = phi_end_.rows();
  Eigen::VectorXd y = cp_phi_[idx];
  if (t > cp_t_[idx]) {
    auto rhs = [&](double tt, const Eigen::VectorXd& yy, Eigen::VectorXd& dy) {
      const Eigen::MatrixXd phi = yy.reshaped(n, n);
      dy = (a_(tt) * phi).reshaped();
    };
    double h = 0.0;
    dopri5(rhs, cp_t_[idx], t, y, tol_, h);
  }
  return y.reshaped(n, n);
}

Eigen::MatrixXd StmPath::to_end(double tau) const {
  if (tau == t1_) {
    return Eigen::MatrixXd::Identity(phi_end_.rows(), phi_end_.cols());
  }
  return phi_end_ * from_start(tau).inverse();
}

StmPath stm_over_interval(StmPath::SystemMatrix a, double t0, double t1, const Tolerance& tol) {
  return StmPath(std::move(a), t0, t1, tol);
}

// ---------------------------------------------------------------------------
// Interval discretization

DiscreteInterval discretize_interval(const ChaserState& reference,
                                     const Eigen::VectorXd& pulse_row,
                                     const VehicleModel& model, const Tolerance& tol) {
  const double t_c = model.t_c();
  const auto m = static_cast<Eigen::Index>(model.thruster_count());
  const auto& ts = model.thrusters();
  if (pulse_row.size() != m) {
    throw std::invalid_argument("pulse row length must equal the thruster count");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(pulse_row[i] >= 0.0 && pulse_row[i] <= t_c)) {
      throw std::invalid_argument("pulse widths must lie in [0, t_c]");
    }
  }
  const auto segs = thrust_segments(pulse_row, model);
  constexpr int n = kStateDim;
  const Eigen::Index cols = n + m;

  // Layout: [xbar (13) | Phi (13x13) | Z (13xM)], matrices column-major.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n + n * cols);
  y.head<n>() = reference.to_vector();
  y.segment(n, n * n) = Mat13::Identity().reshaped();

  DiscreteInterval out;
  out.one_sided.assign(static_cast<std::size_t>(m), false);

  auto start_time = [&](Eigen::Index i) {
    const double w = pulse_row[i];
    if (w <= kEdgeTolerance) {
      return 0.0;
    }
    return w >= t_c - kEdgeTolerance ? t_c : w;
  };
  auto seed_columns = [&](double t_now) {
    const Vec13 x = y.head<n>();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(start_time(i) - t_now) <= kEdgeTolerance) {
        y.segment(n + n * (n + i), n) = thrust_column(x, ts[static_cast<std::size_t>(i)], model);
      }
    }
  };

  seed_columns(0.0);
  double h = 0.0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const ThrustSegment& seg = segs[s];
    if (s > 0) {
      seed_columns(seg.t0);
    }
    auto rhs = [&](double, const Eigen::VectorXd& yy, Eigen::VectorXd& dy) {
      dy.resize(yy.size());
      const Vec13 x = yy.head<n>();
      dy.head<n>() = state_derivative(x, seg.force, seg.torque, model);
      const Mat13 a = jacobians_at(x, seg.force, model).full();
      dy.tail(n * cols) = (a * yy.tail(n * cols).reshaped(n, cols)).reshaped();
    };
    dopri5(rhs, seg.t0, seg.t1, y, tol, h, static_cast<int>(s));
    y.segment<4>(sidx::q).normalize();
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (pulse_row[i] > kEdgeTolerance && start_time(i) == t_c) {
      out.one_sided[static_cast<std::size_t>(i)] = true;
    }
  }
  seed_columns(t_c);

  const Vec13 x0 = reference.to_vector();
  out.x_end = y.head<n>();
  out.A = y.segment(n, n * n).reshaped(n, n);
  out.B = y.tail(n * m).reshaped(n, m);
  out.r = out.x_end - out.A * x0 - out.B * pulse_row;
  return out;
}

DiscreteLTV discretize_trajectory(const std::vector<ChaserState>& reference,
                                  const ImpulseSchedule& schedule, const VehicleModel& model,
                                  const Tolerance& tol, Execution exec) {
  const int n = schedule.N();
  if (static_cast<int>(reference.size()) != n + 1) {
    throw std::invalid_argument("discretize_trajectory: need N+1 reference states");
  }
  DiscreteLTV out;
  out.intervals.resize(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));

  auto one = [&](int k) {
    try {
      out.intervals[static_cast<std::size_t>(k)] =
          discretize_interval(reference[static_cast<std::size_t>(k)],
                              schedule.widths.row(k).transpose(), model, tol);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
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

  std::vector<int> failed;
  std::string msg = "discretization failed";
  for (int k = 0; k < n; ++k) {
    if (!errors[static_cast<std::size_t>(k)].empty()) {
      failed.push_back(k);
      msg += "; interval " + std::to_string(k) + ": " + errors[static_cast<std::size_t>(k)];
    }
  }
  if (!failed.empty()) {
    throw DiscretizationError(msg, failed);
  }
  return out;
}

}  // namespace scvx
