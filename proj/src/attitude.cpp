#include "scvx/attitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scvx {

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z)
    : UnitQuaternion(Vec4(w, x, y, z)) {}

UnitQuaternion::UnitQuaternion(const Vec4& wxyz) {
  const double n = wxyz.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("UnitQuaternion: coordinates must be finite and nonzero");
  }
  coeffs_ = wxyz / n;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) {
    return UnitQuaternion();
  }
  const Vec3 u = axis / n;
  const double s = std::sin(0.5 * angle);
  return UnitQuaternion(std::cos(0.5 * angle), s * u.x(), s * u.y(), s * u.z());
}

UnitQuaternion UnitQuaternion::conjugate() const {
  return UnitQuaternion(w(), -x(), -y(), -z());
}

UnitQuaternion UnitQuaternion::canonical() const {
  return w() < 0.0 ? UnitQuaternion(-coeffs_) : *this;
}

Mat3 UnitQuaternion::to_rotation_matrix() const {
  const double qw = w(), qx = x(), qy = y(), qz = z();
  Mat3 r;
  r << 1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qw * qz), 2 * (qx * qz + qw * qy),
      2 * (qx * qy + qw * qz), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qw * qx),
      2 * (qx * qz - qw * qy), 2 * (qy * qz + qw * qx), 1 - 2 * (qx * qx + qy * qy);
  return r;
}

Vec4 hamilton(const Vec4& a, const Vec4& b) {
  const Vec3 av = a.tail<3>();
  const Vec3 bv = b.tail<3>();
  Vec4 out;
  out[0] = a[0] * b[0] - av.dot(bv);
  out.tail<3>() = a[0] * bv + b[0] * av + av.cross(bv);
  return out;
}

Vec4 conjugate(const Vec4& q) { return Vec4(q[0], -q[1], -q[2], -q[3]); }

Mat4 left_product_matrix(const Vec4& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat4 m;
  m << w, -x, -y, -z,
       x, w, -z, y,
       y, z, w, -x,
       z, -y, x, w;
  return m;
}

Mat4 right_product_matrix(const Vec4& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat4 m;
  m << w, -x, -y, -z,
       x, w, z, -y,
       y, -z, w, x,
       z, y, -x, w;
  return m;
}

UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion(hamilton(a.coeffs(), b.coeffs()));
}

Vec3 rotate(const UnitQuaternion& q, const Vec3& u) {
  // Same result as q (x) (0,u) (x) q*, with fewer flops.
  const Vec3 qv = q.vec();
  const Vec3 t = 2.0 * qv.cross(u);
  return u + q.w() * t + qv.cross(t);
}

UnitQuaternion error_quat(const UnitQuaternion& q, const UnitQuaternion& q_f) {
  return quat_mul(q.conjugate(), q_f);
}

AxisAngle to_axis_angle(const UnitQuaternion& q) {
  AxisAngle out;
  const Vec3 v = q.vec();
  const double vn = v.norm();
  out.angle = 2.0 * std::atan2(vn, q.w());
  if (vn < 1e-15) {
    out.axis = Vec3::UnitX();
    out.degenerate = q.w() < 0.0;
  } else {
    out.axis = v / vn;
  }
  return out;
}

SlerpResult slerp(const UnitQuaternion& q0, const UnitQuaternion& qf, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("slerp: fraction must lie in [0, 1]");
  }
  const AxisAngle aa = to_axis_angle(error_quat(q0, qf));
  SlerpResult out;
  out.axis = aa.axis;
  out.angle = aa.angle;
  out.degenerate = aa.degenerate;
  if (fraction == 1.0) {
    out.q = qf;
    return out;
  }
  out.q = quat_mul(q0, UnitQuaternion::from_axis_angle(aa.axis, fraction * aa.angle));
  return out;
}

TaitBryan to_tait_bryan(const UnitQuaternion& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  TaitBryan out;
  const double sp = std::clamp(2.0 * (w * y - z * x), -1.0, 1.0);
  out.pitch = std::asin(sp);
  if (std::abs(std::abs(out.pitch) - 0.5 * std::numbers::pi) < kGimbalLockThreshold) {
    out.gimbal_lock = true;
    out.yaw = 0.0;
    out.roll = std::remainder(2.0 * std::atan2(x, w), 2.0 * std::numbers::pi);
    return out;
  }
  out.roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  out.yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  return out;
}

UnitQuaternion from_tait_bryan(double roll, double pitch, double yaw) {
  const UnitQuaternion qz = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), yaw);
  const UnitQuaternion qy = UnitQuaternion::from_axis_angle(Vec3::UnitY(), pitch);
  const UnitQuaternion qx = UnitQuaternion::from_axis_angle(Vec3::UnitX(), roll);
  return quat_mul(quat_mul(qz, qy), qx);
}

}  // namespace scvx
