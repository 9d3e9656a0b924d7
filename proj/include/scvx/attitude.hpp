#pragma once

// Hamilton-convention quaternion algebra used throughout the pipeline.
//
// Coordinates are stored scalar-first, (w, x, y, z). A unit quaternion q
// encodes the frame change body -> inertial: rotate(q, u) = q (x) (0,u) (x) q*.

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace scvx {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

class UnitQuaternion {
 public:
  /// Identity rotation.
  UnitQuaternion() : coeffs_(1.0, 0.0, 0.0, 0.0) {}
  /// Normalizes the given scalar-first coordinates. Throws on a zero vector.
  UnitQuaternion(double w, double x, double y, double z);
  explicit UnitQuaternion(const Vec4& wxyz);

  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

  double w() const { return coeffs_[0]; }
  double x() const { return coeffs_[1]; }
  double y() const { return coeffs_[2]; }
  double z() const { return coeffs_[3]; }
  const Vec4& coeffs() const { return coeffs_; }
  Vec3 vec() const { return coeffs_.tail<3>(); }

  UnitQuaternion conjugate() const;
  /// Flips the sign so that w >= 0 (same rotation).
  UnitQuaternion canonical() const;
  Mat3 to_rotation_matrix() const;

 private:
  Vec4 coeffs_;
};

/// Raw Hamilton product on 4-vectors (no normalization).
Vec4 hamilton(const Vec4& a, const Vec4& b);
/// Quaternion conjugate on raw coordinates.
Vec4 conjugate(const Vec4& q);
/// [q]_L such that q (x) r = [q]_L r.
Mat4 left_product_matrix(const Vec4& q);
/// [q]_(x) such that r (x) q = [q]_(x) r.
Mat4 right_product_matrix(const Vec4& q);

UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b);
Vec3 rotate(const UnitQuaternion& q, const Vec3& u);
/// q* (x) q_f: the rotation taking attitude q to q_f, expressed in q's body frame.
UnitQuaternion error_quat(const UnitQuaternion& q, const UnitQuaternion& q_f);

struct AxisAngle {
  Vec3 axis;
  double angle = 0.0;  // radians, in [0, 2*pi]
  bool degenerate = false;
};

/// Axis-angle of q without sign canonicalization. An undefined axis (zero
/// vector part) is reported as e1; `degenerate` flags the 2*pi case.
AxisAngle to_axis_angle(const UnitQuaternion& q);

struct SlerpResult {
  UnitQuaternion q;
  Vec3 axis;
  double angle = 0.0;
  bool degenerate = false;
};

/// q0 (x) (cos(f*theta/2), u*sin(f*theta/2)) where (theta, u) come from q0* (x) qf.
SlerpResult slerp(const UnitQuaternion& q0, const UnitQuaternion& qf, double fraction);

struct TaitBryan {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  bool gimbal_lock = false;
};

inline constexpr double kGimbalLockThreshold = 1e-6;

/// Z-Y-X intrinsic angles: q = qz(yaw) (x) qy(pitch) (x) qx(roll).
TaitBryan to_tait_bryan(const UnitQuaternion& q);
UnitQuaternion from_tait_bryan(double roll, double pitch, double yaw);

inline double deg2rad(double deg) { return deg * 0.017453292519943295; }
inline double rad2deg(double rad) { return rad * 57.29577951308232; }

}  // namespace scvx
