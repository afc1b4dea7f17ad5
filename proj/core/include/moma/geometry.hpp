#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>

namespace moma {

// Tangent-space element of SE(3): rotation vector (rad) + translation (m).
struct Twist {
  Eigen::Vector3d rot = Eigen::Vector3d::Zero();
  Eigen::Vector3d trans = Eigen::Vector3d::Zero();
};

// Rigid transform in SE(3), rotation matrix + translation vector.
//
// A Pose is just a map between coordinate frames; which frames is a property
// of the call site. The convention used throughout is written as
// `a_from_b`: p_a = pose.act(p_b).
//
// Long composition chains re-orthonormalize themselves (polar projection)
// so Monte-Carlo accumulations cannot drift off the manifold.
class Pose {
 public:
  Pose() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& translation)
      : rotation_(q.normalized().toRotationMatrix()), translation_(translation) {}

  static Pose identity() { return {}; }
  static Pose from_translation(const Eigen::Vector3d& t) {
    return {Eigen::Matrix3d::Identity(), t};
  }
  static Pose from_translation(double x, double y, double z) {
    return from_translation(Eigen::Vector3d(x, y, z));
  }
  static Pose from_matrix(const Eigen::Matrix4d& m) {
    return {Eigen::Matrix3d(m.topLeftCorner<3, 3>()), Eigen::Vector3d(m.topRightCorner<3, 1>())};
  }
  // Yaw about +Z, the planar ground-robot case.
  static Pose from_xy_yaw(double x, double y, double yaw, double z = 0.0) {
    return {Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix(),
            Eigen::Vector3d(x, y, z)};
  }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation_); }
  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
  }

  // Frobenius norm of R R^T - I.
  double orthonormality_residual() const;
  // Nearest rotation by polar projection.
  Pose renormalized() const;

  std::uint32_t chain_length() const { return chain_; }

 private:
  friend Pose compose(const Pose& a, const Pose& b);

  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
  std::uint32_t chain_ = 0;  // composition ops since last re-orthonormalization
};

// a * b as homogeneous matrices: (a o b).act(p) == a.act(b.act(p)).
Pose compose(const Pose& a, const Pose& b);

// Rotation transposed, translation -R^T t.
Pose inverse(const Pose& a);

// R p + t.
Eigen::Vector3d act(const Pose& a, const Eigen::Vector3d& point);

// Exponential map with the coupled translation term (V matrix).
Pose exp(const Twist& t);

// Inverse of exp. Throws DegenerateRotationError within 1e-6 of angle pi.
Twist log(const Pose& p);

Eigen::Matrix3d hat(const Eigen::Vector3d& w);

// Rotation angle in [0, pi] of a rotation matrix.
double rotation_angle(const Eigen::Matrix3d& r);

// Angle of a.rotation()^T b.rotation(); metric used by tests and reports.
double rotation_distance(const Pose& a, const Pose& b);
double translation_distance(const Pose& a, const Pose& b);

}  // namespace moma
