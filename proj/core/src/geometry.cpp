#include "moma/geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "moma/errors.hpp"

namespace moma {
namespace {

constexpr std::uint32_t kMaxChain = 1000;
constexpr double kOrthoTol = 1e-9;
constexpr double kSmallAngle = 1e-4;

Eigen::Matrix3d polar_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) {
    u.col(2) = -u.col(2);
  }
  return u * v.transpose();
}

}  // namespace

double Pose::orthonormality_residual() const {
  return (rotation_ * rotation_.transpose() - Eigen::Matrix3d::Identity()).norm();
}

Pose Pose::renormalized() const {
  return {polar_rotation(rotation_), translation_};
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out(a.rotation_ * b.rotation_, a.rotation_ * b.translation_ + a.translation_);
  out.chain_ = std::max(a.chain_, b.chain_) + 1;
  if (out.chain_ > kMaxChain || out.orthonormality_residual() > kOrthoTol) {
    out.rotation_ = polar_rotation(out.rotation_);
    out.chain_ = 0;
  }
  return out;
}

Pose inverse(const Pose& a) {
  const Eigen::Matrix3d rt = a.rotation().transpose();
  return {rt, -(rt * a.translation())};
}

Eigen::Vector3d act(const Pose& a, const Eigen::Vector3d& point) {
  return a.rotation() * point + a.translation();
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Pose exp(const Twist& t) {
  const double theta2 = t.rot.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d omega = hat(t.rot);
  const Eigen::Matrix3d omega2 = omega * omega;

  double a, b, c;  // sin(x)/x, (1-cos x)/x^2, (x-sin x)/x^3
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
    c = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }

  const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + a * omega + b * omega2;
  const Eigen::Matrix3d v = Eigen::Matrix3d::Identity() + b * omega + c * omega2;
  return {r, v * t.trans};
}

Twist log(const Pose& p) {
  Eigen::Quaterniond q(p.rotation());
  q.normalize();
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const double sin_half = q.vec().norm();
  const double theta = 2.0 * std::atan2(sin_half, q.w());
  if (theta > M_PI - 1e-6) {
    throw DegenerateRotationError("log: rotation angle within 1e-6 of pi");
  }

  Eigen::Vector3d w;
  if (sin_half < 1e-9) {
    w = 2.0 * q.vec();
  } else {
    w = (theta / sin_half) * q.vec();
  }

  const Eigen::Matrix3d omega = hat(w);
  const Eigen::Matrix3d omega2 = omega * omega;
  double g;  // (1 - x cot(x/2) / 2) / x^2
  if (theta < kSmallAngle) {
    g = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    const double half = 0.5 * theta;
    g = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  }
  const Eigen::Matrix3d v_inv = Eigen::Matrix3d::Identity() - 0.5 * omega + g * omega2;
  return {w, v_inv * p.translation()};
}

double rotation_angle(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

double rotation_distance(const Pose& a, const Pose& b) {
  return rotation_angle(a.rotation().transpose() * b.rotation());
}

double translation_distance(const Pose& a, const Pose& b) {
  return (a.translation() - b.translation()).norm();
}

}  // namespace moma
