#include "moma/pnp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "moma/errors.hpp"

namespace moma {
namespace {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

Pose apply_step(const Vector6d& delta, const Pose& pose) {
  Twist tw;
  tw.trans = delta.head<3>();
  tw.rot = delta.tail<3>();
  return compose(exp(tw), pose);
}

double cost_of(const Eigen::VectorXd& r) { return 0.5 * r.squaredNorm(); }

}  // namespace

Eigen::VectorXd reprojection_residuals(const Pose& cam_from_marker, const Observation& obs,
                                       const CameraIntrinsics& intr) {
  Eigen::VectorXd r(2 * obs.points.size());
  for (std::size_t i = 0; i < obs.points.size(); ++i) {
    const Eigen::Vector2d pred = project(intr, act(cam_from_marker, obs.points[i].point));
    r.segment<2>(2 * i) = obs.points[i].pixel - pred;
  }
  return r;
}

Eigen::Matrix<double, Eigen::Dynamic, 6> reprojection_jacobian(const Pose& cam_from_marker,
                                                               const Observation& obs,
                                                               const CameraIntrinsics& intr) {
  Eigen::Matrix<double, Eigen::Dynamic, 6> j(2 * obs.points.size(), 6);
  for (std::size_t i = 0; i < obs.points.size(); ++i) {
    const Eigen::Vector3d p = act(cam_from_marker, obs.points[i].point);
    if (p.z() <= 1e-9) {
      throw BehindCameraError("jacobian: point at or behind the camera");
    }
    const double iz = 1.0 / p.z();
    Eigen::Matrix<double, 2, 3> dpi;
    dpi << intr.fx * iz, 0.0, -intr.fx * p.x() * iz * iz,
           0.0, intr.fy * iz, -intr.fy * p.y() * iz * iz;
    Eigen::Matrix<double, 3, 6> dp;
    dp.leftCols<3>() = Eigen::Matrix3d::Identity();
    dp.rightCols<3>() = -hat(p);
    // residual = observed - predicted, hence the sign.
    j.middleRows<2>(2 * i) = -(dpi * dp);
  }
  return j;
}

bool points_collinear(const Observation& obs, double tol) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& c : obs.points) mean += c.point;
  mean /= static_cast<double>(obs.points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& c : obs.points) {
    const Eigen::Vector3d d = c.point - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d ev = es.eigenvalues();  // ascending
  return ev(1) <= tol * std::max(ev(2), tol);
}

Pose init_from_homography(const Observation& obs, const CameraIntrinsics& intr) {
  const std::size_t n = obs.points.size();
  if (n < 4) {
    throw DegenerateGeometryError("homography: need at least 4 correspondences");
  }

  // Normalized plane <-> normalized image coordinates, with Hartley
  // conditioning on both sides.
  Eigen::Matrix2Xd src(2, n), dst(2, n);
  for (std::size_t i = 0; i < n; ++i) {
    src.col(i) = obs.points[i].point.head<2>();
    dst.col(i) << (obs.points[i].pixel.x() - intr.cx) / intr.fx,
        (obs.points[i].pixel.y() - intr.cy) / intr.fy;
  }
  auto condition = [](const Eigen::Matrix2Xd& pts) {
    const Eigen::Vector2d c = pts.rowwise().mean();
    double scale = 0.0;
    for (int i = 0; i < pts.cols(); ++i) scale += (pts.col(i) - c).norm();
    scale = (scale > 0.0) ? std::sqrt(2.0) * pts.cols() / scale : 1.0;
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    t(0, 0) = t(1, 1) = scale;
    t.block<2, 1>(0, 2) = -scale * c;
    return t;
  };
  const Eigen::Matrix3d t_src = condition(src);
  const Eigen::Matrix3d t_dst = condition(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d s = t_src * src.col(i).homogeneous();
    const Eigen::Vector3d d = t_dst * dst.col(i).homogeneous();
    a.row(2 * i) << s.x(), s.y(), 1.0, 0.0, 0.0, 0.0, -d.x() * s.x(), -d.x() * s.y(), -d.x();
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, s.x(), s.y(), 1.0, -d.y() * s.x(), -d.y() * s.y(), -d.y();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) > 1e12 * std::max(sv(sv.size() - 2), std::numeric_limits<double>::min())) {
    throw DegenerateGeometryError("homography: design matrix condition above 1e12");
  }
  Eigen::Matrix3d h_hat;
  const Eigen::VectorXd hv = svd.matrixV().col(8);
  h_hat << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), hv(8);
  const Eigen::Matrix3d h = t_dst.inverse() * h_hat * t_src;

  // H ~ [r1 r2 t]; the planar two-fold ambiguity shows up as the overall
  // sign, resolved by requiring positive corner depths.
  auto decompose = [&](double sign) -> std::optional<Pose> {
    const Eigen::Matrix3d hs = sign * h;
    const double s = 2.0 / (hs.col(0).norm() + hs.col(1).norm());
    Eigen::Matrix3d r;
    r.col(0) = s * hs.col(0);
    r.col(1) = s * hs.col(1);
    r.col(2) = r.col(0).cross(r.col(1));
    Eigen::JacobiSVD<Eigen::Matrix3d> rsvd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = rsvd.matrixU();
    if ((u * rsvd.matrixV().transpose()).determinant() < 0.0) {
      u.col(2) = -u.col(2);
    }
    Pose pose(Eigen::Matrix3d(u * rsvd.matrixV().transpose()), Eigen::Vector3d(s * hs.col(2)));
    for (const auto& c : obs.points) {
      if (act(pose, c.point).z() <= 0.0) return std::nullopt;
    }
    return pose;
  };

  std::optional<Pose> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (double sign : {1.0, -1.0}) {
    if (auto pose = decompose(sign)) {
      const double c = cost_of(reprojection_residuals(*pose, obs, intr));
      if (c < best_cost) {
        best = pose;
        best_cost = c;
      }
    }
  }
  if (!best) {
    throw DegenerateGeometryError("homography: no decomposition with positive depths");
  }
  return *best;
}

PnpSolution refine(const Observation& obs, const CameraIntrinsics& intr, const Pose& init,
                   const PnpOptions& opts) {
  PnpSolution out;
  out.cam_from_marker = init;

  Eigen::VectorXd r;
  try {
    r = reprojection_residuals(out.cam_from_marker, obs, intr);
  } catch (const BehindCameraError&) {
    return out;  // converged = false, nothing usable
  }
  double cost = cost_of(r);
  double lambda = opts.lambda_init;
  if (opts.record_costs) out.costs.push_back(cost);

  for (int it = 0; it < opts.max_iterations; ++it) {
    out.iterations = it + 1;
    const auto j = reprojection_jacobian(out.cam_from_marker, obs, intr);
    const Matrix6d jtj = j.transpose() * j;
    const Vector6d g = j.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < opts.gradient_tol) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    while (!accepted) {
      Matrix6d damped = jtj;
      for (int k = 0; k < 6; ++k) {
        damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      }
      const Vector6d delta = damped.ldlt().solve(-g);
      if (delta.norm() < opts.step_tol) {
        out.converged = true;
        break;
      }
      const Pose candidate = apply_step(delta, out.cam_from_marker);
      double trial_cost = std::numeric_limits<double>::infinity();
      Eigen::VectorXd trial_r;
      try {
        trial_r = reprojection_residuals(candidate, obs, intr);
        trial_cost = cost_of(trial_r);
      } catch (const BehindCameraError&) {
        // step pushed a point behind the camera: reject
      }
      if (trial_cost < cost) {
        out.cam_from_marker = candidate;
        r = trial_r;
        cost = trial_cost;
        lambda = std::max(lambda * opts.lambda_down, 1e-12);
        accepted = true;
        if (opts.record_costs) out.costs.push_back(cost);
      } else {
        lambda *= opts.lambda_up;
        if (lambda > 1e12) break;  // stuck: give up this iteration chain
      }
    }
    if (out.converged || !accepted) break;
  }

  out.rms_px = std::sqrt(2.0 * cost / static_cast<double>(obs.points.size()));
  return out;
}

PnpSolution solve(const Observation& obs, const MarkerBoard& board, const CameraIntrinsics& intr,
                  const std::optional<Pose>& init, const PnpOptions& opts) {
  (void)board;
  if (obs.points.size() < 4) {
    throw DegenerateGeometryError("solve: need at least 4 correspondences");
  }
  if (points_collinear(obs)) {
    throw DegenerateGeometryError("solve: correspondences are collinear");
  }
  const Pose start = init ? *init : init_from_homography(obs, intr);
  return refine(obs, intr, start, opts);
}

}  // namespace moma
