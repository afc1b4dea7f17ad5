#include "moma/camera.hpp"

#include <cmath>

#include "moma/errors.hpp"
#include "moma/rng.hpp"

namespace moma {

void CameraIntrinsics::validate() const {
  if (fx <= 0.0 || fy <= 0.0) {
    throw ConfigError("intrinsics: focal lengths must be positive");
  }
  if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
    throw ConfigError("intrinsics: principal point outside image");
  }
}

MarkerBoard MarkerBoard::make(int id, double side) {
  const double h = 0.5 * side;
  MarkerBoard b;
  b.id = id;
  b.side = side;
  b.corners = {Eigen::Vector3d(-h, h, 0.0), Eigen::Vector3d(-h, -h, 0.0),
               Eigen::Vector3d(h, -h, 0.0), Eigen::Vector3d(h, h, 0.0)};
  return b;
}

void MarkerBoard::validate() const {
  if (side <= 0.0) {
    throw ConfigError("marker board: side must be positive");
  }
  constexpr double tol = 1e-9;
  for (const auto& c : corners) {
    if (std::abs(c.z()) > tol) {
      throw ConfigError("marker board: corners must lie in the Z=0 plane");
    }
  }
  const double diag = side * std::sqrt(2.0);
  for (int i = 0; i < 4; ++i) {
    const double edge = (corners[i] - corners[(i + 1) % 4]).norm();
    if (std::abs(edge - side) > tol) {
      throw ConfigError("marker board: edge length inconsistent with side");
    }
  }
  if (std::abs((corners[0] - corners[2]).norm() - diag) > tol ||
      std::abs((corners[1] - corners[3]).norm() - diag) > tol) {
    throw ConfigError("marker board: diagonal inconsistent with side");
  }
  // Counter-clockwise in the Z=0 plane viewed from +Z.
  const Eigen::Vector3d n =
      (corners[1] - corners[0]).cross(corners[2] - corners[1]);
  if (n.z() <= 0.0) {
    throw ConfigError("marker board: corners must wind counter-clockwise");
  }
}

Eigen::Vector2d project(const CameraIntrinsics& intr, const Eigen::Vector3d& p) {
  if (p.z() <= 1e-9) {
    throw BehindCameraError("project: point at or behind the camera");
  }
  return {intr.fx * p.x() / p.z() + intr.cx, intr.fy * p.y() / p.z() + intr.cy};
}

bool pixel_in_bounds(const CameraIntrinsics& intr, const Eigen::Vector2d& px) {
  return px.x() >= 0.0 && px.x() <= intr.width - 1 && px.y() >= 0.0 && px.y() <= intr.height - 1;
}

std::optional<Observation> observe(const Pose& world_from_camera, const Pose& world_from_marker,
                                   const MarkerBoard& board, const CameraIntrinsics& intr,
                                   const PixelNoiseModel& noise, double timestamp) {
  const Pose camera_from_marker = compose(inverse(world_from_camera), world_from_marker);

  Observation obs;
  obs.marker_id = board.id;
  obs.timestamp = timestamp;
  obs.points.reserve(board.corners.size());

  const std::uint64_t tkey = rng::time_key(timestamp);
  for (std::size_t i = 0; i < board.corners.size(); ++i) {
    const Eigen::Vector3d p_cam = act(camera_from_marker, board.corners[i]);
    if (p_cam.z() <= 1e-9) {
      return std::nullopt;
    }
    const Eigen::Vector2d px = project(intr, p_cam);
    if (!pixel_in_bounds(intr, px)) {
      return std::nullopt;
    }
    Eigen::Vector2d noisy = px;
    if (noise.sigma > 0.0) {
      const auto [du, dv] = rng::gaussian_pair(rng::mix(
          {rng::kStreamPixel, noise.seed, tkey, static_cast<std::uint64_t>(board.id),
           static_cast<std::uint64_t>(i)}));
      noisy.x() += noise.sigma * du;
      noisy.y() += noise.sigma * dv;
    }
    obs.points.push_back({board.corners[i], noisy});
  }
  return obs;
}

GroundRect coverage_area(const CameraIntrinsics& intr, double h) {
  GroundRect r;
  r.min_x = h * (0.0 - intr.cx) / intr.fx;
  r.max_x = h * (intr.width - intr.cx) / intr.fx;
  r.min_y = h * (0.0 - intr.cy) / intr.fy;
  r.max_y = h * (intr.height - intr.cy) / intr.fy;
  return r;
}

}  // namespace moma
