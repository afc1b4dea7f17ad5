#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "moma/geometry.hpp"

namespace moma {

// Pinhole camera, no distortion. Optical frame: x right, y down, z forward.
struct CameraIntrinsics {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  void validate() const;  // throws ConfigError
};

// Planar square fiducial. Marker frame: x right, y up, z out of the plane
// toward the viewer; corners ordered counter-clockwise starting top-left.
struct MarkerBoard {
  int id = 0;
  double side = 0.3;
  std::array<Eigen::Vector3d, 4> corners;

  static MarkerBoard make(int id, double side);
  void validate() const;  // throws ConfigError
};

struct Correspondence {
  Eigen::Vector3d point;  // marker frame, meters
  Eigen::Vector2d pixel;
};

struct Observation {
  int marker_id = 0;
  double timestamp = 0.0;
  std::vector<Correspondence> points;
};

// Isotropic Gaussian pixel noise, drawn from a counter generator keyed on
// (seed, timestamp, marker id, corner index) so results are independent of
// evaluation order.
struct PixelNoiseModel {
  double sigma = 0.5;
  std::uint64_t seed = 0;
};

// (fx X/Z + cx, fy Y/Z + cy). Throws BehindCameraError when Z <= 1e-9.
Eigen::Vector2d project(const CameraIntrinsics& intr, const Eigen::Vector3d& point_cam);

bool pixel_in_bounds(const CameraIntrinsics& intr, const Eigen::Vector2d& px);

// Synthesize an observation of `board` from a camera at `world_from_camera`.
// Visibility is decided on the noiseless projections: all four corners must
// be in front of the camera and inside the image; noise is applied afterwards
// and may leave the reported pixels slightly out of bounds.
std::optional<Observation> observe(const Pose& world_from_camera, const Pose& world_from_marker,
                                   const MarkerBoard& board, const CameraIntrinsics& intr,
                                   const PixelNoiseModel& noise, double timestamp);

// Ground-plane footprint of a straight-down camera at height h, in
// camera-aligned ground coordinates centered under the optical axis.
struct GroundRect {
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;

  double area() const { return (max_x - min_x) * (max_y - min_y); }
  Eigen::Vector2d half_extents() const {
    return {0.5 * (max_x - min_x), 0.5 * (max_y - min_y)};
  }
  bool contains(const Eigen::Vector2d& p, double margin = 0.0) const {
    return p.x() >= min_x + margin && p.x() <= max_x - margin && p.y() >= min_y + margin &&
           p.y() <= max_y - margin;
  }
};

GroundRect coverage_area(const CameraIntrinsics& intr, double h);

}  // namespace moma
