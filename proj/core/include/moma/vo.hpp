#pragma once

#include <cstdint>
#include <vector>

#include "moma/camera.hpp"
#include "moma/geometry.hpp"

namespace moma {

struct SceneFeature {
  int id = 0;
  Eigen::Vector3d position;  // world, static for the run
};

// Textured surface patches (wall/floor rectangles) carrying trackable
// features at a given surface density. Placement is deterministic in the
// seed; regions listed in `featureless` are culled, which models untextured
// parts of the environment.
struct SurfacePatch {
  Eigen::Vector3d origin;
  Eigen::Vector3d u_dir;  // unit
  Eigen::Vector3d v_dir;  // unit
  double u_len = 0.0;
  double v_len = 0.0;
};

struct GroundRegion {
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

class FeatureField {
 public:
  FeatureField() = default;
  FeatureField(std::vector<SurfacePatch> patches, double density, std::uint64_t seed);

  // Four walls of an axis-aligned room footprint.
  static FeatureField room(double min_x, double min_y, double max_x, double max_y,
                           double wall_height, double density, std::uint64_t seed);

  void add_featureless(const GroundRegion& region);
  const std::vector<SceneFeature>& features() const { return features_; }
  double density() const { return density_; }

 private:
  void scatter();

  std::vector<SurfacePatch> patches_;
  std::vector<GroundRegion> featureless_;
  double density_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<SceneFeature> features_;
};

struct FeatureTrack {
  int feature_id = 0;
  Eigen::Vector2d pixel_prev;  // frame t~, flow-noisy
  Eigen::Vector2d pixel_curr;  // frame t
  double depth_curr = 0.0;     // reconstructed, noisy, meters
};

struct VoNoise {
  double flow_sigma = 0.5;        // px, on the previous-frame pixel
  double depth_rel_sigma = 0.02;  // multiplicative on depth
  // Flow estimation degrades with displacement; effective sigma is
  // flow_sigma * (1 + flow_error_gain * |flow px|).
  double flow_error_gain = 0.05;
  double outlier_fraction = 0.0;  // uniform replacement of the prev pixel
  std::uint64_t seed = 0;
  int max_tracks = 80;
};

inline constexpr int kMinVoTracks = 6;

// Tracks for features visible in both frames. Fewer than kMinVoTracks means
// the tracker lost the scene; the caller decides what to do with that.
std::vector<FeatureTrack> generate_tracks(const Pose& world_from_cam_prev,
                                          const Pose& world_from_cam_curr,
                                          const FeatureField& field, const CameraIntrinsics& intr,
                                          const VoNoise& noise, long frame_index);

// Relative pose prev_from_curr minimizing reprojection of the back-projected
// current-frame points onto the previous-frame pixels. Throws
// DegenerateGeometryError below kMinVoTracks or for collinear structure.
Pose vo_step(const std::vector<FeatureTrack>& tracks, const CameraIntrinsics& intr);

// Dead-reckoning update: world_from_curr = world_from_prev o prev_from_curr.
Pose accumulate(const Pose& world_from_prev, const Pose& prev_from_curr);

}  // namespace moma
