#include "moma/vo.hpp"

#include <algorithm>
#include <cmath>

#include "moma/errors.hpp"
#include "moma/pnp.hpp"
#include "moma/rng.hpp"

namespace moma {

FeatureField::FeatureField(std::vector<SurfacePatch> patches, double density, std::uint64_t seed)
    : patches_(std::move(patches)), density_(density), seed_(seed) {
  if (density_ < 0.0) {
    throw ConfigError("feature field: density must be non-negative");
  }
  scatter();
}

FeatureField FeatureField::room(double min_x, double min_y, double max_x, double max_y,
                                double wall_height, double density, std::uint64_t seed) {
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  const double lx = max_x - min_x;
  const double ly = max_y - min_y;
  std::vector<SurfacePatch> walls = {
      {{min_x, min_y, 0.0}, Eigen::Vector3d::UnitX(), up, lx, wall_height},
      {{min_x, max_y, 0.0}, Eigen::Vector3d::UnitX(), up, lx, wall_height},
      {{min_x, min_y, 0.0}, Eigen::Vector3d::UnitY(), up, ly, wall_height},
      {{max_x, min_y, 0.0}, Eigen::Vector3d::UnitY(), up, ly, wall_height},
  };
  return FeatureField(std::move(walls), density, seed);
}

void FeatureField::add_featureless(const GroundRegion& region) {
  featureless_.push_back(region);
  scatter();
}

void FeatureField::scatter() {
  features_.clear();
  int next_id = 0;
  for (std::size_t p = 0; p < patches_.size(); ++p) {
    const auto& patch = patches_[p];
    const int count = static_cast<int>(std::llround(density_ * patch.u_len * patch.v_len));
    for (int k = 0; k < count; ++k) {
      const double u = rng::uniform(rng::mix({rng::kStreamScatter, seed_,
                                              static_cast<std::uint64_t>(p),
                                              static_cast<std::uint64_t>(k), 0}));
      const double v = rng::uniform(rng::mix({rng::kStreamScatter, seed_,
                                              static_cast<std::uint64_t>(p),
                                              static_cast<std::uint64_t>(k), 1}));
      const Eigen::Vector3d pos =
          patch.origin + u * patch.u_len * patch.u_dir + v * patch.v_len * patch.v_dir;
      const int id = next_id++;
      const bool masked = std::any_of(featureless_.begin(), featureless_.end(),
                                      [&](const GroundRegion& r) {
                                        return r.contains(pos.x(), pos.y());
                                      });
      if (!masked) {
        features_.push_back({id, pos});
      }
    }
  }
}

std::vector<FeatureTrack> generate_tracks(const Pose& world_from_cam_prev,
                                          const Pose& world_from_cam_curr,
                                          const FeatureField& field, const CameraIntrinsics& intr,
                                          const VoNoise& noise, long frame_index) {
  const Pose prev_from_world = inverse(world_from_cam_prev);
  const Pose curr_from_world = inverse(world_from_cam_curr);
  const auto fkey = static_cast<std::uint64_t>(frame_index);

  std::vector<FeatureTrack> tracks;
  for (const auto& f : field.features()) {
    if (tracks.size() >= static_cast<std::size_t>(noise.max_tracks)) break;
    const Eigen::Vector3d p_prev = act(prev_from_world, f.position);
    const Eigen::Vector3d p_curr = act(curr_from_world, f.position);
    if (p_prev.z() <= 1e-9 || p_curr.z() <= 1e-9) continue;
    const Eigen::Vector2d px_prev = project(intr, p_prev);
    const Eigen::Vector2d px_curr = project(intr, p_curr);
    if (!pixel_in_bounds(intr, px_prev) || !pixel_in_bounds(intr, px_curr)) continue;

    FeatureTrack tr;
    tr.feature_id = f.id;
    tr.pixel_curr = px_curr;
    tr.pixel_prev = px_prev;
    tr.depth_curr = p_curr.z();

    const auto fid = static_cast<std::uint64_t>(f.id);
    if (noise.flow_sigma > 0.0) {
      const double flow = (px_prev - px_curr).norm();
      const double sigma = noise.flow_sigma * (1.0 + noise.flow_error_gain * flow);
      const auto [du, dv] =
          rng::gaussian_pair(rng::mix({rng::kStreamFlow, noise.seed, fkey, fid}));
      tr.pixel_prev.x() += sigma * du;
      tr.pixel_prev.y() += sigma * dv;
    }
    if (noise.depth_rel_sigma > 0.0) {
      const double g =
          rng::gaussian_pair(rng::mix({rng::kStreamDepth, noise.seed, fkey, fid})).first;
      tr.depth_curr *= std::max(1.0 + noise.depth_rel_sigma * g, 0.05);
    }
    if (noise.outlier_fraction > 0.0) {
      const std::uint64_t k = rng::mix({rng::kStreamOutlier, noise.seed, fkey, fid});
      if (rng::uniform(k) < noise.outlier_fraction) {
        tr.pixel_prev.x() = rng::uniform(rng::mix({k, 1})) * (intr.width - 1);
        tr.pixel_prev.y() = rng::uniform(rng::mix({k, 2})) * (intr.height - 1);
      }
    }
    tracks.push_back(tr);
  }
  return tracks;
}

Pose vo_step(const std::vector<FeatureTrack>& tracks, const CameraIntrinsics& intr) {
  if (tracks.size() < static_cast<std::size_t>(kMinVoTracks)) {
    throw DegenerateGeometryError("vo_step: too few tracks");
  }
  // Back-project current-frame pixels at their reconstructed depths and reuse
  // the resection machinery against the previous-frame pixels.
  Observation obs;
  obs.points.reserve(tracks.size());
  for (const auto& tr : tracks) {
    const Eigen::Vector3d ray((tr.pixel_curr.x() - intr.cx) / intr.fx,
                              (tr.pixel_curr.y() - intr.cy) / intr.fy, 1.0);
    obs.points.push_back({tr.depth_curr * ray, tr.pixel_prev});
  }
  if (points_collinear(obs)) {
    throw DegenerateGeometryError("vo_step: collinear structure");
  }
  PnpOptions opts;
  opts.max_iterations = 50;
  const PnpSolution sol = refine(obs, intr, Pose::identity(), opts);
  return sol.cam_from_marker;  // prev_from_curr
}

Pose accumulate(const Pose& world_from_prev, const Pose& prev_from_curr) {
  return compose(world_from_prev, prev_from_curr);
}

}  // namespace moma
