#include "moma/odometry.hpp"

#include <algorithm>

#include "moma/errors.hpp"

namespace moma {

const char* to_string(Phase p) { return p == Phase::Static ? "static" : "mobile"; }

Pose relative_marker_pose(const Pose& g_tau1, const Pose& g_tau2) {
  return compose(inverse(g_tau2), g_tau1);
}

Pose average_pose(const std::vector<TimedPose>& history) {
  if (history.empty()) {
    throw EmptyHistoryError("average_pose: empty window");
  }
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  Eigen::Vector4d q = Eigen::Vector4d::Zero();
  const Eigen::Quaterniond q0 = history.front().pose.quaternion();
  for (const auto& e : history) {
    t += e.pose.translation();
    Eigen::Quaterniond qi = e.pose.quaternion();
    if (qi.dot(q0) < 0.0) {
      qi.coeffs() = -qi.coeffs();
    }
    q += qi.coeffs();
  }
  t /= static_cast<double>(history.size());
  const double n = q.norm();
  if (n < 1e-12) {
    throw Error("average_pose: degenerate quaternion sum");
  }
  q /= n;
  return {Eigen::Quaterniond(q(3), q(0), q(1), q(2)), t};
}

MomaState commit_switch(MomaState state, const Pose& g_tau1, const Pose& g_tau2) {
  state.anchor = compose(relative_marker_pose(g_tau1, g_tau2), state.anchor);
  state.cycle_index += 1;
  state.history.clear();
  return state;
}

OdometryEstimate camera_pose(const MomaState& state, const Pose& g_t, double t) {
  const auto it = state.phases.find(state.reference);
  if (it != state.phases.end() && it->second == Phase::Mobile) {
    throw PhaseError("camera_pose: reference marker is mobile");
  }
  OdometryEstimate est;
  est.cam_from_world = compose(g_t, state.anchor);
  est.marker_from_world = state.anchor;
  est.t = t;
  est.cycle_index = state.cycle_index;
  return est;
}

Pose marker_pose_during_motion(const MomaState& state, const Pose& g_t, const Pose& g_tau1) {
  const auto cam = state.phases.find(state.camera);
  const auto ref = state.phases.find(state.reference);
  if (cam == state.phases.end() || cam->second != Phase::Static) {
    throw PhaseError("marker_pose_during_motion: camera must be static");
  }
  if (ref == state.phases.end() || ref->second != Phase::Mobile) {
    throw PhaseError("marker_pose_during_motion: marker is not mobile");
  }
  return compose(compose(inverse(g_t), g_tau1), state.anchor);
}

MomaEstimator::MomaEstimator(EstimatorConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.markers.empty()) {
    throw ConfigError("estimator: no marker agents");
  }
  if (std::find(cfg_.markers.begin(), cfg_.markers.end(), cfg_.reference) == cfg_.markers.end()) {
    throw ConfigError("estimator: reference is not a marker agent");
  }
  state_.anchor = cfg_.anchor;
  state_.camera = cfg_.camera;
  state_.reference = cfg_.reference;
  state_.phases[cfg_.camera] = Phase::Static;
  for (const auto& m : cfg_.markers) {
    state_.phases[m] = Phase::Static;
  }
}

MomaEstimator::WindowKind MomaEstimator::active_window() const {
  const bool cam_static = state_.phases.at(cfg_.camera) == Phase::Static;
  if (awaiting_commit_) {
    return self_switch_ ? WindowKind::Direct : WindowKind::Pair;
  }
  if (mover_.empty() && cam_static && state_.phases.at(state_.reference) == Phase::Static) {
    return WindowKind::Direct;  // rolling tau1 candidate
  }
  return WindowKind::None;
}

void MomaEstimator::on_phase_event(const AgentId& agent, Phase phase, double t) {
  if (awaiting_commit_) {
    // The schedule must leave the full window untouched; any phase flip
    // before the commit has landed breaks restriction 3.
    throw ProtocolError("phase change before the static switch window completed");
  }

  if (agent == cfg_.camera) {
    if (phase == Phase::Mobile) {
      if (!mover_.empty() && self_switch_) {
        throw ProtocolError("camera moved while the reference marker was relocating");
      }
      pending_tau1_.reset();  // averaged windows are tied to the camera pose
    }
  } else if (phase == Phase::Mobile) {
    if (!mover_.empty()) {
      throw ProtocolError("two markers of one observer mobile at once");
    }
    mover_ = agent;
    self_switch_ = (agent == state_.reference);
    if (self_switch_) {
      if (state_.phases.at(cfg_.camera) != Phase::Static) {
        throw ProtocolError("reference marker started moving under a mobile camera");
      }
      if (!state_.history.empty()) {
        tau1_ = average_pose(state_.history);
      } else if (pending_tau1_) {
        tau1_ = pending_tau1_;
      } else {
        throw ProtocolError("empty pre-departure window");
      }
    }
  } else {  // a marker stopped
    if (agent == mover_) {
      awaiting_commit_ = true;
    }
  }

  state_.phases[agent] = phase;
  state_.history.clear();
}

void MomaEstimator::try_commit(double t, FrameEstimate& out) {
  if (!awaiting_commit_ ||
      state_.history.size() < static_cast<std::size_t>(cfg_.window_frames)) {
    return;
  }
  if (self_switch_) {
    const Pose g_tau2 = average_pose(state_.history);
    state_ = commit_switch(std::move(state_), *tau1_, g_tau2);
    pending_tau1_ = g_tau2;  // the arrival window doubles as the next departure window
  } else {
    // Hand-over: history holds per-frame mover_from_reference relatives.
    const Pose rel = average_pose(state_.history);
    state_.anchor = compose(rel, state_.anchor);
    state_.cycle_index += 1;
    state_.history.clear();
    state_.reference = mover_;
    pending_tau1_.reset();
  }
  state_.anchor_time = t;
  tau1_.reset();

  CommitRecord rec;
  rec.cycle = state_.cycle_index;
  rec.t = t;
  rec.agent = mover_;
  rec.marker_from_world = state_.anchor;
  out.commit = rec;

  mover_.clear();
  awaiting_commit_ = false;
  self_switch_ = false;
}

FrameEstimate MomaEstimator::process(double t, const std::map<AgentId, Phase>& phases,
                                     const std::map<AgentId, Pose>& measurements) {
  FrameEstimate out;
  out.t = t;

  // Phase diffs become events; std::map keeps the order deterministic.
  for (const auto& [agent, phase] : phases) {
    auto it = state_.phases.find(agent);
    if (it == state_.phases.end()) continue;  // not ours
    if (it->second != phase) {
      on_phase_event(agent, phase, t);
    }
  }

  const bool cam_static = state_.phases.at(cfg_.camera) == Phase::Static;
  if (!cam_static && state_.phases.at(state_.reference) == Phase::Mobile) {
    throw ProtocolError("camera and reference marker mobile simultaneously");
  }

  const auto g_ref = measurements.find(state_.reference);
  const auto g_mov = mover_.empty() ? measurements.end() : measurements.find(mover_);

  switch (active_window()) {
    case WindowKind::Direct:
      if (g_ref != measurements.end()) {
        state_.history.push_back({g_ref->second, t});
      }
      break;
    case WindowKind::Pair:
      if (g_ref != measurements.end() && g_mov != measurements.end()) {
        state_.history.push_back({relative_marker_pose(g_ref->second, g_mov->second), t});
      }
      break;
    case WindowKind::None:
      break;
  }

  try_commit(t, out);

  // Camera estimate: live against a static reference, frozen at the
  // departure-window average while the reference relocates.
  if (state_.phases.at(state_.reference) == Phase::Static) {
    if (g_ref != measurements.end()) {
      const auto est = camera_pose(state_, g_ref->second, t);
      last_cam_ = est.cam_from_world;
      has_cam_ = true;
    }
  } else if (self_switch_ && tau1_) {
    last_cam_ = compose(*tau1_, state_.anchor);
    has_cam_ = true;
  }
  if (has_cam_) {
    out.cam_from_world = last_cam_;
  }

  // Marker estimates.
  out.markers_from_world[state_.reference] = state_.anchor;
  if (!mover_.empty() && g_mov != measurements.end()) {
    if (self_switch_) {
      if (state_.phases.at(mover_) == Phase::Mobile) {
        out.markers_from_world[mover_] =
            marker_pose_during_motion(state_, g_mov->second, *tau1_);
      } else if (tau1_) {  // stopped, waiting for the window to fill
        out.markers_from_world[mover_] =
            compose(relative_marker_pose(*tau1_, g_mov->second), state_.anchor);
      }
    } else if (g_ref != measurements.end()) {
      out.markers_from_world[mover_] =
          compose(relative_marker_pose(g_ref->second, g_mov->second), state_.anchor);
    }
  }

  out.cycle_index = state_.cycle_index;
  return out;
}

}  // namespace moma
