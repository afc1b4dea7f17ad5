#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moma/geometry.hpp"

namespace moma {

using AgentId = std::string;

enum class Phase { Static, Mobile };

const char* to_string(Phase p);

struct TimedPose {
  Pose pose;
  double t = 0.0;
};

// Estimator state. World poses follow the resection convention: `anchor` maps
// world coordinates into the reference marker frame, and relative
// measurements g map marker coordinates into the camera frame, so the camera
// pose in that convention is compose(g, anchor).
struct MomaState {
  Pose anchor;  // reference-marker_from_world at the last committed switch
  double anchor_time = 0.0;
  AgentId camera;
  AgentId reference;                // marker agent the anchor belongs to
  std::map<AgentId, Phase> phases;
  std::vector<TimedPose> history;   // current static-window samples
  int cycle_index = 0;
};

// Marker displacement between two sightings from one static camera pose:
// inverse(g_tau2) * g_tau1.
Pose relative_marker_pose(const Pose& g_tau1, const Pose& g_tau2);

// Translation mean + chordal (sign-aligned normalized quaternion sum)
// rotation mean. Throws EmptyHistoryError on empty input.
Pose average_pose(const std::vector<TimedPose>& history);

// Advance the anchor by the relative pose of the two averaged window
// measurements; bumps the cycle index and clears the window.
MomaState commit_switch(MomaState state, const Pose& g_tau1, const Pose& g_tau2);

struct OdometryEstimate {
  Pose cam_from_world;
  Pose marker_from_world;
  double t = 0.0;
  int cycle_index = 0;
};

// Camera pose against the current anchor: compose(g_t, anchor). Throws
// PhaseError while the reference marker is mobile.
OdometryEstimate camera_pose(const MomaState& state, const Pose& g_t, double t);

// Live pose of the moving marker from a static camera:
// compose(compose(inverse(g_t), g_tau1), anchor). Throws PhaseError unless
// the camera is static and the reference marker mobile.
Pose marker_pose_during_motion(const MomaState& state, const Pose& g_t, const Pose& g_tau1);

struct CommitRecord {
  int cycle = 0;
  double t = 0.0;
  AgentId agent;       // marker whose pose was just committed
  Pose marker_from_world;
};

struct FrameEstimate {
  double t = 0.0;
  int cycle_index = 0;
  std::optional<Pose> cam_from_world;
  std::map<AgentId, Pose> markers_from_world;
  std::optional<CommitRecord> commit;
};

struct EstimatorConfig {
  AgentId camera;
  std::vector<AgentId> markers;
  AgentId reference;       // initial reference marker
  Pose anchor;             // its marker_from_world at start (identity = odometry frame)
  int window_frames = 10;  // static-window length dt, in observation frames
};

// Sequential phase machine implementing the odometry cycle. Feed frames in
// timestamp order from a single writer; measurements are relative
// cam_from_marker poses keyed by marker agent.
//
// Two switch flavours are handled:
//  - the reference marker itself relocates while the camera holds still
//    (single-marker caterpillar): the window before departure and the window
//    after arrival are averaged separately and combined via
//    relative_marker_pose;
//  - a different marker stops and takes over as reference (multi-marker
//    hand-over): each frame of the shared static window yields a
//    camera-independent relative pose, so the camera may keep moving.
class MomaEstimator {
 public:
  explicit MomaEstimator(EstimatorConfig cfg);

  FrameEstimate process(double t, const std::map<AgentId, Phase>& phases,
                        const std::map<AgentId, Pose>& measurements);

  const MomaState& state() const { return state_; }
  int switches() const { return state_.cycle_index; }

 private:
  enum class WindowKind { None, Direct, Pair };

  void on_phase_event(const AgentId& agent, Phase phase, double t);
  WindowKind active_window() const;
  void try_commit(double t, FrameEstimate& out);

  EstimatorConfig cfg_;
  MomaState state_;
  AgentId mover_;                    // marker currently mobile or awaiting commit
  bool awaiting_commit_ = false;
  bool self_switch_ = false;         // mover is the reference itself
  std::optional<Pose> tau1_;         // averaged pre-departure window (self switch)
  std::optional<Pose> pending_tau1_; // committed window reusable as next tau1
  Pose last_cam_;
  bool has_cam_ = false;
};

}  // namespace moma
