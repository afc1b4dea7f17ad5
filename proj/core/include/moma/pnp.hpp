#pragma once

#include <optional>
#include <vector>

#include "moma/camera.hpp"
#include "moma/geometry.hpp"

namespace moma {

struct PnpOptions {
  int max_iterations = 100;
  double lambda_init = 1e-3;     // multiplicative damping of diag(J^T J)
  double lambda_up = 10.0;       // on rejected step
  double lambda_down = 0.1;      // on accepted step
  double gradient_tol = 1e-10;   // inf-norm of J^T r
  double step_tol = 1e-12;       // twist step norm
  bool record_costs = false;
};

struct PnpSolution {
  Pose cam_from_marker;
  double rms_px = 0.0;  // sqrt(mean over points of squared pixel distance)
  int iterations = 0;
  bool converged = false;
  std::vector<double> costs;  // accepted-iteration costs when record_costs
};

// observed - predicted, two components per correspondence, in input order.
Eigen::VectorXd reprojection_residuals(const Pose& cam_from_marker, const Observation& obs,
                                       const CameraIntrinsics& intr);

// d residual / d twist for a left-multiplied update exp(delta) * pose,
// twist ordered [translation; rotation].
Eigen::Matrix<double, Eigen::Dynamic, 6> reprojection_jacobian(const Pose& cam_from_marker,
                                                               const Observation& obs,
                                                               const CameraIntrinsics& intr);

// Pose from the marker-plane-to-image homography (normalized DLT), picking
// the decomposition with all corner depths positive. Throws
// DegenerateGeometryError on ill-conditioned input.
Pose init_from_homography(const Observation& obs, const CameraIntrinsics& intr);

// Damped Gauss-Newton refinement from `init`; used both for marker resection
// and for the frame-to-frame least squares of the odometry baseline.
PnpSolution refine(const Observation& obs, const CameraIntrinsics& intr, const Pose& init,
                   const PnpOptions& opts = {});

// Full spatial resection: degeneracy checks, homography init (unless `init`
// given), then refinement.
PnpSolution solve(const Observation& obs, const MarkerBoard& board, const CameraIntrinsics& intr,
                  const std::optional<Pose>& init = std::nullopt, const PnpOptions& opts = {});

// True when the 3D points span less than a plane (rank < 2 after centering).
bool points_collinear(const Observation& obs, double tol = 1e-9);

}  // namespace moma
