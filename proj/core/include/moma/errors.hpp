#pragma once

#include <stdexcept>
#include <string>

namespace moma {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rotation at the cut locus (angle within tolerance of pi); log() is undefined there.
struct DegenerateRotationError : Error {
  using Error::Error;
};

// Point at or behind the optical center cannot be projected.
struct BehindCameraError : Error {
  using Error::Error;
};

// Correspondence geometry too poor to solve (collinear points, singular homography).
struct DegenerateGeometryError : Error {
  using Error::Error;
};

// A schedule or observation sequence violates the movement restrictions.
struct ProtocolError : Error {
  using Error::Error;
};

// An estimator query is invalid for the current phase assignment.
struct PhaseError : Error {
  using Error::Error;
};

// A scripted motion cannot keep the required markers inside the camera frustum.
struct FovError : Error {
  using Error::Error;
};

struct EmptyHistoryError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace moma
