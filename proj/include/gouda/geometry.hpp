#pragma once

#include <array>
#include <span>

namespace gouda {

/// Viewing angle in degrees, always reduced into [0, 360).
class ViewAngle {
 public:
  constexpr ViewAngle() = default;
  explicit ViewAngle(double degrees);

  double degrees() const { return degrees_; }

  friend bool operator==(const ViewAngle&, const ViewAngle&) = default;

 private:
  double degrees_ = 0.0;
};

/// Axial folds angles modulo 180, for data where front and back views are
/// indistinguishable (silhouettes).
enum class AngleMode { Full, Axial };

/// Shortest angular separation: [0, 180] in Full mode, [0, 90] in Axial mode.
double circular_view_distance(ViewAngle a, ViewAngle b, AngleMode mode);

using Point3 = std::array<double, 3>;

/// Camera coordinates in meters: x right, y up, z away from the camera.
struct KeypointFrame {
  Point3 left_hip{};
  Point3 right_hip{};
  Point3 left_shoulder{};
  Point3 right_shoulder{};
};

/// Sequence yaw from the per-coordinate median of hips and shoulders.
///
/// Each joint pair gives a ground-plane orientation perpendicular to its
/// right->left vector; the two are averaged on the circle. A subject facing
/// the camera has yaw 0, and rotating the whole body by +t about the y axis
/// (x' = x cos t + z sin t) adds t to the yaw.
///
/// Throws gouda::Error on an empty sequence, non-finite coordinates, or
/// "degenerate keypoints" when a joint pair collapses in the ground plane.
ViewAngle estimate_yaw(std::span<const KeypointFrame> frames);

}  // namespace gouda
