#include "gouda/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gouda/error.hpp"

namespace gouda {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double wrap(double value, double period) {
  double r = std::fmod(value, period);
  if (r < 0.0) r += period;
  // fmod of a tiny negative value can round up to exactly `period`.
  if (r >= period) r = 0.0;
  return r;
}

double median(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Point3 median_point(std::span<const KeypointFrame> frames, Point3 KeypointFrame::*joint) {
  Point3 out{};
  std::vector<double> coord(frames.size());
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < frames.size(); ++i) coord[i] = (frames[i].*joint)[c];
    out[c] = median(coord);
  }
  return out;
}

// Unit ground-plane orientation (x, z) of a right->left joint pair.
std::array<double, 2> pair_orientation(const Point3& left, const Point3& right) {
  const double rx = left[0] - right[0];
  const double rz = left[2] - right[2];
  const double norm = std::hypot(rx, rz);
  if (!(norm > 1e-12)) throw Error("degenerate keypoints");
  return {-rz / norm, rx / norm};
}

}  // namespace

ViewAngle::ViewAngle(double degrees) : degrees_(wrap(degrees, 360.0)) {}

double circular_view_distance(ViewAngle a, ViewAngle b, AngleMode mode) {
  const double period = mode == AngleMode::Full ? 360.0 : 180.0;
  const double delta = wrap(std::abs(wrap(a.degrees(), period) - wrap(b.degrees(), period)), period);
  return std::min(delta, period - delta);
}

ViewAngle estimate_yaw(std::span<const KeypointFrame> frames) {
  if (frames.empty()) throw Error("estimate_yaw: empty keypoint sequence");
  for (const auto& f : frames) {
    for (const Point3* p : {&f.left_hip, &f.right_hip, &f.left_shoulder, &f.right_shoulder}) {
      for (double v : *p) {
        if (!std::isfinite(v)) throw Error("estimate_yaw: non-finite keypoint coordinate");
      }
    }
  }
  const auto hips = pair_orientation(median_point(frames, &KeypointFrame::left_hip),
                                     median_point(frames, &KeypointFrame::right_hip));
  const auto shoulders = pair_orientation(median_point(frames, &KeypointFrame::left_shoulder),
                                          median_point(frames, &KeypointFrame::right_shoulder));
  // Circular mean of two unit directions = direction of their sum.
  const double x = hips[0] + shoulders[0];
  const double z = hips[1] + shoulders[1];
  if (!(std::hypot(x, z) > 1e-12)) throw Error("degenerate keypoints");
  return ViewAngle(std::atan2(x, z) * kRadToDeg);
}

}  // namespace gouda
