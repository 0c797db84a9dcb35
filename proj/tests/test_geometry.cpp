#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gouda/error.hpp"
#include "gouda/geometry.hpp"

using namespace gouda;

namespace {

KeypointFrame facing_camera() {
  KeypointFrame f;
  f.left_hip = {0.1, 0.9, 2.0};
  f.right_hip = {-0.1, 0.9, 2.0};
  f.left_shoulder = {0.15, 1.4, 2.0};
  f.right_shoulder = {-0.15, 1.4, 2.0};
  return f;
}

// x' = x cos t + z sin t, z' = -x sin t + z cos t around a vertical axis
// through `cx, cz`.
Point3 rotate(const Point3& p, double deg, double cx, double cz) {
  const double t = deg * std::numbers::pi / 180.0;
  const double x = p[0] - cx, z = p[2] - cz;
  return {cx + x * std::cos(t) + z * std::sin(t), p[1], cz - x * std::sin(t) + z * std::cos(t)};
}

KeypointFrame rotate(const KeypointFrame& f, double deg, double cx = 0.0, double cz = 2.0) {
  return {rotate(f.left_hip, deg, cx, cz), rotate(f.right_hip, deg, cx, cz), rotate(f.left_shoulder, deg, cx, cz),
          rotate(f.right_shoulder, deg, cx, cz)};
}

double angular_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

}  // namespace

TEST_CASE("view angles wrap into [0, 360)") {
  CHECK(ViewAngle(370).degrees() == doctest::Approx(10));
  CHECK(ViewAngle(-90).degrees() == doctest::Approx(270));
  CHECK(ViewAngle(360).degrees() == 0.0);
  CHECK(ViewAngle(-1e-20).degrees() < 360.0);
}

TEST_CASE("circular view distance examples") {
  CHECK(circular_view_distance(ViewAngle(350), ViewAngle(10), AngleMode::Full) == doctest::Approx(20));
  CHECK(circular_view_distance(ViewAngle(0), ViewAngle(180), AngleMode::Axial) == doctest::Approx(0));
  CHECK(circular_view_distance(ViewAngle(90), ViewAngle(120), AngleMode::Full) == doctest::Approx(30));
  CHECK(circular_view_distance(ViewAngle(10), ViewAngle(170), AngleMode::Axial) == doctest::Approx(20));
}

TEST_CASE("circular view distance properties on random angles") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> angle(-720.0, 720.0);
  for (int i = 0; i < 2000; ++i) {
    const ViewAngle a(angle(gen)), b(angle(gen)), c(angle(gen));
    for (AngleMode mode : {AngleMode::Full, AngleMode::Axial}) {
      const double ab = circular_view_distance(a, b, mode);
      CHECK(ab == circular_view_distance(b, a, mode));
      CHECK(circular_view_distance(a, a, mode) == 0.0);
      CHECK(ab >= 0.0);
      CHECK(ab <= (mode == AngleMode::Full ? 180.0 : 90.0));
    }
    const double ab = circular_view_distance(a, b, AngleMode::Full);
    const double bc = circular_view_distance(b, c, AngleMode::Full);
    const double ac = circular_view_distance(a, c, AngleMode::Full);
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("yaw of a subject facing the camera is zero") {
  const std::vector<KeypointFrame> frames{facing_camera()};
  CHECK(angular_gap(estimate_yaw(frames).degrees(), 0.0) < 1e-9);
}

TEST_CASE("rotating the body by 90 degrees about its centre gives yaw 90") {
  const std::vector<KeypointFrame> frames{rotate(facing_camera(), 90.0)};
  CHECK(angular_gap(estimate_yaw(frames).degrees(), 90.0) < 1e-9);
}

TEST_CASE("median discards a single outlier frame") {
  KeypointFrame outlier = facing_camera();
  outlier.left_hip[0] += 10.0;
  const std::vector<KeypointFrame> frames{facing_camera(), outlier, facing_camera()};
  CHECK(angular_gap(estimate_yaw(frames).degrees(), 0.0) < 1e-9);
}

TEST_CASE("even frame counts use the mean of the two central values") {
  // Left hip x: 0.1, 0.1, 0.3, 0.3 -> median 0.2, still facing the camera.
  KeypointFrame wide = facing_camera();
  wide.left_hip[0] = 0.3;
  const std::vector<KeypointFrame> frames{facing_camera(), wide, facing_camera(), wide};
  CHECK(angular_gap(estimate_yaw(frames).degrees(), 0.0) < 1e-9);
  // Left joints at z 2.0 and 2.2: the median 2.1 tilts both pairs.
  KeypointFrame a = facing_camera(), b = facing_camera();
  a.left_hip[2] = 2.0;
  b.left_hip[2] = 2.2;
  a.left_shoulder[2] = 2.0;
  b.left_shoulder[2] = 2.2;
  // right->left in (x, z): hips (0.2, 0.1), shoulders (0.3, 0.1).
  const std::vector<KeypointFrame> two{a, b};
  const double hips = std::atan2(-0.1, 0.2) * 180.0 / std::numbers::pi;
  const double shoulders = std::atan2(-0.1, 0.3) * 180.0 / std::numbers::pi;
  const double hx = std::sin(hips * std::numbers::pi / 180) + std::sin(shoulders * std::numbers::pi / 180);
  const double hz = std::cos(hips * std::numbers::pi / 180) + std::cos(shoulders * std::numbers::pi / 180);
  const double expected = std::atan2(hx, hz) * 180.0 / std::numbers::pi + 360.0;
  CHECK(angular_gap(estimate_yaw(two).degrees(), expected) < 1e-9);
}

// The per-coordinate median only commutes with rotation when it is linear in
// the frames (one or two frames), so equivariance is checked there.
TEST_CASE("yaw is rotation equivariant, translation and scale invariant") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02), deg(0.0, 360.0), shift(-3.0, 3.0), scale(0.2, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<KeypointFrame> frames;
    const int n_frames = 1 + trial % 2;
    for (int f = 0; f < n_frames; ++f) {
      KeypointFrame k = facing_camera();
      for (Point3* p : {&k.left_hip, &k.right_hip, &k.left_shoulder, &k.right_shoulder})
        for (double& c : *p) c += jitter(gen);
      frames.push_back(k);
    }
    const double base = estimate_yaw(frames).degrees();

    const double theta = deg(gen);
    std::vector<KeypointFrame> rotated;
    for (const auto& k : frames) rotated.push_back(rotate(k, theta, shift(gen), shift(gen)));
    CHECK(angular_gap(estimate_yaw(rotated).degrees(), base + theta) < 1e-9);

    const double s = scale(gen);
    const Point3 t{shift(gen), shift(gen), shift(gen)};
    std::vector<KeypointFrame> moved;
    for (auto k : frames) {
      for (Point3* p : {&k.left_hip, &k.right_hip, &k.left_shoulder, &k.right_shoulder})
        for (int c = 0; c < 3; ++c) (*p)[c] = s * (*p)[c] + t[c];
      moved.push_back(k);
    }
    CHECK(angular_gap(estimate_yaw(moved).degrees(), base) < 1e-9);
  }
}

TEST_CASE("translation and scale invariance hold for longer noisy sequences") {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05), shift(-3.0, 3.0), scale(0.2, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<KeypointFrame> frames;
    for (int f = 0; f < 3 + trial % 6; ++f) {
      KeypointFrame k = rotate(facing_camera(), 37.0 * trial);
      for (Point3* p : {&k.left_hip, &k.right_hip, &k.left_shoulder, &k.right_shoulder})
        for (double& c : *p) c += jitter(gen);
      frames.push_back(k);
    }
    const double base = estimate_yaw(frames).degrees();
    const double s = scale(gen);
    const Point3 t{shift(gen), shift(gen), shift(gen)};
    for (auto& k : frames)
      for (Point3* p : {&k.left_hip, &k.right_hip, &k.left_shoulder, &k.right_shoulder})
        for (int c = 0; c < 3; ++c) (*p)[c] = s * (*p)[c] + t[c];
    CHECK(angular_gap(estimate_yaw(frames).degrees(), base) < 1e-9);
  }
}

TEST_CASE("degenerate or missing keypoints are rejected") {
  KeypointFrame f = facing_camera();
  f.right_hip = {f.left_hip[0], 0.0, f.left_hip[2]};  // coincide in the ground plane
  const std::vector<KeypointFrame> frames{f};
  CHECK_THROWS_WITH_AS(estimate_yaw(frames), doctest::Contains("degenerate keypoints"), Error);
  CHECK_THROWS_AS(estimate_yaw(std::vector<KeypointFrame>{}), Error);
  KeypointFrame bad = facing_camera();
  bad.left_shoulder[1] = std::nan("");
  CHECK_THROWS_AS(estimate_yaw(std::vector<KeypointFrame>{bad}), Error);
}
