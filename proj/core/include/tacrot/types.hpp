#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tacrot {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Image convention used everywhere in this library: origin at the top-left
// corner, x to the right, y down. Signed angles are clockwise-positive on
// screen (a positive z cross product in this frame is a clockwise turn).
// Units: pixels in tactile space, meters in scene space, degrees for reported
// angles, radians internally.

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// One tracked marker in one tactile frame. Dropout is represented with the
/// visible flag, never by omitting the marker, so correspondence across frames
/// is positional and needs no matching step.
struct Marker {
  int id = 0;
  double x = 0.0;  // px
  double y = 0.0;  // px
  bool visible = true;

  Vec2 pos() const { return {x, y}; }
};

/// Timestamped set of tracked marker positions from one tactile image.
/// Within a sequence, frame_index strictly increases, time_s is
/// non-decreasing, and the marker id set is constant.
struct MarkerFrame {
  int frame_index = 0;
  double time_s = 0.0;
  std::vector<Marker> markers;

  const Marker* find(int id) const {
    for (const auto& m : markers)
      if (m.id == id) return &m;
    return nullptr;
  }
};

/// 8-bit RGB image stored as three planes (R, G, B), each row-major
/// width*height.
struct IntensityFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> r, g, b;

  IntensityFrame() = default;
  IntensityFrame(int w, int h)
      : width(w), height(h),
        r(static_cast<size_t>(w) * h, 0),
        g(static_cast<size_t>(w) * h, 0),
        b(static_cast<size_t>(w) * h, 0) {}

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  bool same_size(const IntensityFrame& o) const {
    return width == o.width && height == o.height;
  }
};

/// 3D points in meters.
struct PointCloud {
  std::vector<Vec3> points;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  Vec3& operator[](size_t i) { return points[i]; }
  const Vec3& operator[](size_t i) const { return points[i]; }
  void push_back(const Vec3& p) { points.push_back(p); }
  auto begin() { return points.begin(); }
  auto end() { return points.end(); }
  auto begin() const { return points.begin(); }
  auto end() const { return points.end(); }
};

/// Per-frame ground truth paired with a marker sequence. angle_deg is signed,
/// clockwise-positive in image coordinates; rotating marks frames where the
/// object has measurably rotated.
struct GroundTruthFrame {
  int frame_index = 0;
  double angle_deg = 0.0;
  bool rotating = false;
};

/// One grasp/lift trial: the marker sequence, optional ground truth, and
/// optional rendered tactile images.
struct GraspEpisode {
  std::vector<MarkerFrame> frames;
  std::vector<GroundTruthFrame> ground_truth;       // may be empty
  std::vector<IntensityFrame> intensity_frames;     // may be empty
  std::string name;
};

/// Boolean pixel grid, row-major, 1 = set.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {}

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  bool at(int x, int y) const { return data[idx(x, y)] != 0; }
  void set(int x, int y, bool v) { data[idx(x, y)] = v ? 1 : 0; }
  bool empty() const { return count() == 0; }
  size_t count() const {
    size_t n = 0;
    for (auto v : data) n += (v != 0);
    return n;
  }
  bool contains(double px, double py) const {
    int xi = static_cast<int>(px + 0.5);
    int yi = static_cast<int>(py + 0.5);
    if (xi < 0 || yi < 0 || xi >= width || yi >= height) return false;
    return at(xi, yi);
  }
};

enum class Orientation { CW, CCW, Ambiguous };

inline const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::CW: return "cw";
    case Orientation::CCW: return "ccw";
    default: return "ambiguous";
  }
}

}  // namespace tacrot
