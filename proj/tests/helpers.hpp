#pragma once

#include "tacrot/motion.hpp"
#include "tacrot/types.hpp"

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace tacrot::testing {

/// Clockwise-on-screen rotation in the y-down image frame.
inline Vec2 rotate_cw(const Vec2& p, const Vec2& cor, double angle_deg) {
  const double a = deg_to_rad(angle_deg);
  const double c = std::cos(a), s = std::sin(a);
  const Vec2 q = p - cor;
  return cor + Vec2(c * q.x() - s * q.y(), s * q.x() + c * q.y());
}

/// Motion set for a rigid rotation: m0 = mc = start, mt = rotated.
inline MotionVectorSet rotation_set(const std::vector<Vec2>& points,
                                    const Vec2& cor, double angle_deg,
                                    double noise_sigma = 0.0,
                                    std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise_sigma);
  MotionVectorSet set;
  int id = 0;
  for (const Vec2& p : points) {
    Vec2 q = rotate_cw(p, cor, angle_deg);
    if (noise_sigma > 0.0) q += Vec2(gauss(rng), gauss(rng));
    set.items.push_back({id++, p, p, q});
  }
  return set;
}

inline std::vector<Vec2> grid_points(int cols, int rows, const Vec2& origin,
                                     double spacing) {
  std::vector<Vec2> pts;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      pts.emplace_back(origin.x() + c * spacing, origin.y() + r * spacing);
  return pts;
}

inline MarkerFrame make_frame(int index, const std::vector<Vec2>& positions,
                              double fps = 30.0) {
  MarkerFrame f;
  f.frame_index = index;
  f.time_s = index / fps;
  int id = 0;
  for (const Vec2& p : positions)
    f.markers.push_back({id++, p.x(), p.y(), true});
  return f;
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    namespace fs = std::filesystem;
    path_ = fs::temp_directory_path() /
            ("tacrot_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace tacrot::testing
