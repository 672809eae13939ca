#pragma once

#include "tacrot/config.hpp"
#include "tacrot/types.hpp"

#include <cstdint>
#include <vector>

namespace tacrot {

enum class GeometryStatus { Ok, TooFewPoints, DegenerateCloud };

const char* to_string(GeometryStatus s);

/// Plane n . p = d with |n| = 1, oriented so the object side is positive.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

struct PlaneFit {
  GeometryStatus status = GeometryStatus::Ok;
  Plane plane;
  std::vector<std::uint8_t> inlier;  // per input point
  size_t inlier_count = 0;
};

/// Table-plane segmentation: 3-point-sample RANSAC maximizing the inlier
/// count at the given point-to-plane distance threshold, refit to the inliers
/// by least squares. Deterministic for a fixed seed. DegenerateCloud when the
/// best inlier ratio stays below min_plane_inlier_ratio.
PlaneFit segment_plane(const PointCloud& cloud, int iterations,
                       double inlier_threshold_m, std::uint64_t seed,
                       double min_inlier_ratio = 0.30);

/// In-plane coordinate frame: orthonormal basis (u, v) spanning the plane.
struct PlaneBasis {
  Vec3 origin = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitY();

  Vec2 project(const Vec3& p) const {
    const Vec3 q = p - origin;
    return {q.dot(u), q.dot(v)};
  }
};

PlaneBasis make_plane_basis(const Plane& plane);

struct AxisResult {
  GeometryStatus status = GeometryStatus::Ok;
  Vec2 axis = Vec2::UnitX();   // unit vector in plane coordinates
  Vec2 center = Vec2::Zero();  // mean of the projected points
};

/// Principal axis of the object's footprint: project the points onto the
/// plane, center by the mean, take the direction with the largest singular
/// value. Collinear points are fine (the axis is the line direction); a
/// degenerate point set (all points coincident) errors. The axis sign is
/// normalized (x >= 0, tie-broken by y) for determinism.
AxisResult principal_axis(const PointCloud& object_points, const Plane& plane);

/// Object length along the axis: twice the length_percentile (default 95%)
/// quantile of |(p - center) . axis| over the object points, which tolerates
/// point-cloud outliers. With euclidean_length the in-plane center distance
/// is used instead of the axis projection.
double object_length(const PointCloud& object_points, const Plane& plane,
                     const Vec2& axis, const Vec2& center,
                     const GeometryConfig& config);

/// Full scene-geometry result for the regrasp step-size reference.
struct ObjectGeometry {
  GeometryStatus status = GeometryStatus::Ok;
  Plane plane;
  PointCloud object_points;  // off-plane points above the table
  Vec2 axis_2d = Vec2::UnitX();
  Vec2 center_2d = Vec2::Zero();
  double length_m = 0.0;
};

/// Composes segmentation, axis and length. Object points are the cloud points
/// above the plane by more than the inlier threshold.
ObjectGeometry estimate_object_geometry(const PointCloud& cloud,
                                        const GeometryConfig& config,
                                        std::uint64_t seed);

}  // namespace tacrot
