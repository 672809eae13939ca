#include "tacrot/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace tacrot {
namespace {

struct Candidate {
  Vec3 normal;
  double offset;
};

size_t count_inliers(const PointCloud& cloud, const Candidate& c,
                     double threshold, std::vector<std::uint8_t>* flags) {
  size_t n = 0;
  for (size_t i = 0; i < cloud.size(); ++i) {
    const bool in = std::abs(c.normal.dot(cloud[i]) - c.offset) <= threshold;
    if (flags) (*flags)[i] = in ? 1 : 0;
    n += in;
  }
  return n;
}

/// Least-squares plane through the flagged points: centroid plus the
/// covariance eigenvector of the smallest eigenvalue.
Candidate refit_plane(const PointCloud& cloud,
                      const std::vector<std::uint8_t>& flags) {
  Vec3 centroid = Vec3::Zero();
  size_t n = 0;
  for (size_t i = 0; i < cloud.size(); ++i) {
    if (!flags[i]) continue;
    centroid += cloud[i];
    ++n;
  }
  centroid /= static_cast<double>(n);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < cloud.size(); ++i) {
    if (!flags[i]) continue;
    const Vec3 q = cloud[i] - centroid;
    cov += q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Vec3 normal = eig.eigenvectors().col(0);  // smallest eigenvalue first
  normal.normalize();
  return {normal, normal.dot(centroid)};
}

double interpolated_quantile(std::vector<double>& v, double p) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

const char* to_string(GeometryStatus s) {
  switch (s) {
    case GeometryStatus::Ok: return "Ok";
    case GeometryStatus::TooFewPoints: return "TooFewPoints";
    case GeometryStatus::DegenerateCloud: return "DegenerateCloud";
  }
  return "?";
}

PlaneFit segment_plane(const PointCloud& cloud, int iterations,
                       double inlier_threshold_m, std::uint64_t seed,
                       double min_inlier_ratio) {
  PlaneFit fit;
  const size_t n = cloud.size();
  if (n < 3) {
    fit.status = GeometryStatus::TooFewPoints;
    return fit;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, n - 1);

  Candidate best{Vec3::UnitZ(), 0.0};
  size_t best_count = 0;
  for (int it = 0; it < iterations; ++it) {
    const size_t i = pick(rng);
    size_t j = pick(rng);
    size_t k = pick(rng);
    if (i == j || i == k || j == k) continue;
    Vec3 normal = (cloud[j] - cloud[i]).cross(cloud[k] - cloud[i]);
    const double len = normal.norm();
    if (len < 1e-12) continue;  // collinear sample
    normal /= len;
    const Candidate c{normal, normal.dot(cloud[i])};
    const size_t count = count_inliers(cloud, c, inlier_threshold_m, nullptr);
    if (count > best_count) {
      best_count = count;
      best = c;
    }
  }

  if (static_cast<double>(best_count) <
      min_inlier_ratio * static_cast<double>(n)) {
    fit.status = GeometryStatus::DegenerateCloud;
    return fit;
  }

  fit.inlier.assign(n, 0);
  count_inliers(cloud, best, inlier_threshold_m, &fit.inlier);
  const Candidate refined = refit_plane(cloud, fit.inlier);
  fit.inlier_count = count_inliers(cloud, refined, inlier_threshold_m,
                                   &fit.inlier);

  // Point the normal at the object side: majority of off-plane points above.
  double vote = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (fit.inlier[i]) continue;
    const double d = refined.normal.dot(cloud[i]) - refined.offset;
    vote += d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  Vec3 normal = refined.normal;
  double offset = refined.offset;
  bool flip = vote < 0.0;
  if (vote == 0.0) {
    // No off-plane points to vote: fix the sign by the dominant component.
    int axis = 0;
    normal.cwiseAbs().maxCoeff(&axis);
    flip = normal(axis) < 0.0;
  }
  if (flip) {
    normal = -normal;
    offset = -offset;
  }
  fit.plane.normal = normal;
  fit.plane.offset = offset;
  return fit;
}

PlaneBasis make_plane_basis(const Plane& plane) {
  PlaneBasis basis;
  basis.origin = plane.normal * plane.offset;
  const Vec3 pick =
      std::abs(plane.normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  basis.u = (pick - pick.dot(plane.normal) * plane.normal).normalized();
  basis.v = plane.normal.cross(basis.u);
  return basis;
}

AxisResult principal_axis(const PointCloud& object_points, const Plane& plane) {
  AxisResult result;
  if (object_points.size() < 2) {
    result.status = GeometryStatus::TooFewPoints;
    return result;
  }
  const PlaneBasis basis = make_plane_basis(plane);

  Eigen::MatrixXd X(static_cast<Eigen::Index>(object_points.size()), 2);
  Vec2 mean = Vec2::Zero();
  for (size_t i = 0; i < object_points.size(); ++i) {
    const Vec2 q = basis.project(object_points[i]);
    X.row(static_cast<Eigen::Index>(i)) = q.transpose();
    mean += q;
  }
  mean /= static_cast<double>(object_points.size());
  X.rowwise() -= mean.transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeFullV);
  if (svd.singularValues()(0) < 1e-12) {
    result.status = GeometryStatus::DegenerateCloud;
    return result;
  }
  Vec2 axis = svd.matrixV().col(0);
  if (axis.x() < 0.0 || (axis.x() == 0.0 && axis.y() < 0.0)) axis = -axis;
  result.axis = axis;
  result.center = mean;
  return result;
}

double object_length(const PointCloud& object_points, const Plane& plane,
                     const Vec2& axis, const Vec2& center,
                     const GeometryConfig& config) {
  if (object_points.empty()) return 0.0;
  const PlaneBasis basis = make_plane_basis(plane);
  std::vector<double> extents;
  extents.reserve(object_points.size());
  for (const Vec3& p : object_points) {
    const Vec2 q = basis.project(p) - center;
    extents.push_back(config.euclidean_length ? q.norm()
                                              : std::abs(q.dot(axis)));
  }
  return 2.0 * interpolated_quantile(extents, config.length_percentile);
}

ObjectGeometry estimate_object_geometry(const PointCloud& cloud,
                                        const GeometryConfig& config,
                                        std::uint64_t seed) {
  ObjectGeometry geo;
  const PlaneFit fit =
      segment_plane(cloud, config.ransac_iterations,
                    config.ransac_inlier_threshold_m, seed,
                    config.min_plane_inlier_ratio);
  if (fit.status != GeometryStatus::Ok) {
    geo.status = fit.status;
    return geo;
  }
  geo.plane = fit.plane;
  for (size_t i = 0; i < cloud.size(); ++i) {
    if (fit.inlier[i]) continue;
    if (fit.plane.signed_distance(cloud[i]) > config.ransac_inlier_threshold_m)
      geo.object_points.push_back(cloud[i]);
  }

  const AxisResult axis = principal_axis(geo.object_points, geo.plane);
  if (axis.status != GeometryStatus::Ok) {
    geo.status = axis.status;
    return geo;
  }
  geo.axis_2d = axis.axis;
  geo.center_2d = axis.center;
  geo.length_m = object_length(geo.object_points, geo.plane, geo.axis_2d,
                               geo.center_2d, config);
  return geo;
}

}  // namespace tacrot
