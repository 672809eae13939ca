#include "tacrot/motion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace tacrot {
namespace {

double median(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Angle between two vectors in degrees, arccos of the normalized dot product.
double angle_between_deg(const Vec2& a, const Vec2& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return rad_to_deg(std::acos(c));
}

}  // namespace

MotionVectorSet make_motion_set(const MarkerFrame& first,
                                const MarkerFrame& stable,
                                const MarkerFrame& current,
                                const std::vector<int>& contact_ids) {
  MotionVectorSet set;
  set.items.reserve(contact_ids.size());
  for (int id : contact_ids) {
    const Marker* a = first.find(id);
    const Marker* b = stable.find(id);
    const Marker* c = current.find(id);
    if (!a || !b || !c) continue;
    if (!a->visible || !b->visible || !c->visible) continue;
    set.items.push_back({id, a->pos(), b->pos(), c->pos()});
  }
  return set;
}

const char* to_string(MotionClass c) {
  switch (c) {
    case MotionClass::Stable: return "Stable";
    case MotionClass::Translation: return "Translation";
    case MotionClass::RotationOnset: return "RotationOnset";
    case MotionClass::SmallAreaRotation: return "SmallAreaRotation";
  }
  return "?";
}

OnsetSignal detect_onset(const MotionVectorSet& vectors,
                         const PipelineConfig& config) {
  if (vectors.empty()) return OnsetSignal::NoUsableMarkers;

  std::vector<double> angles;
  std::vector<double> magnitudes;
  angles.reserve(vectors.size());
  magnitudes.reserve(vectors.size());
  for (const MarkerMotion& m : vectors.items) {
    const Vec2 d1 = m.d1();
    const Vec2 d2 = m.d2();
    magnitudes.push_back(m.d_rel().norm());
    if (d1.norm() < config.noise_floor_px || d2.norm() < 1e-9) continue;
    angles.push_back(angle_between_deg(d1, d2));
  }
  if (!angles.empty() && median(angles) > config.onset_angle_threshold_deg)
    return OnsetSignal::Yes;
  if (median(magnitudes) > config.onset_motion_threshold_px)
    return OnsetSignal::Yes;
  return OnsetSignal::No;
}

bool classify_translation(const MotionVectorSet& vectors,
                          const PipelineConfig& config) {
  std::vector<Vec2> moving;
  for (const MarkerMotion& m : vectors.items) {
    const Vec2 d = m.d_rel();
    if (d.norm() > config.noise_floor_px) moving.push_back(d);
  }
  if (moving.size() < 2) return false;

  Eigen::MatrixXd A(static_cast<Eigen::Index>(moving.size()), 2);
  for (size_t i = 0; i < moving.size(); ++i)
    A.row(static_cast<Eigen::Index>(i)) = moving[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const double s1 = svd.singularValues()(0);
  const double s2 = svd.singularValues()(1);
  if (s2 <= 1e-12 * std::max(1.0, s1)) return true;
  return s1 / s2 > config.svd_translation_ratio;
}

MotionClass classify_frame(const MotionVectorSet& vectors,
                           const PipelineConfig& config,
                           bool small_area_flag) {
  if (classify_translation(vectors, config)) return MotionClass::Translation;
  if (small_area_flag) {
    for (const MarkerMotion& m : vectors.items)
      if (m.d_rel().norm() > config.noise_floor_px)
        return MotionClass::SmallAreaRotation;
    return MotionClass::Stable;
  }
  switch (detect_onset(vectors, config)) {
    case OnsetSignal::Yes: return MotionClass::RotationOnset;
    case OnsetSignal::NoUsableMarkers: return MotionClass::SmallAreaRotation;
    case OnsetSignal::No: break;
  }
  return MotionClass::Stable;
}

}  // namespace tacrot
