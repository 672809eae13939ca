#include "tacrot/rotation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace tacrot {
namespace {

double median(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double cross_z(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

const char* to_string(CorStatus s) {
  switch (s) {
    case CorStatus::Ok: return "Ok";
    case CorStatus::TooFewMarkers: return "TooFewMarkers";
    case CorStatus::DegenerateMotion: return "DegenerateMotion";
    case CorStatus::NoUsableMarkers: return "NoUsableMarkers";
  }
  return "?";
}

CorFit estimate_cor(const MotionVectorSet& vectors,
                    const PipelineConfig& config) {
  CorFit fit;
  struct Row {
    Vec2 delta;   // m0 - mt, raw
    double rhs;   // delta . midpoint
  };
  std::vector<Row> rows;
  rows.reserve(vectors.size());
  for (const MarkerMotion& m : vectors.items) {
    const Vec2 delta = m.m0 - m.mt;
    if (delta.norm() <= config.noise_floor_px) continue;
    const Vec2 mid = 0.5 * (m.m0 + m.mt);
    rows.push_back({delta, delta.dot(mid)});
  }
  fit.n_rows = static_cast<int>(rows.size());
  if (rows.empty()) {
    fit.status = CorStatus::NoUsableMarkers;
    return fit;
  }
  if (rows.size() < 2) {
    fit.status = CorStatus::TooFewMarkers;
    return fit;
  }

  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    double scale = 1.0;
    if (!config.weight_rows_by_motion) scale = 1.0 / rows[i].delta.norm();
    A.row(k) = scale * rows[i].delta.transpose();
    b(k) = scale * rows[i].rhs;
  }

  // Parallel motion (pure translation) makes the normal matrix rank one.
  const Eigen::Matrix2d normal = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(normal);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(1);
  if (lo <= 0.0 || hi / lo > 1e6) {
    fit.status = CorStatus::DegenerateMotion;
    return fit;
  }

  const Eigen::Vector2d x = A.colPivHouseholderQr().solve(b);
  fit.cor = x;

  double sq = 0.0;
  for (const Row& r : rows) {
    const double v = (r.delta.dot(fit.cor) - r.rhs) / r.delta.norm();
    sq += v * v;
  }
  fit.residual_px = std::sqrt(sq / static_cast<double>(rows.size()));
  return fit;
}

AngleResult rotation_angle(const MotionVectorSet& vectors, const Vec2& cor,
                           const PipelineConfig& config) {
  AngleResult result;
  std::vector<double> angles;
  angles.reserve(vectors.size());
  for (const MarkerMotion& m : vectors.items) {
    const Vec2 u = m.m0 - cor;
    const Vec2 v = m.mt - cor;
    if (u.norm() < config.cor_center_exclusion_px) continue;
    if (v.norm() < 1e-9) continue;
    const double c = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
    angles.push_back(rad_to_deg(std::acos(c)));
  }
  result.n_used = static_cast<int>(angles.size());
  if (angles.empty()) {
    result.status = CorStatus::NoUsableMarkers;
    return result;
  }
  result.angle_deg = median(angles);
  return result;
}

VoteResult orientation_vote(const MotionVectorSet& vectors, const Vec2& cor,
                            const PipelineConfig& config) {
  VoteResult result;
  for (const MarkerMotion& m : vectors.items) {
    const double c = cross_z(m.m0 - cor, m.mt - m.m0);
    if (c > 0.0)
      ++result.votes_cw;
    else if (c < 0.0)
      ++result.votes_ccw;
  }
  const int hi = std::max(result.votes_cw, result.votes_ccw);
  const int lo = std::min(result.votes_cw, result.votes_ccw);
  if (hi == 0) return result;  // nothing moved: Ambiguous
  const bool decisive =
      lo == 0 || static_cast<double>(hi) / lo >= config.vote_dominance_ratio;
  if (!decisive) return result;
  result.orientation =
      result.votes_cw > result.votes_ccw ? Orientation::CW : Orientation::CCW;
  return result;
}

EstimateResult estimate_rotation(const MotionVectorSet& vectors,
                                 const PipelineConfig& config) {
  EstimateResult out;
  const CorFit fit = estimate_cor(vectors, config);
  out.estimate.n_markers = fit.n_rows;
  out.estimate.residual_px = fit.residual_px;
  if (fit.status != CorStatus::Ok) {
    out.status = fit.status;
    return out;
  }
  out.estimate.cor = fit.cor;

  const AngleResult angle = rotation_angle(vectors, fit.cor, config);
  if (angle.status != CorStatus::Ok) {
    out.status = angle.status;
    return out;
  }
  out.estimate.angle_deg = angle.angle_deg;

  const VoteResult vote = orientation_vote(vectors, fit.cor, config);
  out.estimate.orientation = vote.orientation;
  out.estimate.votes_cw = vote.votes_cw;
  out.estimate.votes_ccw = vote.votes_ccw;
  switch (vote.orientation) {
    case Orientation::CW: out.estimate.signed_angle_deg = angle.angle_deg; break;
    case Orientation::CCW:
      out.estimate.signed_angle_deg = -angle.angle_deg;
      break;
    case Orientation::Ambiguous: out.estimate.signed_angle_deg = 0.0; break;
  }
  return out;
}

const char* to_string(GraspVerdict v) {
  switch (v) {
    case GraspVerdict::StableGrasp: return "StableGrasp";
    case GraspVerdict::RotationalFailure: return "RotationalFailure";
  }
  return "?";
}

StabilityVerdict assess_stability(const RotationEstimate& estimate,
                                  const PipelineConfig& config) {
  StabilityVerdict verdict;
  verdict.measured_angle_deg = estimate.angle_deg;
  if (estimate.orientation != Orientation::Ambiguous &&
      estimate.angle_deg > config.stability_angle_deg)
    verdict.verdict = GraspVerdict::RotationalFailure;
  return verdict;
}

}  // namespace tacrot
