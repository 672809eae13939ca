#pragma once

#include "tacrot/config.hpp"
#include "tacrot/motion.hpp"
#include "tacrot/types.hpp"

namespace tacrot {

/// Rotation measurement for one frame: center of rotation, unsigned angle,
/// orientation from the moment majority vote, and the signed angle derived
/// from both (clockwise-positive).
struct RotationEstimate {
  Vec2 cor = Vec2::Zero();
  double angle_deg = 0.0;         // unsigned magnitude, [0, 180)
  Orientation orientation = Orientation::Ambiguous;
  double signed_angle_deg = 0.0;  // +angle for CW, -angle for CCW, 0 ambiguous
  int votes_cw = 0;
  int votes_ccw = 0;
  double residual_px = 0.0;  // RMS perpendicularity residual at the solution
  int n_markers = 0;
};

enum class CorStatus { Ok, TooFewMarkers, DegenerateMotion, NoUsableMarkers };

const char* to_string(CorStatus s);

struct CorFit {
  CorStatus status = CorStatus::Ok;
  Vec2 cor = Vec2::Zero();
  double residual_px = 0.0;
  int n_rows = 0;
};

/// Least-squares center of rotation over the motion-vector perpendicular
/// bisectors. Each marker with motion |mt - m0| above the noise floor
/// contributes the row
///   [dx, dy] . [x_c, y_c]^T = dx*x_m + dy*y_m
/// with (dx, dy) = m0 - mt and (x_m, y_m) the motion midpoint; that is the
/// undivided perpendicularity condition, free of the vertical-motion
/// singularity of the slope form. Rows carry their natural |m0 - mt| weight
/// unless weight_rows_by_motion is off, in which case they are normalized to
/// unit length so every marker counts equally. Solved by orthogonal
/// factorization. The residual is the RMS of the per-row perpendicularity
/// violation divided by the row's motion magnitude, in pixels.
///
/// DegenerateMotion when the 2x2 normal matrix has condition number above
/// 1e6 (all motions parallel, i.e. pure translation).
CorFit estimate_cor(const MotionVectorSet& vectors,
                    const PipelineConfig& config);

struct AngleResult {
  CorStatus status = CorStatus::Ok;
  double angle_deg = 0.0;
  int n_used = 0;
};

/// Rotation angle about the given center: the median over markers of
///   theta_i = arccos(<cor->m0, cor->mt> / (|cor->m0| |cor->mt|)),
/// in degrees. Markers whose initial position lies within
/// cor_center_exclusion_px of the center are excluded (the angle is undefined
/// there); NoUsableMarkers when every marker is excluded.
AngleResult rotation_angle(const MotionVectorSet& vectors, const Vec2& cor,
                           const PipelineConfig& config);

struct VoteResult {
  Orientation orientation = Orientation::Ambiguous;
  int votes_cw = 0;
  int votes_ccw = 0;
};

/// Orientation by majority vote over the per-marker moments
///   cross_z(m0 - cor, mt - m0).
/// Positive cross_z in the y-down image frame is clockwise. The majority side
/// wins only when max(votes)/min(votes) >= vote_dominance_ratio; similar
/// group sizes mean a static grasp mistaken for rotation, reported Ambiguous.
VoteResult orientation_vote(const MotionVectorSet& vectors, const Vec2& cor,
                            const PipelineConfig& config);

/// Composes fit, angle and vote into a RotationEstimate. Status is Ok only
/// when both the fit and the angle computation succeeded.
struct EstimateResult {
  CorStatus status = CorStatus::Ok;
  RotationEstimate estimate;
};
EstimateResult estimate_rotation(const MotionVectorSet& vectors,
                                 const PipelineConfig& config);

enum class GraspVerdict { StableGrasp, RotationalFailure };

const char* to_string(GraspVerdict v);

struct StabilityVerdict {
  GraspVerdict verdict = GraspVerdict::StableGrasp;
  double measured_angle_deg = 0.0;  // unsigned
};

/// RotationalFailure iff the orientation vote is decisive and the measured
/// angle exceeds stability_angle_deg. An Ambiguous vote vetoes the angle no
/// matter its size.
StabilityVerdict assess_stability(const RotationEstimate& estimate,
                                  const PipelineConfig& config);

}  // namespace tacrot
