#pragma once

#include "tacrot/config.hpp"
#include "tacrot/contact.hpp"
#include "tacrot/motion.hpp"
#include "tacrot/rotation.hpp"
#include "tacrot/types.hpp"

#include <string>
#include <vector>

namespace tacrot {

/// Per-frame pipeline output, one row of the estimate CSV.
struct FrameEstimate {
  int frame_index = 0;
  double time_s = 0.0;
  MotionClass cls = MotionClass::Stable;
  double angle_deg = 0.0;
  double signed_angle_deg = 0.0;
  Orientation orientation = Orientation::Ambiguous;
  Vec2 cor = Vec2::Zero();
  bool cor_valid = false;
  int votes_cw = 0;
  int votes_ccw = 0;
  double residual_px = 0.0;
  int n_markers = 0;
  bool contour_mode = false;
};

/// Whole-sequence pipeline result: contact state, detected onset, per-frame
/// estimates and the final stability verdict (peak measured angle; a grasp
/// that ever exceeded the threshold with a decisive orientation is a
/// rotational failure).
struct SequenceResult {
  ContactState contact;
  bool used_contour = false;
  int onset_frame = -1;  // first frame classified as rotating, -1 if none
  double peak_angle_deg = 0.0;
  Orientation peak_orientation = Orientation::Ambiguous;
  StabilityVerdict verdict;
  std::vector<FrameEstimate> frames;
  /// End of the lifting window: first frame where over 70% of the contact
  /// markers lost visibility (object detached), or the sequence end.
  int lift_end_frame = -1;
};

/// Runs contact detection, per-frame classification and rotation measurement
/// (marker least squares, or contour tracking in small-area mode) over one
/// grasp episode. Once onset is detected the angle is measured on every later
/// frame. Intensity frames are optional; without them the marker-motion
/// contact fallback is used.
SequenceResult run_pipeline(const GraspEpisode& episode,
                            const PipelineConfig& config);

/// CSV header + rows for the per-frame estimates:
/// frame,t,angle_deg,signed_angle_deg,cor_x,cor_y,orientation,votes_cw,
/// votes_ccw,residual,class
std::string estimates_csv(const SequenceResult& result);

}  // namespace tacrot
