#pragma once

#include "tacrot/config.hpp"
#include "tacrot/types.hpp"

#include <vector>

namespace tacrot {

/// Motion of one contact marker relative to the initial frame (position m0),
/// the stable-contact frame (mc) and the current frame (mt).
struct MarkerMotion {
  int id = 0;
  Vec2 m0 = Vec2::Zero();  // initial frame
  Vec2 mc = Vec2::Zero();  // stable-contact frame
  Vec2 mt = Vec2::Zero();  // current frame

  Vec2 d1() const { return mc - m0; }     // motion up to stable contact
  Vec2 d2() const { return mt - m0; }     // motion up to the current frame
  Vec2 d_rel() const { return mt - mc; }  // motion since stable contact
};

/// Motion vectors of the visible contact markers for one frame.
struct MotionVectorSet {
  std::vector<MarkerMotion> items;

  bool empty() const { return items.empty(); }
  size_t size() const { return items.size(); }
};

/// Collects motions for the given contact marker ids; a marker must be
/// visible in all three frames to be included.
MotionVectorSet make_motion_set(const MarkerFrame& first,
                                const MarkerFrame& stable,
                                const MarkerFrame& current,
                                const std::vector<int>& contact_ids);

enum class MotionClass { Stable, Translation, RotationOnset, SmallAreaRotation };

const char* to_string(MotionClass c);

enum class OnsetSignal { No, Yes, NoUsableMarkers };

/// Rotation onset test: true when the median over contact markers of the
/// angle between d1 and d2 exceeds onset_angle_threshold_deg, or the median
/// of |d_rel| exceeds onset_motion_threshold_px. Markers with |d1| below the
/// noise floor are skipped for the angle statistic but kept for the magnitude
/// statistic. An empty set signals the small-area handoff.
OnsetSignal detect_onset(const MotionVectorSet& vectors,
                         const PipelineConfig& config);

/// Translation test: stacks the raw d_rel vectors into an n x 2 matrix and
/// compares its singular values. True iff sigma1/sigma2 exceeds
/// svd_translation_ratio (sigma2 == 0 counts as an infinite ratio). Requires
/// at least two markers with |d_rel| above the noise floor; otherwise false.
bool classify_translation(const MotionVectorSet& vectors,
                          const PipelineConfig& config);

/// Per-frame classification. Evaluation order: translation first (a
/// translating field also trips the onset statistics), then the onset test,
/// then the small-area handoff; Stable otherwise. With the small-area flag
/// set, any marker motion above the noise floor classifies the frame as
/// SmallAreaRotation and the contour tracker takes over.
MotionClass classify_frame(const MotionVectorSet& vectors,
                           const PipelineConfig& config,
                           bool small_area_flag);

}  // namespace tacrot
