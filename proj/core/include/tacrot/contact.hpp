#pragma once

#include "tacrot/config.hpp"
#include "tacrot/types.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace tacrot {

enum class ContactKind { None, SoftStable, HardStable };

/// Stable-contact designation for a sequence prefix, with the contact region
/// and the contact/non-contact marker split once established.
struct ContactState {
  ContactKind kind = ContactKind::None;
  int stable_frame_index = -1;     // position in the sequence, -1 when None
  Mask contact_mask;               // empty when detection was marker-only
  std::vector<int> contact_marker_ids;      // sorted
  std::vector<int> non_contact_marker_ids;  // sorted
  bool small_area = false;  // too few contact markers; contour mode handles it
};

/// Scans the prefix for the first frame at or after soft_stable_window where
/// the change in the mean frame-to-frame marker step length drops below
/// soft_stable_delta_px (soft stable contact), falling back to the frame at
/// hard_stable_frame (hard stable contact). Returns None when the prefix is
/// shorter than that and no soft criterion was met. Deterministic and
/// prefix-monotone: a longer prefix never changes an already-returned state.
/// Indices are positions within the span, not MarkerFrame::frame_index.
ContactState detect_stable_contact(std::span<const MarkerFrame> frames,
                                   const PipelineConfig& config);

/// Contact region from illumination change: per-pixel max over color channels
/// of the absolute difference, thresholded, opened/closed with a 3x3
/// neighborhood, restricted to the largest connected component.
/// Throws std::invalid_argument on dimension mismatch.
Mask contact_region(const IntensityFrame& before,
                    const IntensityFrame& at_stable,
                    const PipelineConfig& config);

struct MarkerPartition {
  std::vector<int> contact_ids;      // sorted
  std::vector<int> non_contact_ids;  // sorted
  bool small_area = false;
};

/// Splits the stable frame's visible markers by mask containment. Raises the
/// small-area flag when the mask is empty or fewer than min_contact_markers
/// fall inside it.
MarkerPartition partition_markers(const MarkerFrame& stable_frame,
                                  const Mask& mask,
                                  const PipelineConfig& config);

/// Marker-only fallback when no intensity frames exist: contact markers are
/// the visible markers whose displacement between the first and the stable
/// frame exceeds the 60th percentile of all such displacements.
MarkerPartition partition_markers_by_motion(const MarkerFrame& first_frame,
                                            const MarkerFrame& stable_frame,
                                            const PipelineConfig& config);

/// Full contact-detection pass over a prefix: stable state, then the marker
/// partition from images when provided (before = images[0], at the stable
/// frame) or from the motion fallback otherwise.
ContactState detect_contact(std::span<const MarkerFrame> frames,
                            std::span<const IntensityFrame> images,
                            const PipelineConfig& config);

}  // namespace tacrot
