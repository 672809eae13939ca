#pragma once

#include "tacrot/config.hpp"
#include "tacrot/types.hpp"

#include <optional>
#include <vector>

namespace tacrot {

enum class ContourStatus { Ok, NoContact, AxisUndefined, TrackingLost };

const char* to_string(ContourStatus s);

/// Largest connected contact component with its principal-axis statistics.
/// axis_angle_deg is the second-order-moment principal direction in [0, 180)
/// and is meaningful only when eccentricity >= min_eccentricity.
struct ContactContour {
  ContourStatus status = ContourStatus::Ok;
  Mask component;
  Vec2 centroid = Vec2::Zero();
  double axis_angle_deg = 0.0;
  double eccentricity = 1.0;  // sigma_major / sigma_minor, >= 1
  bool axis_defined = false;
};

/// Extracts the contact component from the value channel (per-pixel
/// max(R,G,B)): absolute difference against the no-contact reference,
/// smoothed with a 5x5 box filter, thresholded, largest connected component.
/// Centroid and axis come from the second-order central moments,
///   axis = 0.5 * atan2(2*mu11, mu20 - mu02)  mapped to [0, 180).
/// NoContact when no component reaches min_contour_area_px; AxisUndefined
/// when the component is too round for a stable axis.
ContactContour extract_contour(const IntensityFrame& frame,
                               const IntensityFrame& reference,
                               const PipelineConfig& config);

struct ContourTrack {
  ContourStatus status = ContourStatus::Ok;
  /// Signed rotation per frame relative to the first entry's axis,
  /// clockwise-positive. Frames without a defined axis hold the previous
  /// value.
  std::vector<double> signed_angle_deg;
};

/// Accumulates the principal-axis rotation over a contour sequence. The 180
/// degree axis ambiguity is resolved per step by the increment of minimum
/// absolute value (assumes under 90 degrees of change between frames), so no
/// step ever jumps by more than 90 degrees. TrackingLost when the axis is
/// undefined on more than half of the frames.
ContourTrack contour_rotation(const std::vector<ContactContour>& contours);

/// Maps a step between two axis angles to the equivalent increment in
/// (-90, 90].
double axis_increment_deg(double from_deg, double to_deg);

}  // namespace tacrot
