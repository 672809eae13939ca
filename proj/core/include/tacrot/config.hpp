#pragma once

#include <string>

namespace tacrot {

/// Thresholds and switches for the tactile rotation pipeline. Defaults are
/// calibrated for 30 fps sequences; other frame rates are accepted but the
/// frame-count thresholds keep their meaning in frames, not seconds.
struct PipelineConfig {
  // Stable-contact detection.
  int soft_stable_window = 10;    // earliest frame for a soft stable contact
  int hard_stable_frame = 30;     // unconditional stable contact (~1 s at 30 fps)
  double soft_stable_delta_px = 0.1;  // bound on frame-to-frame change of the
                                      // mean marker step length

  // Rotation onset.
  double onset_angle_threshold_deg = 10.0;
  double onset_motion_threshold_px = 3.0;

  // Grasp stability.
  double stability_angle_deg = 5.0;

  // Orientation vote: majority wins only when max(votes)/min(votes) reaches
  // this ratio, otherwise the frame is Ambiguous (static-grasp false-positive
  // rejection).
  double vote_dominance_ratio = 2.0;

  // Translation test: sigma1/sigma2 of the stacked relative motions.
  double svd_translation_ratio = 4.0;

  // Contact region extraction.
  int contact_intensity_threshold = 25;  // 8-bit counts
  int min_contact_markers = 6;

  // Motions below this magnitude are treated as sensor noise.
  double noise_floor_px = 0.5;

  // Markers closer than this to the estimated center of rotation are excluded
  // from the per-marker angle computation.
  double cor_center_exclusion_px = 2.0;

  // Least-squares rows weighted by motion magnitude when true; equal per-row
  // weight when false.
  bool weight_rows_by_motion = true;

  // Contour (small contact area) mode.
  double min_eccentricity = 1.2;
  int min_contour_area_px = 50;
  double contour_onset_deg = 2.0;  // axis change that counts as rotation onset

  bool valid(std::string* why = nullptr) const;
};

/// Scene geometry (plane segmentation and object length) parameters.
struct GeometryConfig {
  int ransac_iterations = 500;
  double ransac_inlier_threshold_m = 0.005;
  double min_plane_inlier_ratio = 0.30;
  double length_percentile = 0.95;
  // Distance measured along the principal axis by default; the Euclidean
  // center distance is available as an alternative reading.
  bool euclidean_length = false;
};

/// Regrasp controller parameters. The step schedule itself (0.4 L first, L/6
/// afterwards, halved on every orientation flip) is fixed in the controller.
struct ControllerConfig {
  int max_regrasps = 10;
  bool flip_direction = false;   // invert the orientation -> direction mapping
  double edge_margin_ratio = 0.05;  // offsets clamped to +-0.5*L*(1 - margin)
  double lift_height_m = 0.05;
  double hold_time_s = 3.0;
};

struct Config {
  PipelineConfig pipeline;
  GeometryConfig geometry;
  ControllerConfig controller;
};

}  // namespace tacrot
