#include "tacrot/config.hpp"

namespace tacrot {

bool PipelineConfig::valid(std::string* why) const {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (soft_stable_window <= 0) return fail("soft_stable_window must be positive");
  if (hard_stable_frame <= 0) return fail("hard_stable_frame must be positive");
  if (soft_stable_delta_px <= 0) return fail("soft_stable_delta_px must be positive");
  if (onset_angle_threshold_deg <= 0)
    return fail("onset_angle_threshold_deg must be positive");
  if (onset_motion_threshold_px <= 0)
    return fail("onset_motion_threshold_px must be positive");
  if (stability_angle_deg <= 0) return fail("stability_angle_deg must be positive");
  if (vote_dominance_ratio <= 1.0) return fail("vote_dominance_ratio must exceed 1");
  if (svd_translation_ratio <= 1.0) return fail("svd_translation_ratio must exceed 1");
  if (contact_intensity_threshold <= 0)
    return fail("contact_intensity_threshold must be positive");
  if (min_contact_markers <= 0) return fail("min_contact_markers must be positive");
  if (noise_floor_px <= 0) return fail("noise_floor_px must be positive");
  if (cor_center_exclusion_px <= 0)
    return fail("cor_center_exclusion_px must be positive");
  if (min_eccentricity < 1.0) return fail("min_eccentricity must be at least 1");
  if (min_contour_area_px <= 0) return fail("min_contour_area_px must be positive");
  if (contour_onset_deg <= 0) return fail("contour_onset_deg must be positive");
  return true;
}

}  // namespace tacrot
