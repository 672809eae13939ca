#include "tacrot/contour.hpp"

#include "tacrot/imageops.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace tacrot {

const char* to_string(ContourStatus s) {
  switch (s) {
    case ContourStatus::Ok: return "Ok";
    case ContourStatus::NoContact: return "NoContact";
    case ContourStatus::AxisUndefined: return "AxisUndefined";
    case ContourStatus::TrackingLost: return "TrackingLost";
  }
  return "?";
}

ContactContour extract_contour(const IntensityFrame& frame,
                               const IntensityFrame& reference,
                               const PipelineConfig& config) {
  if (!frame.same_size(reference))
    throw std::invalid_argument("extract_contour: frame size mismatch");

  const auto vf = value_channel(frame);
  const auto vr = value_channel(reference);
  std::vector<std::uint8_t> diff(vf.size());
  for (size_t i = 0; i < diff.size(); ++i)
    diff[i] = static_cast<std::uint8_t>(std::abs(int(vf[i]) - int(vr[i])));
  diff = box_filter(diff, frame.width, frame.height, 5);

  Mask m = threshold_mask(diff, frame.width, frame.height,
                          config.contact_intensity_threshold);
  m = largest_component(m);

  ContactContour out;
  if (m.count() < static_cast<size_t>(config.min_contour_area_px)) {
    out.status = ContourStatus::NoContact;
    return out;
  }
  out.component = std::move(m);

  // Difference-weighted moments: the blurred component edge contributes
  // fractionally, so the axis survives pixel quantization on small blobs.
  const WeightedMoments s = weighted_moments(out.component, diff);
  out.centroid = Vec2(s.cx, s.cy);
  const double a = s.mu20;
  const double b = s.mu11;
  const double c = s.mu02;
  const double half_gap = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const double l_max = 0.5 * (a + c) + half_gap;
  const double l_min = 0.5 * (a + c) - half_gap;
  out.eccentricity = std::sqrt(l_max / std::max(l_min, 1e-12));

  double angle = rad_to_deg(0.5 * std::atan2(2.0 * b, a - c));
  if (angle < 0.0) angle += 180.0;
  out.axis_angle_deg = angle;

  out.axis_defined = out.eccentricity >= config.min_eccentricity;
  if (!out.axis_defined) out.status = ContourStatus::AxisUndefined;
  return out;
}

ContourTrack contour_rotation(const std::vector<ContactContour>& contours) {
  ContourTrack track;
  track.signed_angle_deg.reserve(contours.size());
  size_t undefined = 0;
  bool have_axis = false;
  double prev_axis = 0.0;
  double accum = 0.0;
  for (const ContactContour& c : contours) {
    if (c.status == ContourStatus::Ok && c.axis_defined) {
      if (have_axis) accum += axis_increment_deg(prev_axis, c.axis_angle_deg);
      prev_axis = c.axis_angle_deg;
      have_axis = true;
    } else {
      ++undefined;
    }
    track.signed_angle_deg.push_back(accum);
  }
  if (!have_axis || undefined * 2 > contours.size())
    track.status = ContourStatus::TrackingLost;
  return track;
}

double axis_increment_deg(double from_deg, double to_deg) {
  double d = std::fmod(to_deg - from_deg, 180.0);
  if (d <= -90.0)
    d += 180.0;
  else if (d > 90.0)
    d -= 180.0;
  return d;
}

}  // namespace tacrot
