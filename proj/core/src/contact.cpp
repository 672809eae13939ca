#include "tacrot/contact.hpp"

#include "tacrot/imageops.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace tacrot {
namespace {

/// Mean step length of markers visible in both frames; nullopt when none are.
std::optional<double> mean_step_px(const MarkerFrame& a, const MarkerFrame& b) {
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i < a.markers.size() && i < b.markers.size(); ++i) {
    const Marker& ma = a.markers[i];
    const Marker& mb = b.markers[i];
    if (!ma.visible || !mb.visible) continue;
    sum += (mb.pos() - ma.pos()).norm();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

void sort_ids(std::vector<int>& ids) { std::sort(ids.begin(), ids.end()); }

}  // namespace

ContactState detect_stable_contact(std::span<const MarkerFrame> frames,
                                   const PipelineConfig& config) {
  ContactState state;
  const int n = static_cast<int>(frames.size());
  const int first_candidate = std::max(config.soft_stable_window, 2);
  for (int f = first_candidate; f < n; ++f) {
    if (f > config.hard_stable_frame) break;
    if (f == config.hard_stable_frame) {
      state.kind = ContactKind::HardStable;
      state.stable_frame_index = f;
      return state;
    }
    auto prev = mean_step_px(frames[f - 2], frames[f - 1]);
    auto curr = mean_step_px(frames[f - 1], frames[f]);
    if (!prev || !curr) continue;
    if (std::abs(*curr - *prev) < config.soft_stable_delta_px) {
      state.kind = ContactKind::SoftStable;
      state.stable_frame_index = f;
      return state;
    }
  }
  return state;  // None: prefix too short and no soft criterion met
}

Mask contact_region(const IntensityFrame& before,
                    const IntensityFrame& at_stable,
                    const PipelineConfig& config) {
  auto diff = max_channel_abs_diff(before, at_stable);
  Mask m = threshold_mask(diff, before.width, before.height,
                          config.contact_intensity_threshold);
  m = morph_open(m);
  m = morph_close(m);
  return largest_component(m);
}

MarkerPartition partition_markers(const MarkerFrame& stable_frame,
                                  const Mask& mask,
                                  const PipelineConfig& config) {
  MarkerPartition part;
  for (const Marker& m : stable_frame.markers) {
    if (!m.visible) continue;  // belongs to neither side
    if (mask.contains(m.x, m.y))
      part.contact_ids.push_back(m.id);
    else
      part.non_contact_ids.push_back(m.id);
  }
  sort_ids(part.contact_ids);
  sort_ids(part.non_contact_ids);
  part.small_area =
      mask.empty() ||
      part.contact_ids.size() < static_cast<size_t>(config.min_contact_markers);
  return part;
}

MarkerPartition partition_markers_by_motion(const MarkerFrame& first_frame,
                                            const MarkerFrame& stable_frame,
                                            const PipelineConfig& config) {
  MarkerPartition part;
  std::vector<std::pair<double, int>> disp;  // (displacement, id)
  for (size_t i = 0;
       i < first_frame.markers.size() && i < stable_frame.markers.size(); ++i) {
    const Marker& a = first_frame.markers[i];
    const Marker& b = stable_frame.markers[i];
    if (!a.visible || !b.visible) {
      part.non_contact_ids.push_back(a.id);
      continue;
    }
    disp.emplace_back((b.pos() - a.pos()).norm(), a.id);
  }
  if (!disp.empty()) {
    std::vector<double> values;
    values.reserve(disp.size());
    for (auto& [d, id] : disp) values.push_back(d);
    std::sort(values.begin(), values.end());
    // 60th percentile cut: the strongly displaced markers trace the object.
    const double q60 = values[static_cast<size_t>(0.6 * (values.size() - 1))];
    for (auto& [d, id] : disp) {
      if (d > q60)
        part.contact_ids.push_back(id);
      else
        part.non_contact_ids.push_back(id);
    }
  }
  sort_ids(part.contact_ids);
  sort_ids(part.non_contact_ids);
  part.small_area =
      part.contact_ids.size() < static_cast<size_t>(config.min_contact_markers);
  return part;
}

ContactState detect_contact(std::span<const MarkerFrame> frames,
                            std::span<const IntensityFrame> images,
                            const PipelineConfig& config) {
  ContactState state = detect_stable_contact(frames, config);
  if (state.kind == ContactKind::None) return state;

  const int s = state.stable_frame_index;
  MarkerPartition part;
  if (images.size() > static_cast<size_t>(s)) {
    state.contact_mask = contact_region(images[0], images[s], config);
    part = partition_markers(frames[s], state.contact_mask, config);
    if (part.contact_ids.empty() && !part.small_area) {
      // Empty mask without the small-area condition: all-markers mode.
      part = partition_markers_by_motion(frames[0], frames[s], config);
    }
  } else {
    part = partition_markers_by_motion(frames[0], frames[s], config);
  }
  state.contact_marker_ids = std::move(part.contact_ids);
  state.non_contact_marker_ids = std::move(part.non_contact_ids);
  state.small_area = part.small_area;
  return state;
}

}  // namespace tacrot
