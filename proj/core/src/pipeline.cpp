#include "tacrot/pipeline.hpp"

#include "tacrot/contour.hpp"
#include "tacrot/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tacrot {
namespace {

/// First frame where over 70% of the contact markers lost visibility.
int find_lift_end(const GraspEpisode& episode, const std::vector<int>& ids) {
  const int n = static_cast<int>(episode.frames.size());
  if (ids.empty()) return n;
  for (int f = 0; f < n; ++f) {
    int gone = 0;
    for (int id : ids) {
      const Marker* m = episode.frames[static_cast<size_t>(f)].find(id);
      if (!m || !m->visible) ++gone;
    }
    if (gone > 0.7 * static_cast<double>(ids.size())) return f;
  }
  return n;
}

void fill_idle(FrameEstimate& row, const MarkerFrame& frame) {
  row.frame_index = frame.frame_index;
  row.time_s = frame.time_s;
}

void run_marker_mode(const GraspEpisode& episode, const PipelineConfig& config,
                     SequenceResult& result) {
  const int n = static_cast<int>(episode.frames.size());
  const int s = result.contact.stable_frame_index;
  const std::vector<int>& ids = result.contact.contact_marker_ids;

  bool onset_latched = false;
  Orientation last_decisive = Orientation::Ambiguous;
  bool failed = false;

  for (int f = 0; f < n; ++f) {
    FrameEstimate row;
    fill_idle(row, episode.frames[static_cast<size_t>(f)]);
    if (f > s && f < result.lift_end_frame) {
      const MotionVectorSet motion = make_motion_set(
          episode.frames[0], episode.frames[static_cast<size_t>(s)],
          episode.frames[static_cast<size_t>(f)], ids);
      row.cls = classify_frame(motion, config, result.contact.small_area);
      row.n_markers = static_cast<int>(motion.size());
      if (!onset_latched && (row.cls == MotionClass::RotationOnset ||
                             row.cls == MotionClass::SmallAreaRotation)) {
        onset_latched = true;
        result.onset_frame = f;
      }
      if (onset_latched) {
        const EstimateResult er = estimate_rotation(motion, config);
        row.residual_px = er.estimate.residual_px;
        row.n_markers = er.estimate.n_markers;
        if (er.status == CorStatus::Ok) {
          row.angle_deg = er.estimate.angle_deg;
          row.signed_angle_deg = er.estimate.signed_angle_deg;
          row.orientation = er.estimate.orientation;
          row.cor = er.estimate.cor;
          row.cor_valid = true;
          row.votes_cw = er.estimate.votes_cw;
          row.votes_ccw = er.estimate.votes_ccw;
          if (row.orientation != Orientation::Ambiguous)
            last_decisive = row.orientation;
          if (row.angle_deg > result.peak_angle_deg) {
            result.peak_angle_deg = row.angle_deg;
            result.peak_orientation = row.orientation != Orientation::Ambiguous
                                          ? row.orientation
                                          : last_decisive;
          }
          const StabilityVerdict sv = assess_stability(er.estimate, config);
          if (sv.verdict == GraspVerdict::RotationalFailure) failed = true;
        }
      }
    }
    result.frames.push_back(row);
  }

  result.verdict.measured_angle_deg = result.peak_angle_deg;
  if (failed) result.verdict.verdict = GraspVerdict::RotationalFailure;
  if (result.peak_orientation == Orientation::Ambiguous)
    result.peak_orientation = last_decisive;
}

void run_contour_mode(const GraspEpisode& episode, const PipelineConfig& config,
                      SequenceResult& result) {
  const int n = static_cast<int>(episode.frames.size());
  const int s = result.contact.stable_frame_index;

  std::vector<ContactContour> contours;
  contours.reserve(static_cast<size_t>(n));
  const int usable = std::min(n, static_cast<int>(episode.intensity_frames.size()));
  for (int f = 0; f < usable; ++f)
    contours.push_back(extract_contour(
        episode.intensity_frames[static_cast<size_t>(f)],
        episode.intensity_frames[0], config));
  const ContourTrack track = contour_rotation(contours);

  const bool lost = track.status == ContourStatus::TrackingLost;
  const double base =
      !lost && s < static_cast<int>(track.signed_angle_deg.size())
          ? track.signed_angle_deg[static_cast<size_t>(s)]
          : 0.0;

  for (int f = 0; f < n; ++f) {
    FrameEstimate row;
    fill_idle(row, episode.frames[static_cast<size_t>(f)]);
    row.contour_mode = true;
    if (!lost && f > s && f < result.lift_end_frame &&
        f < static_cast<int>(track.signed_angle_deg.size())) {
      const double rel = track.signed_angle_deg[static_cast<size_t>(f)] - base;
      const ContactContour& c = contours[static_cast<size_t>(f)];
      if (c.status != ContourStatus::NoContact) {
        row.cor = c.centroid;
        row.cor_valid = true;
      }
      if (std::abs(rel) > config.contour_onset_deg) {
        row.cls = MotionClass::SmallAreaRotation;
        if (result.onset_frame < 0) result.onset_frame = f;
      }
      if (result.onset_frame >= 0 && f >= result.onset_frame) {
        row.angle_deg = std::abs(rel);
        row.signed_angle_deg = rel;
        row.orientation = rel > 0.0 ? Orientation::CW : Orientation::CCW;
        if (row.angle_deg > result.peak_angle_deg) {
          result.peak_angle_deg = row.angle_deg;
          result.peak_orientation = row.orientation;
        }
      }
    }
    result.frames.push_back(row);
  }

  result.verdict.measured_angle_deg = result.peak_angle_deg;
  if (result.peak_angle_deg > config.stability_angle_deg &&
      result.peak_orientation != Orientation::Ambiguous)
    result.verdict.verdict = GraspVerdict::RotationalFailure;
}

}  // namespace

SequenceResult run_pipeline(const GraspEpisode& episode,
                            const PipelineConfig& config) {
  if (episode.frames.empty())
    throw std::invalid_argument("run_pipeline: empty episode");
  std::string why;
  if (!config.valid(&why))
    throw std::invalid_argument("run_pipeline: bad config: " + why);

  SequenceResult result;
  result.contact =
      detect_contact(episode.frames, episode.intensity_frames, config);
  const int n = static_cast<int>(episode.frames.size());

  if (result.contact.kind == ContactKind::None) {
    // Never settled: nothing to measure.
    for (int f = 0; f < n; ++f) {
      FrameEstimate row;
      fill_idle(row, episode.frames[static_cast<size_t>(f)]);
      result.frames.push_back(row);
    }
    result.lift_end_frame = n;
    return result;
  }

  result.lift_end_frame =
      find_lift_end(episode, result.contact.contact_marker_ids);
  result.used_contour =
      result.contact.small_area && !episode.intensity_frames.empty();

  if (result.used_contour)
    run_contour_mode(episode, config, result);
  else
    run_marker_mode(episode, config, result);
  return result;
}

std::string estimates_csv(const SequenceResult& result) {
  std::ostringstream out;
  out << "frame,t,angle_deg,signed_angle_deg,cor_x,cor_y,orientation,"
         "votes_cw,votes_ccw,residual,class\n";
  for (const FrameEstimate& row : result.frames) {
    out << row.frame_index << ',' << format_double(row.time_s) << ','
        << format_double(row.angle_deg) << ','
        << format_double(row.signed_angle_deg) << ','
        << format_double(row.cor.x()) << ',' << format_double(row.cor.y())
        << ',' << to_string(row.orientation) << ',' << row.votes_cw << ','
        << row.votes_ccw << ',' << format_double(row.residual_px) << ','
        << to_string(row.cls) << '\n';
  }
  return out.str();
}

}  // namespace tacrot
