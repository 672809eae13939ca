#include "tacrot/sim.hpp"

#include "tacrot/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace tacrot {
namespace {

constexpr double kGravity = 9.81;
constexpr double kCreepPeriodFrames = 25.0;
constexpr double kAdhesionScaleDeg = 15.0;  // lag saturation scale

Vec2 grip_center(const SimParams& p) {
  return {0.5 * p.image_width, 0.5 * p.image_height};
}

std::vector<Vec2> rest_positions(const SimParams& p) {
  std::vector<Vec2> rest;
  rest.reserve(static_cast<size_t>(p.grid_cols) * p.grid_rows);
  const double x0 =
      0.5 * (p.image_width - (p.grid_cols - 1) * p.grid_spacing_px);
  const double y0 =
      0.5 * (p.image_height - (p.grid_rows - 1) * p.grid_spacing_px);
  for (int r = 0; r < p.grid_rows; ++r)
    for (int c = 0; c < p.grid_cols; ++c)
      rest.emplace_back(x0 + c * p.grid_spacing_px, y0 + r * p.grid_spacing_px);
  return rest;
}

struct BlobShape {
  double a = 0.0;  // semi-major, px
  double b = 0.0;  // semi-minor, px
};

BlobShape blob_shape(const SmallBlobFootprint& f) {
  const double b = std::sqrt(f.area_px / (kPi * f.eccentricity));
  return {f.eccentricity * b, b};
}

bool in_footprint(const ContactFootprint& footprint, const Vec2& rest,
                  const Vec2& center, double axis0_deg) {
  const Vec2 q = rest - center;
  if (const auto* flat = std::get_if<FlatFootprint>(&footprint)) {
    return std::abs(q.x()) <= 0.5 * flat->width_px &&
           std::abs(q.y()) <= 0.5 * flat->height_px;
  }
  const auto& blob = std::get<SmallBlobFootprint>(footprint);
  const BlobShape s = blob_shape(blob);
  const double ca = std::cos(deg_to_rad(axis0_deg));
  const double sa = std::sin(deg_to_rad(axis0_deg));
  const double u = q.x() * ca + q.y() * sa;
  const double v = -q.x() * sa + q.y() * ca;
  return (u * u) / (s.a * s.a) + (v * v) / (s.b * s.b) <= 1.0;
}

/// Clockwise rotation on the y-down image by phi degrees.
Eigen::Matrix2d rotation_cw(double phi_deg) {
  const double c = std::cos(deg_to_rad(phi_deg));
  const double s = std::sin(deg_to_rad(phi_deg));
  Eigen::Matrix2d m;
  m << c, -s, s, c;
  return m;
}

double marker_angle_deg(const SimParams& params, double truth_deg) {
  const double lag = params.adhesion_lag_deg *
                     (1.0 - std::exp(-truth_deg / kAdhesionScaleDeg));
  return std::max(0.0, truth_deg - lag);
}

/// Soft-edged imprint coverage at a pixel, in [0, 1]; the edge band is about
/// 1.5 px wide so the component boundary is smooth.
double imprint_alpha(const ContactFootprint& footprint, const Vec2& pixel,
                     const Vec2& center, double axis0_deg, double rot_deg) {
  // Undo the imprint rotation, then test against the resting shape.
  const Vec2 q = rotation_cw(-rot_deg) * (pixel - center);
  if (const auto* flat = std::get_if<FlatFootprint>(&footprint)) {
    const double dx = std::abs(q.x()) - 0.5 * flat->width_px;
    const double dy = std::abs(q.y()) - 0.5 * flat->height_px;
    const double d = std::max(dx, dy);
    return std::clamp(-d / 1.5, 0.0, 1.0);
  }
  const auto& blob = std::get<SmallBlobFootprint>(footprint);
  const BlobShape s = blob_shape(blob);
  const double ca = std::cos(deg_to_rad(axis0_deg));
  const double sa = std::sin(deg_to_rad(axis0_deg));
  const double u = q.x() * ca + q.y() * sa;
  const double v = -q.x() * sa + q.y() * ca;
  const double r = std::sqrt((u * u) / (s.a * s.a) + (v * v) / (s.b * s.b));
  return std::clamp((1.0 - r) * s.b / 1.5, 0.0, 1.0);
}

IntensityFrame render_frame(const SimParams& params,
                            const ContactFootprint& footprint, double axis0_deg,
                            double rot_deg, bool contact_present) {
  IntensityFrame img;
  img.width = params.image_width;
  img.height = params.image_height;
  const size_t n = static_cast<size_t>(img.width) * img.height;
  img.r.assign(n, 18);
  img.g.assign(n, 18);
  img.b.assign(n, 18);
  if (!contact_present) return img;

  const Vec2 center = grip_center(params);
  // Imprint bounding box: circumscribed radius plus the edge band.
  double radius = 0.0;
  if (const auto* flat = std::get_if<FlatFootprint>(&footprint))
    radius = 0.5 * std::hypot(flat->width_px, flat->height_px);
  else
    radius = blob_shape(std::get<SmallBlobFootprint>(footprint)).a;
  radius += 3.0;
  const int x_lo = std::max(0, static_cast<int>(center.x() - radius));
  const int x_hi = std::min(img.width - 1, static_cast<int>(center.x() + radius));
  const int y_lo = std::max(0, static_cast<int>(center.y() - radius));
  const int y_hi = std::min(img.height - 1, static_cast<int>(center.y() + radius));

  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double alpha = imprint_alpha(footprint, Vec2(x, y), center,
                                         axis0_deg, rot_deg);
      if (alpha <= 0.0) continue;
      const size_t i = img.idx(x, y);
      img.r[i] = static_cast<std::uint8_t>(18 + 122 * alpha);
      img.g[i] = static_cast<std::uint8_t>(18 + 110 * alpha);
      img.b[i] = static_cast<std::uint8_t>(18 + 131 * alpha);
    }
  }
  return img;
}

}  // namespace

double sim_truth_angle_deg(const SimObject& object, const SimParams& params,
                           double grasp_offset_m, int frame) {
  if (params.translation_px_per_frame > 0.0) return 0.0;
  if (frame < params.lift_start_frame) return 0.0;
  const double d = std::abs(grasp_offset_m - object.cog_offset_m);
  const double tau = object.mass_kg * kGravity * d;
  const double tau_hold =
      object.mass_kg * kGravity * object.stability_radius_m;
  const double theta_el = params.gel_shear_compliance_deg * tau;
  const int k = frame - params.lift_start_frame + 1;
  double theta =
      theta_el *
      std::min(1.0, static_cast<double>(k) / params.elastic_ramp_frames);
  if (k > params.elastic_ramp_frames && tau > tau_hold)
    theta += params.slip_rate_deg * (tau - tau_hold) *
             (k - params.elastic_ramp_frames);
  return std::min(theta, params.max_angle_deg);
}

int sim_rotation_sign(const SimObject& object, double grasp_offset_m) {
  if (object.cog_offset_m > grasp_offset_m) return 1;
  if (object.cog_offset_m < grasp_offset_m) return -1;
  return 0;
}

GraspEpisode simulate_grasp(const SimObject& object, const SimParams& params,
                            double grasp_offset_m, int n_frames,
                            bool render_images) {
  if (std::abs(grasp_offset_m) > 0.5 * object.length_m)
    throw std::invalid_argument("grasp offset lies outside the object");
  if (n_frames < 1) throw std::invalid_argument("need at least one frame");

  const bool small_blob =
      std::holds_alternative<SmallBlobFootprint>(object.footprint);
  const bool render = render_images || small_blob;

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> axis_dist(0.0, 180.0);
  std::uniform_real_distribution<double> jitter_dist(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, params.marker_noise_px);

  const double axis0_deg = axis_dist(rng);

  // Jittered closure ramp, normalized to land exactly on closure_expansion.
  // Increments alternate high/low on top of the random jitter so consecutive
  // frame-to-frame motion never looks settled before the gripper stops.
  std::vector<double> ramp(static_cast<size_t>(params.closure_frames) + 1, 0.0);
  double accum = 0.0;
  for (int f = 1; f <= params.closure_frames; ++f) {
    const double alt = f % 2 == 0 ? 0.5 : -0.5;
    accum += std::max(0.1, 1.0 + alt + params.closure_jitter * jitter_dist(rng));
    ramp[static_cast<size_t>(f)] = accum;
  }
  for (double& v : ramp) v /= std::max(accum, 1e-12);

  const Vec2 center = grip_center(params);
  const std::vector<Vec2> rest = rest_positions(params);
  std::vector<bool> contact(rest.size());
  for (size_t i = 0; i < rest.size(); ++i)
    contact[i] = in_footprint(object.footprint, rest[i], center, axis0_deg);

  const int sign = sim_rotation_sign(object, grasp_offset_m);
  const double dir_rad = deg_to_rad(params.translation_dir_deg);
  const Vec2 slide_dir(std::cos(dir_rad), std::sin(dir_rad));

  GraspEpisode episode;
  episode.frames.reserve(static_cast<size_t>(n_frames));
  episode.ground_truth.reserve(static_cast<size_t>(n_frames));
  if (render) episode.intensity_frames.reserve(static_cast<size_t>(n_frames));

  for (int f = 0; f < n_frames; ++f) {
    const double e =
        params.closure_expansion *
        ramp[static_cast<size_t>(std::min(f, params.closure_frames))];
    const double truth = sim_truth_angle_deg(object, params, grasp_offset_m, f);
    const double rot_deg = sign * marker_angle_deg(params, truth);
    const Eigen::Matrix2d rot = rotation_cw(rot_deg);
    const double creep = params.creep_amplitude_px *
                         std::sin(2.0 * kPi * f / kCreepPeriodFrames);
    Vec2 slide = Vec2::Zero();
    if (params.translation_px_per_frame > 0.0 && f >= params.lift_start_frame)
      slide = params.translation_px_per_frame * (f - params.lift_start_frame + 1) *
              slide_dir;
    const bool detached =
        params.detach_frame && f >= *params.detach_frame;

    MarkerFrame frame;
    frame.frame_index = f;
    frame.time_s = f / params.fps;
    frame.markers.reserve(rest.size());
    for (size_t i = 0; i < rest.size(); ++i) {
      const Vec2 r0 = rest[i] - center;
      const double rho = r0.norm();
      Vec2 p = center + (1.0 + e) * r0;
      if (rho > 1e-9) p += (creep / rho) * r0;
      if (f >= params.lift_start_frame && rot_deg != 0.0)
        p = center + rot * (p - center);
      p += slide;
      const Vec2 displacement = p - rest[i];
      Vec2 actual = rest[i];
      actual += contact[i] ? displacement
                           : params.non_contact_attenuation * displacement;
      actual.x() += noise(rng);
      actual.y() += noise(rng);

      Marker m;
      m.id = static_cast<int>(i);
      m.x = actual.x();
      m.y = actual.y();
      m.visible = !(detached && contact[i]);
      frame.markers.push_back(m);
    }
    episode.frames.push_back(std::move(frame));

    GroundTruthFrame gt;
    gt.frame_index = f;
    gt.angle_deg = sign * truth;
    gt.rotating = truth > params.gt_onset_angle_deg;
    episode.ground_truth.push_back(gt);

    if (render) {
      const bool contact_present = f >= 1 && !detached;
      episode.intensity_frames.push_back(render_frame(
          params, object.footprint, axis0_deg, rot_deg, contact_present));
    }
  }
  return episode;
}

Plant make_pipeline_plant(const SimObject& object, const SimParams& params,
                          const PipelineConfig& config, int n_frames) {
  auto counter = std::make_shared<std::uint64_t>(0);
  return [object, params, config, n_frames, counter](const GraspCommand& cmd) {
    SimParams p = params;
    p.seed = params.seed + 0x9E3779B97F4A7C15ULL * (++*counter);
    const GraspEpisode episode =
        simulate_grasp(object, p, cmd.offset_m, n_frames);
    const SequenceResult result = run_pipeline(episode, config);
    PlantResponse response;
    response.verdict = result.verdict;
    response.verdict.measured_angle_deg = result.peak_angle_deg;
    response.orientation = result.peak_orientation;
    return response;
  };
}

Plant make_oracle_plant(const SimObject& object, const SimParams& params,
                        int n_frames) {
  const double threshold = PipelineConfig{}.stability_angle_deg;
  return [object, params, n_frames, threshold](const GraspCommand& cmd) {
    double peak = 0.0;
    for (int f = 0; f < n_frames; ++f)
      peak = std::max(peak,
                      sim_truth_angle_deg(object, params, cmd.offset_m, f));
    PlantResponse response;
    response.verdict.measured_angle_deg = peak;
    if (peak > threshold) {
      response.verdict.verdict = GraspVerdict::RotationalFailure;
      const int sign = sim_rotation_sign(object, cmd.offset_m);
      response.orientation =
          sign > 0 ? Orientation::CW
                   : (sign < 0 ? Orientation::CCW : Orientation::Ambiguous);
    }
    return response;
  };
}

}  // namespace tacrot
