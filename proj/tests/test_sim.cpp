#include "tacrot/sim.hpp"

#include <doctest.h>

#include "tacrot/contact.hpp"
#include "tacrot/pipeline.hpp"

#include "helpers.hpp"

using namespace tacrot;

namespace {

bool frames_identical(const std::vector<MarkerFrame>& a,
                      const std::vector<MarkerFrame>& b) {
  if (a.size() != b.size()) return false;
  for (size_t f = 0; f < a.size(); ++f) {
    if (a[f].frame_index != b[f].frame_index) return false;
    if (a[f].time_s != b[f].time_s) return false;
    if (a[f].markers.size() != b[f].markers.size()) return false;
    for (size_t m = 0; m < a[f].markers.size(); ++m) {
      const Marker& x = a[f].markers[m];
      const Marker& y = b[f].markers[m];
      if (x.id != y.id || x.x != y.x || x.y != y.y || x.visible != y.visible)
        return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("sim");

TEST_CASE("identical seeds reproduce the trial bit for bit") {
  SimObject object;
  object.cog_offset_m = 0.08;
  SimParams params;
  params.seed = 42;
  const auto a = simulate_grasp(object, params, 0.0, 80, true);
  const auto b = simulate_grasp(object, params, 0.0, 80, true);
  CHECK(frames_identical(a.frames, b.frames));
  REQUIRE(a.ground_truth.size() == b.ground_truth.size());
  for (size_t i = 0; i < a.ground_truth.size(); ++i) {
    CHECK(a.ground_truth[i].angle_deg == b.ground_truth[i].angle_deg);
    CHECK(a.ground_truth[i].rotating == b.ground_truth[i].rotating);
  }
  REQUIRE(a.intensity_frames.size() == b.intensity_frames.size());
  for (size_t i = 0; i < a.intensity_frames.size(); ++i) {
    CHECK(a.intensity_frames[i].r == b.intensity_frames[i].r);
    CHECK(a.intensity_frames[i].g == b.intensity_frames[i].g);
    CHECK(a.intensity_frames[i].b == b.intensity_frames[i].b);
  }

  SimParams other = params;
  other.seed = 43;
  const auto c = simulate_grasp(object, other, 0.0, 80);
  CHECK_FALSE(frames_identical(a.frames, c.frames));
}

TEST_CASE("ground truth reproduces the closed-form schedule") {
  SimObject object;
  object.cog_offset_m = 0.07;
  object.mass_kg = 0.22;
  SimParams params;
  params.seed = 9;
  const double offset = -0.02;
  const auto episode = simulate_grasp(object, params, offset, 100);
  const int sign = sim_rotation_sign(object, offset);
  CHECK(sign == 1);  // cog above the grasp: clockwise on screen
  REQUIRE(episode.ground_truth.size() == 100);
  for (int f = 0; f < 100; ++f) {
    const double magnitude = sim_truth_angle_deg(object, params, offset, f);
    const GroundTruthFrame& gt = episode.ground_truth[static_cast<size_t>(f)];
    CHECK(gt.frame_index == f);
    CHECK(gt.angle_deg == doctest::Approx(sign * magnitude).epsilon(1e-12));
    CHECK(gt.rotating == (magnitude > params.gt_onset_angle_deg));
  }
}

TEST_CASE("truth schedule: quiet before lift, ramp, slip, saturation") {
  SimObject object;
  object.cog_offset_m = 0.10;
  SimParams params;
  CHECK(sim_truth_angle_deg(object, params, 0.0, 0) == 0.0);
  CHECK(sim_truth_angle_deg(object, params, 0.0,
                            params.lift_start_frame - 1) == 0.0);
  // Elastic twist fully developed on the last ramp frame, no slip yet.
  const int ramp_end =
      params.lift_start_frame + params.elastic_ramp_frames - 1;
  const double tau = object.mass_kg * 9.81 * 0.10;
  const double elastic = params.gel_shear_compliance_deg * tau;
  CHECK(sim_truth_angle_deg(object, params, 0.0, ramp_end) ==
        doctest::Approx(elastic).epsilon(1e-9));
  // Slip accumulates per frame past the holdable torque.
  const double hold = object.mass_kg * 9.81 * object.stability_radius_m;
  const double slip_per_frame = params.slip_rate_deg * (tau - hold);
  CHECK(sim_truth_angle_deg(object, params, 0.0, ramp_end + 10) ==
        doctest::Approx(std::min(params.max_angle_deg,
                                 elastic + 10 * slip_per_frame))
            .epsilon(1e-9));
  // Far frames saturate.
  CHECK(sim_truth_angle_deg(object, params, 0.0, 5000) ==
        params.max_angle_deg);
}

TEST_CASE("the truth-stable band sits just inside the stability radius") {
  SimObject object;
  SimParams params;
  // The compliance is calibrated so the elastic equilibrium clears the
  // 5 degree threshold marginally before the radius edge: a truth-stable
  // grasp is always within the radius, never the other way around.
  for (double d : {0.0, 0.01, 0.02, 0.03, 0.0374}) {
    object.cog_offset_m = d;
    double peak = 0.0;
    for (int f = 0; f < 200; ++f)
      peak = std::max(peak, sim_truth_angle_deg(object, params, 0.0, f));
    CAPTURE(d);
    CHECK(peak <= 5.0);
  }
  for (double d : {object.stability_radius_m, 0.045, 0.10}) {
    object.cog_offset_m = d;
    double peak = 0.0;
    for (int f = 0; f < 200; ++f)
      peak = std::max(peak, sim_truth_angle_deg(object, params, 0.0, f));
    CAPTURE(d);
    CHECK(peak > 5.0);
  }
}

TEST_CASE("rotation sign follows the heavy side") {
  SimObject object;
  object.cog_offset_m = 0.05;
  CHECK(sim_rotation_sign(object, 0.0) == 1);
  CHECK(sim_rotation_sign(object, 0.10) == -1);
  CHECK(sim_rotation_sign(object, 0.05) == 0);
}

TEST_CASE("grasp offset outside the object is rejected") {
  SimObject object;  // length 0.30
  SimParams params;
  CHECK_THROWS_AS((void)simulate_grasp(object, params, 0.16, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)simulate_grasp(object, params, -0.2, 10),
                  std::invalid_argument);
}

TEST_CASE("marker field geometry and ids are stable") {
  SimObject object;
  SimParams params;
  const auto episode = simulate_grasp(object, params, 0.0, 5);
  REQUIRE(episode.frames.size() == 5);
  const size_t n_markers =
      static_cast<size_t>(params.grid_cols) * params.grid_rows;
  for (const auto& frame : episode.frames) {
    REQUIRE(frame.markers.size() == n_markers);
    for (size_t i = 0; i < n_markers; ++i)
      CHECK(frame.markers[i].id == static_cast<int>(i));
  }
  for (size_t f = 1; f < episode.frames.size(); ++f)
    CHECK(episode.frames[f].frame_index >
          episode.frames[f - 1].frame_index);
}

TEST_CASE("detachment hides the contact markers") {
  SimObject object;
  object.cog_offset_m = 0.09;
  SimParams params;
  params.detach_frame = 60;
  const auto episode = simulate_grasp(object, params, 0.0, 80, true);

  // The image partition pins down the exact footprint markers; the marker
  // motion fallback would mix in strongly dragged bystander markers.
  PipelineConfig config;
  const ContactState contact =
      detect_contact(episode.frames, episode.intensity_frames, config);
  REQUIRE_FALSE(contact.contact_marker_ids.empty());

  const MarkerFrame& before = episode.frames[59];
  const MarkerFrame& after = episode.frames[60];
  int visible_before = 0, visible_after = 0;
  for (int id : contact.contact_marker_ids) {
    visible_before += before.find(id)->visible ? 1 : 0;
    visible_after += after.find(id)->visible ? 1 : 0;
  }
  CHECK(visible_before == static_cast<int>(contact.contact_marker_ids.size()));
  CHECK(visible_after == 0);
}

TEST_CASE("translation mode slides the field without rotating it") {
  SimObject object;
  SimParams params;
  params.translation_px_per_frame = 1.5;
  params.translation_dir_deg = 30.0;
  const auto episode = simulate_grasp(object, params, 0.0, 90, true);
  for (const auto& gt : episode.ground_truth) {
    CHECK(gt.angle_deg == 0.0);
    CHECK_FALSE(gt.rotating);
  }
  // Between two post-lift frames the contact markers move by the commanded
  // step along the commanded direction (plus sub-pixel noise). Partition from
  // images: bystander markers only receive an attenuated slide.
  PipelineConfig config;
  const ContactState contact =
      detect_contact(episode.frames, episode.intensity_frames, config);
  REQUIRE_FALSE(contact.contact_marker_ids.empty());
  const MarkerFrame& a = episode.frames[70];
  const MarkerFrame& b = episode.frames[80];
  const Vec2 expect = 10.0 * 1.5 *
                      Vec2{std::cos(deg_to_rad(30.0)), std::sin(deg_to_rad(30.0))};
  for (int id : contact.contact_marker_ids) {
    const Vec2 d = b.find(id)->pos() - a.find(id)->pos();
    CHECK((d - expect).norm() < 3.0);  // noise and creep only
  }
}

TEST_CASE("non-contact markers follow the field only faintly") {
  SimObject object;
  object.cog_offset_m = 0.12;
  SimParams params;
  params.marker_noise_px = 0.05;
  const auto episode = simulate_grasp(object, params, 0.0, 100);
  PipelineConfig config;
  const ContactState contact = detect_contact(episode.frames, {}, config);
  const MarkerFrame& stable = episode.frames[20];
  const MarkerFrame& late = episode.frames[99];
  double contact_motion = 0.0, outside_motion = 0.0;
  for (int id : contact.contact_marker_ids)
    contact_motion += (late.find(id)->pos() - stable.find(id)->pos()).norm();
  contact_motion /= static_cast<double>(contact.contact_marker_ids.size());
  for (int id : contact.non_contact_marker_ids)
    outside_motion += (late.find(id)->pos() - stable.find(id)->pos()).norm();
  outside_motion /= static_cast<double>(contact.non_contact_marker_ids.size());
  CHECK(outside_motion < 0.5 * contact_motion);
}

TEST_CASE("flat grasps render only when asked, blobs always") {
  SimObject flat;
  SimParams params;
  CHECK(simulate_grasp(flat, params, 0.0, 10).intensity_frames.empty());
  CHECK(simulate_grasp(flat, params, 0.0, 10, true).intensity_frames.size() ==
        10);
  SimObject blob;
  blob.footprint = SmallBlobFootprint{};
  CHECK(simulate_grasp(blob, params, 0.0, 10).intensity_frames.size() == 10);
}

TEST_CASE("oracle plant answers from the truth schedule") {
  SimObject object;
  object.cog_offset_m = 0.10;
  SimParams params;
  const Plant plant = make_oracle_plant(object, params);
  GraspCommand at_center;
  at_center.offset_m = 0.0;
  const PlantResponse far = plant(at_center);
  CHECK(far.verdict.verdict == GraspVerdict::RotationalFailure);
  CHECK(far.orientation == Orientation::CW);

  GraspCommand at_cog;
  at_cog.offset_m = 0.10;
  const PlantResponse near = plant(at_cog);
  CHECK(near.verdict.verdict == GraspVerdict::StableGrasp);
}

TEST_CASE("pipeline plant verdict comes from the measurement, not the truth") {
  SimObject object;
  object.cog_offset_m = 0.11;
  SimParams params;
  params.seed = 5;
  PipelineConfig config;
  const Plant plant = make_pipeline_plant(object, params, config);
  GraspCommand cmd;
  cmd.offset_m = 0.0;
  const PlantResponse r = plant(cmd);
  CHECK(r.verdict.verdict == GraspVerdict::RotationalFailure);
  CHECK(r.orientation == Orientation::CW);
  CHECK(r.verdict.measured_angle_deg > 5.0);
}

TEST_SUITE_END();
