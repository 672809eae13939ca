#include "tacrot/contact.hpp"

#include <doctest.h>

#include "tacrot/sim.hpp"

#include "helpers.hpp"

using namespace tacrot;
using tacrot::testing::make_frame;

namespace {

/// Frames of one marker row marching right by the given per-frame steps.
/// steps[f] is the displacement between frame f and frame f+1.
std::vector<MarkerFrame> stepped_frames(const std::vector<double>& steps) {
  std::vector<MarkerFrame> frames;
  double x = 0.0;
  frames.push_back(make_frame(0, {{x, 10}, {x, 30}, {x, 50}}));
  for (size_t f = 0; f < steps.size(); ++f) {
    x += steps[f];
    frames.push_back(
        make_frame(static_cast<int>(f) + 1, {{x, 10}, {x, 30}, {x, 50}}));
  }
  return frames;
}

IntensityFrame flat_image(int w, int h, std::uint8_t value) {
  IntensityFrame img(w, h);
  std::fill(img.r.begin(), img.r.end(), value);
  std::fill(img.g.begin(), img.g.end(), value);
  std::fill(img.b.begin(), img.b.end(), value);
  return img;
}

void brighten_rect(IntensityFrame& img, int x0, int y0, int x1, int y1,
                   std::uint8_t add) {
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      img.g[img.idx(x, y)] = static_cast<std::uint8_t>(
          std::min(255, img.g[img.idx(x, y)] + add));
}

}  // namespace

TEST_SUITE_BEGIN("contact");

TEST_CASE("soft stable fires at the first settled step change") {
  PipelineConfig config;
  // Steps alternate hard until frame 10, then hold steady: the first frame
  // whose two preceding steps agree is 12.
  std::vector<double> steps = {2, 3, 2, 3, 2, 3, 2, 3, 2, 3, 1, 1, 1, 1, 1};
  const auto frames = stepped_frames(steps);
  const ContactState state = detect_stable_contact(frames, config);
  CHECK(state.kind == ContactKind::SoftStable);
  CHECK(state.stable_frame_index == 12);
}

TEST_CASE("soft stable honors the warm-up window") {
  PipelineConfig config;
  REQUIRE(config.soft_stable_window == 10);
  // Constant steps qualify from the start, but nothing before frame 10 may
  // be reported.
  const auto frames = stepped_frames(std::vector<double>(20, 1.5));
  const ContactState state = detect_stable_contact(frames, config);
  CHECK(state.kind == ContactKind::SoftStable);
  CHECK(state.stable_frame_index == config.soft_stable_window);
}

TEST_CASE("hard stable at exactly the fallback frame") {
  PipelineConfig config;
  // Steps alternate forever: the soft criterion never fires.
  std::vector<double> steps;
  for (int i = 0; i < 40; ++i) steps.push_back(i % 2 ? 2.0 : 4.0);
  const auto frames = stepped_frames(steps);
  const ContactState state = detect_stable_contact(frames, config);
  CHECK(state.kind == ContactKind::HardStable);
  CHECK(state.stable_frame_index == config.hard_stable_frame);
}

TEST_CASE("short unsettled prefix yields no stable contact") {
  PipelineConfig config;
  std::vector<double> steps;
  for (int i = 0; i < 20; ++i) steps.push_back(i % 2 ? 2.0 : 4.0);
  const auto frames = stepped_frames(steps);
  CHECK(detect_stable_contact(frames, config).kind == ContactKind::None);
}

TEST_CASE("prefix monotonicity: a longer prefix keeps the early answer") {
  PipelineConfig config;
  std::vector<double> steps = {2, 3, 2, 3, 2, 3, 2, 3, 2, 3, 1, 1, 1, 1, 1,
                               9, 1, 9, 1, 9, 1, 9, 1, 9, 1, 9, 1, 9, 1, 9};
  const auto frames = stepped_frames(steps);
  const auto full = detect_stable_contact(frames, config);
  const auto prefix = detect_stable_contact(
      std::span<const MarkerFrame>(frames.data(), 13), config);
  CHECK(full.kind == ContactKind::SoftStable);
  CHECK(prefix.kind == full.kind);
  CHECK(prefix.stable_frame_index == full.stable_frame_index);
}

TEST_CASE("simulated closure settles within two frames of the true end") {
  SimObject object;  // balanced: no rotation to disturb the quiet hold
  SimParams params;
  const GraspEpisode episode = simulate_grasp(object, params, 0.0, 34);
  PipelineConfig config;
  const ContactState state = detect_stable_contact(episode.frames, config);
  REQUIRE(state.kind == ContactKind::SoftStable);
  CHECK(std::abs(state.stable_frame_index - params.closure_frames) <= 2);
}

TEST_CASE("contact region recovers a brightened rectangle") {
  PipelineConfig config;
  const auto before = flat_image(100, 80, 20);
  auto at_stable = before;
  brighten_rect(at_stable, 20, 30, 60, 70, 40);
  // Sub-threshold global drift must not enter the mask.
  brighten_rect(at_stable, 0, 0, 100, 10, 10);

  const Mask mask = contact_region(before, at_stable, config);
  CHECK(mask.at(40, 50));
  CHECK(mask.at(21, 31));
  CHECK_FALSE(mask.at(5, 5));
  CHECK_FALSE(mask.at(80, 40));
  // 40x40 rectangle survives opening/closing nearly intact.
  CHECK(mask.count() >= 38 * 38);
  CHECK(mask.count() <= 42 * 42);
}

TEST_CASE("contact region keeps only the largest component") {
  PipelineConfig config;
  const auto before = flat_image(100, 80, 20);
  auto at_stable = before;
  brighten_rect(at_stable, 10, 10, 40, 40, 50);  // 30x30
  brighten_rect(at_stable, 60, 50, 70, 60, 50);  // 10x10, disjoint
  const Mask mask = contact_region(before, at_stable, config);
  CHECK(mask.at(25, 25));
  CHECK_FALSE(mask.at(65, 55));
}

TEST_CASE("isolated speckles are opened away") {
  PipelineConfig config;
  const auto before = flat_image(100, 80, 20);
  auto at_stable = before;
  brighten_rect(at_stable, 10, 10, 40, 40, 50);
  brighten_rect(at_stable, 80, 70, 81, 71, 50);  // single hot pixel
  const Mask mask = contact_region(before, at_stable, config);
  CHECK_FALSE(mask.at(80, 70));
}

TEST_CASE("mismatched image sizes are rejected") {
  PipelineConfig config;
  CHECK_THROWS_AS(
      (void)contact_region(flat_image(10, 10, 0), flat_image(11, 10, 0),
                           config),
      std::invalid_argument);
}

TEST_CASE("marker partition splits by mask containment") {
  PipelineConfig config;
  Mask mask(100, 80);
  for (int y = 20; y < 60; ++y)
    for (int x = 20; x < 60; ++x) mask.set(x, y, true);

  MarkerFrame stable = make_frame(
      5, {{30, 30}, {50, 50}, {90, 10}, {25, 55}, {59.4, 30}, {10, 70},
          {40, 40}, {45, 25}});
  stable.markers[1].visible = false;  // invisible: belongs to neither side

  const MarkerPartition part = partition_markers(stable, mask, config);
  CHECK(part.contact_ids == std::vector<int>{0, 3, 4, 6, 7});
  CHECK(part.non_contact_ids == std::vector<int>{2, 5});
  CHECK(part.small_area);  // 5 < min_contact_markers
}

TEST_CASE("edge grasp with four contact markers raises the small-area flag") {
  PipelineConfig config;
  REQUIRE(config.min_contact_markers == 6);
  Mask mask(100, 80);
  for (int y = 30; y < 50; ++y)
    for (int x = 30; x < 50; ++x) mask.set(x, y, true);
  const MarkerFrame stable = make_frame(
      0, {{35, 35}, {45, 35}, {35, 45}, {45, 45}, {70, 40}, {10, 10},
          {90, 70}, {5, 75}, {60, 60}, {20, 20}});
  const MarkerPartition part = partition_markers(stable, mask, config);
  CHECK(part.contact_ids.size() == 4);
  CHECK(part.small_area);
}

TEST_CASE("an empty mask is small-area with no contact markers") {
  PipelineConfig config;
  const MarkerFrame stable = make_frame(0, {{10, 10}, {20, 20}});
  const MarkerPartition part = partition_markers(stable, Mask(100, 80), config);
  CHECK(part.contact_ids.empty());
  CHECK(part.small_area);
}

TEST_CASE("motion fallback takes the markers above the displacement cut") {
  PipelineConfig config;
  // Displacements 1..20 px: the 60th-percentile cut keeps the top eight.
  std::vector<Vec2> first_pos, stable_pos;
  for (int i = 0; i < 20; ++i) {
    first_pos.emplace_back(10.0 + 4.0 * i, 40.0);
    stable_pos.emplace_back(10.0 + 4.0 * i, 40.0 + (i + 1));
  }
  const auto first = make_frame(0, first_pos);
  const auto stable = make_frame(10, stable_pos);
  const MarkerPartition part =
      partition_markers_by_motion(first, stable, config);
  CHECK(part.contact_ids == std::vector<int>{12, 13, 14, 15, 16, 17, 18, 19});
  CHECK_FALSE(part.small_area);
}

TEST_CASE("detect_contact composes images when available") {
  SimObject object;
  SimParams params;
  params.marker_noise_px = 0.15;
  const GraspEpisode episode = simulate_grasp(object, params, 0.0, 60, true);
  REQUIRE_FALSE(episode.intensity_frames.empty());
  PipelineConfig config;
  const ContactState state =
      detect_contact(episode.frames, episode.intensity_frames, config);
  REQUIRE(state.kind != ContactKind::None);
  CHECK_FALSE(state.small_area);
  CHECK_FALSE(state.contact_mask.empty());
  // The flat footprint covers a 260x200 px rectangle. At the stable frame
  // the closure has expanded marker positions radially by up to 30%, so only
  // markers whose expanded position stays inside the imprint count: the grid
  // columns/rows at +-15, +-45 and +-75 px from the grip center, 6x6 = 36.
  CHECK(state.contact_marker_ids.size() >= 32);
  CHECK(state.contact_marker_ids.size() <= 40);
  for (size_t i = 1; i < state.contact_marker_ids.size(); ++i)
    CHECK(state.contact_marker_ids[i - 1] < state.contact_marker_ids[i]);
}

TEST_CASE("detect_contact falls back to motion without images") {
  SimObject object;
  SimParams params;
  const GraspEpisode episode = simulate_grasp(object, params, 0.0, 60);
  PipelineConfig config;
  const ContactState state =
      detect_contact(episode.frames, episode.intensity_frames, config);
  REQUIRE(state.kind != ContactKind::None);
  CHECK(state.contact_mask.empty());
  CHECK_FALSE(state.small_area);
  CHECK_FALSE(state.contact_marker_ids.empty());
}

TEST_CASE("small blob footprint triggers the small-area flag") {
  SimObject object;
  object.footprint = SmallBlobFootprint{};
  SimParams params;
  const GraspEpisode episode = simulate_grasp(object, params, 0.0, 60);
  REQUIRE_FALSE(episode.intensity_frames.empty());  // blob always renders
  PipelineConfig config;
  const ContactState state =
      detect_contact(episode.frames, episode.intensity_frames, config);
  REQUIRE(state.kind != ContactKind::None);
  CHECK(state.small_area);
}

TEST_SUITE_END();
