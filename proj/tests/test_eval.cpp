#include "tacrot/eval.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <random>

#include "tacrot/io.hpp"

#include "helpers.hpp"

using namespace tacrot;

namespace {

GraspEpisode rotational_episode(std::uint64_t seed) {
  SimObject object;
  object.cog_offset_m = 0.09;
  SimParams params;
  params.seed = seed;
  return simulate_grasp(object, params, 0.0, 100);
}

/// Replaces the episode's ground truth with the pipeline's own measurement
/// shifted by `bias` degrees, so the evaluation error is known exactly.
GraspEpisode with_measured_truth(GraspEpisode episode,
                                 const PipelineConfig& config, double bias) {
  const SequenceResult result = run_pipeline(episode, config);
  REQUIRE(result.onset_frame >= 0);
  episode.ground_truth.clear();
  for (const FrameEstimate& row : result.frames) {
    GroundTruthFrame gt;
    gt.frame_index = row.frame_index;
    const bool in_window = row.frame_index >= result.onset_frame &&
                           row.frame_index < result.lift_end_frame;
    if (in_window) {
      const double sign = row.signed_angle_deg < 0.0 ? -1.0 : 1.0;
      gt.angle_deg = sign * (row.angle_deg + bias);
      gt.rotating = true;
    }
    episode.ground_truth.push_back(gt);
  }
  return episode;
}

SequenceReport make_row(const std::string& name, TrialClass truth,
                        TrialClass predicted) {
  SequenceReport row;
  row.name = name;
  row.n_frames = 100;
  row.true_class = truth;
  row.predicted_class = predicted;
  return row;
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("a sequence scored against its own measurement has zero error") {
  PipelineConfig config;
  const GraspEpisode episode =
      with_measured_truth(rotational_episode(31), config, 0.0);
  const SequenceReport row = evaluate_sequence(episode, config);

  CHECK(row.true_class == TrialClass::Rotational);
  CHECK(row.predicted_class == TrialClass::Rotational);
  REQUIRE(row.mean_abs_angle_error_deg.has_value());
  CHECK(*row.mean_abs_angle_error_deg == 0.0);
  REQUIRE(row.onset_delay_frames.has_value());
  CHECK(*row.onset_delay_frames == 0);
  CHECK(row.peak_truth_deg == doctest::Approx(row.peak_measured_deg));
  CHECK(row.n_window_frames > 0);
}

TEST_CASE("a constant truth bias is reported exactly") {
  PipelineConfig config;
  const GraspEpisode episode =
      with_measured_truth(rotational_episode(31), config, 2.0);
  const SequenceReport row = evaluate_sequence(episode, config);
  REQUIRE(row.mean_abs_angle_error_deg.has_value());
  CHECK(*row.mean_abs_angle_error_deg == doctest::Approx(2.0).epsilon(1e-12));
  // The under-10 subset sees the same constant bias.
  if (row.mean_abs_angle_error_under10_deg)
    CHECK(*row.mean_abs_angle_error_under10_deg ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ground truth is required and must cover every frame") {
  PipelineConfig config;
  GraspEpisode episode = rotational_episode(2);
  GraspEpisode no_gt = episode;
  no_gt.ground_truth.clear();
  CHECK_THROWS_AS(evaluate_sequence(no_gt, config), std::invalid_argument);
  GraspEpisode short_gt = episode;
  short_gt.ground_truth.pop_back();
  CHECK_THROWS_AS(evaluate_sequence(short_gt, config), std::invalid_argument);
}

TEST_CASE("aggregation pools frame-weighted errors and confusion counts") {
  std::vector<SequenceReport> rows;
  {
    SequenceReport a =
        make_row("a", TrialClass::Rotational, TrialClass::Rotational);
    a.mean_abs_angle_error_deg = 2.0;
    a.n_window_frames = 10;
    a.onset_delay_frames = 2;
    rows.push_back(a);
  }
  {
    SequenceReport b =
        make_row("b", TrialClass::Rotational, TrialClass::Stable);
    b.mean_abs_angle_error_deg = 4.0;
    b.n_window_frames = 30;
    b.onset_delay_frames = 8;
    rows.push_back(b);
  }
  rows.push_back(make_row("c", TrialClass::Stable, TrialClass::Stable));
  rows.push_back(make_row("d", TrialClass::Stable, TrialClass::Rotational));

  const EvalReport report = aggregate(rows);
  CHECK(report.n_sequences == 4);
  CHECK(report.n_true_rotational == 2);
  CHECK(report.n_true_stable == 2);
  CHECK(report.rotational_correct == 1);
  CHECK(report.stable_correct == 1);
  CHECK(report.false_stable == 1);
  CHECK(report.false_rotational == 1);
  CHECK(report.classification_accuracy == doctest::Approx(0.5));
  // Frame-weighted: (2*10 + 4*30) / 40.
  CHECK(report.mean_abs_angle_error_deg == doctest::Approx(3.5));
  CHECK(report.mean_onset_delay_frames == doctest::Approx(5.0));
  // Only the delay-2 row is within five frames, out of two rotational rows.
  CHECK(report.frac_onset_within_5 == doctest::Approx(0.5));

  // Row order does not change the aggregates.
  std::vector<SequenceReport> shuffled = {rows[3], rows[1], rows[0], rows[2]};
  const EvalReport reordered = aggregate(shuffled);
  CHECK(summary_csv(reordered) == summary_csv(report));
}

TEST_CASE("aggregating nothing yields a quiet zero report") {
  const EvalReport report = aggregate({});
  CHECK(report.n_sequences == 0);
  CHECK(report.classification_accuracy == 0.0);
  CHECK(report.mean_abs_angle_error_deg == 0.0);
  CHECK(report.frac_onset_within_5 == 0.0);
  CHECK(summary_csv(report).substr(0, 10) == "key,value\n");
}

TEST_CASE("corpus evaluation is deterministic and sorted by file name") {
  const testing::TempDir dir("eval_corpus");
  PipelineConfig config;
  // Three corpus cases written out of order.
  for (int index : {5, 98, 127}) {
    const CorpusCase c = default_corpus_case(1, index);
    GraspEpisode episode =
        simulate_grasp(c.object, c.params, c.grasp_offset_m, c.n_frames);
    write_sequence(dir.file(c.name + ".seq"), episode.frames,
                   episode.ground_truth);
  }

  const testing::TempDir out_a("eval_out_a");
  const testing::TempDir out_b("eval_out_b");
  const EvalReport first = evaluate_corpus(dir.path().string(), config,
                                           out_a.path().string());
  const EvalReport second = evaluate_corpus(dir.path().string(), config,
                                            out_b.path().string());

  REQUIRE(first.rows.size() == 3);
  CHECK(first.rows[0].name == "case_005_rot");
  CHECK(first.rows[1].name == "case_098_static");
  CHECK(first.rows[2].name == "case_127_trans");
  CHECK(first.rows[0].true_class == TrialClass::Rotational);
  CHECK(first.rows[1].true_class == TrialClass::Stable);
  CHECK(first.rows[2].true_class == TrialClass::Stable);

  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(out_a.path() / "report.csv") ==
        slurp(out_b.path() / "report.csv"));
  CHECK(slurp(out_a.path() / "summary.csv") ==
        slurp(out_b.path() / "summary.csv"));
  CHECK(std::filesystem::exists(out_a.path() / "timing.csv"));
  CHECK(report_csv(first) == slurp(out_a.path() / "report.csv"));
  CHECK(summary_csv(second) == slurp(out_b.path() / "summary.csv"));
}

TEST_CASE("an empty corpus directory is an error") {
  const testing::TempDir dir("eval_empty");
  const testing::TempDir out("eval_empty_out");
  PipelineConfig config;
  CHECK_THROWS_AS(
      evaluate_corpus(dir.path().string(), config, out.path().string()),
      ParseError);
}

TEST_CASE("the default corpus case table covers every family deterministically") {
  std::vector<std::string> names;
  int rotational = 0, detach = 0, statics = 0, inband = 0, trans = 0;
  for (int i = 0; i < kDefaultCorpusSize; ++i) {
    const CorpusCase c = default_corpus_case(7, i);
    names.push_back(c.name);
    CHECK(c.n_frames == 100);
    CHECK(c.grasp_offset_m == 0.0);
    if (c.name.ends_with("_rotdetach")) {
      ++detach;
      CHECK(c.params.detach_frame == 70);
    } else if (c.name.ends_with("_rot")) {
      ++rotational;
      CHECK(std::abs(c.object.cog_offset_m) >= 0.045);
    } else if (c.name.ends_with("_static")) {
      ++statics;
      CHECK(std::abs(c.object.cog_offset_m) <= 0.011);
    } else if (c.name.ends_with("_inband")) {
      ++inband;
      CHECK(std::abs(c.object.cog_offset_m) <
            c.object.stability_radius_m * 0.9);
    } else if (c.name.ends_with("_trans")) {
      ++trans;
      CHECK(c.params.translation_px_per_frame > 0.0);
    }
  }
  CHECK(rotational == 88);
  CHECK(detach == 10);
  CHECK(statics == 14);
  CHECK(inband == 15);
  CHECK(trans == 15);
  // Generated in index order, which is also the lexicographic file order.
  CHECK(std::is_sorted(names.begin(), names.end()));
  CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());

  // The same seed regenerates the identical trial.
  const CorpusCase c = default_corpus_case(7, 33);
  const GraspEpisode a = simulate_grasp(c.object, c.params, 0.0, c.n_frames);
  const GraspEpisode b = simulate_grasp(c.object, c.params, 0.0, c.n_frames);
  REQUIRE(a.frames.size() == b.frames.size());
  CHECK(a.frames[50].markers[7].x == b.frames[50].markers[7].x);

  const CorpusCase other = default_corpus_case(8, 33);
  const GraspEpisode d =
      simulate_grasp(other.object, other.params, 0.0, other.n_frames);
  CHECK(a.frames[50].markers[7].x != d.frames[50].markers[7].x);
}

TEST_CASE("small-blob trials carry images and score through contour mode") {
  const std::vector<GraspEpisode> corpus = smallblob_corpus(3, 4);
  REQUIRE(corpus.size() == 4);
  PipelineConfig config;
  for (size_t i = 0; i < corpus.size(); ++i) {
    CAPTURE(i);
    CHECK(corpus[i].name == "blob_00" + std::to_string(i));
    REQUIRE_FALSE(corpus[i].intensity_frames.empty());
    const SequenceReport row = evaluate_sequence(corpus[i], config);
    CHECK(row.used_contour);
    CHECK(row.true_class == TrialClass::Rotational);
  }
}

TEST_CASE("closed loop evaluation through the truth plant") {
  SimObject object;
  SimParams params;
  PipelineConfig pipeline_config;
  ControllerConfig controller_config;
  const ClosedLoopReport report =
      run_closed_loop(object, params, pipeline_config, controller_config, 6,
                      2024, /*use_oracle_plant=*/true);
  REQUIRE(report.episodes.size() == 6);
  int regrasp_sum = 0;
  for (const ClosedLoopEpisode& e : report.episodes) {
    CHECK(std::abs(e.cog_offset_m) <= 0.45 * object.length_m);
    // The truth plant only reports Done at a truly stable offset.
    CHECK(e.success == e.converged);
    CHECK(e.regrasps <= controller_config.max_regrasps);
    regrasp_sum += e.regrasps;
  }
  CHECK(report.success_rate == 1.0);
  CHECK(report.mean_regrasps == doctest::Approx(regrasp_sum / 6.0));
  CHECK(report.records.size() == 6);

  // Byte-identical outputs on a rerun with the same seed.
  const ClosedLoopReport again =
      run_closed_loop(object, params, pipeline_config, controller_config, 6,
                      2024, true);
  CHECK(closed_loop_csv(again) == closed_loop_csv(report));
  CHECK(closed_loop_summary_csv(again) == closed_loop_summary_csv(report));

  // A different seed draws different objects.
  const ClosedLoopReport other =
      run_closed_loop(object, params, pipeline_config, controller_config, 6,
                      2025, true);
  CHECK(closed_loop_csv(other) != closed_loop_csv(report));
}

TEST_CASE("closed loop evaluation through the measurement pipeline") {
  SimObject object;
  SimParams params;
  PipelineConfig pipeline_config;
  ControllerConfig controller_config;
  const ClosedLoopReport report =
      run_closed_loop(object, params, pipeline_config, controller_config, 3,
                      1, /*use_oracle_plant=*/false);
  REQUIRE(report.episodes.size() == 3);
  for (const ClosedLoopEpisode& e : report.episodes) {
    CHECK(e.converged);
    CHECK(e.success);
  }
}

TEST_CASE("per-frame latency is measured and finite") {
  PipelineConfig config;
  const GraspEpisode episode = rotational_episode(40);
  const double ms = measure_pipeline_ms_per_frame(episode, config, 2);
  CHECK(ms > 0.0);
  CHECK(ms < 1000.0);
  GraspEpisode empty;
  CHECK(measure_pipeline_ms_per_frame(empty, config) == 0.0);
}

TEST_SUITE_END();
