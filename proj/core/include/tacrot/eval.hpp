#pragma once

#include "tacrot/config.hpp"
#include "tacrot/pipeline.hpp"
#include "tacrot/sim.hpp"
#include "tacrot/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tacrot {

enum class TrialClass { Stable, Rotational };

const char* to_string(TrialClass c);

/// Per-sequence evaluation row. Angle errors are means of
/// |measured - truth| over the lifting window [true onset, detachment or
/// sequence end]; stable sequences have no window and carry no angle error.
struct SequenceReport {
  std::string name;
  int n_frames = 0;
  TrialClass true_class = TrialClass::Stable;
  TrialClass predicted_class = TrialClass::Stable;
  std::optional<double> mean_abs_angle_error_deg;
  std::optional<double> mean_abs_angle_error_under10_deg;  // frames |truth|<10
  int n_window_frames = 0;   // lifting-window frame count
  int n_under10_frames = 0;  // window frames with |truth| < 10
  std::optional<int> true_onset_frame;
  std::optional<int> detected_onset_frame;
  std::optional<int> onset_delay_frames;  // |detected - true|
  double peak_truth_deg = 0.0;
  double peak_measured_deg = 0.0;
  bool used_contour = false;
};

/// Corpus aggregates.
struct EvalReport {
  std::vector<SequenceReport> rows;
  int n_sequences = 0;
  int n_true_rotational = 0;
  int n_true_stable = 0;
  // Confusion counts, prediction vs truth.
  int rotational_correct = 0;
  int stable_correct = 0;
  int false_rotational = 0;  // stable labeled rotational
  int false_stable = 0;      // rotational labeled stable
  double classification_accuracy = 0.0;
  double mean_abs_angle_error_deg = 0.0;          // over rotational rows
  double mean_abs_angle_error_under10_deg = 0.0;  // frames with |truth| < 10
  double mean_onset_delay_frames = 0.0;
  double frac_onset_within_5 = 0.0;  // rotational rows detected within 5 frames
};

/// Evaluates one sequence with ground truth. Throws std::invalid_argument
/// when the ground truth is missing.
SequenceReport evaluate_sequence(const GraspEpisode& episode,
                                 const PipelineConfig& config);

EvalReport aggregate(std::vector<SequenceReport> rows);

/// Loads every `*.seq` under the directory (sorted by filename), evaluates
/// each against its sidecar ground truth, and writes report.csv (per
/// sequence) and summary.csv (aggregates) plus timing.csv (measured per-frame
/// latency; kept out of the deterministic outputs) under out_dir.
EvalReport evaluate_corpus(const std::string& directory,
                           const PipelineConfig& config,
                           const std::string& out_dir);

std::string report_csv(const EvalReport& report);
std::string summary_csv(const EvalReport& report);

/// The default synthetic evaluation corpus: 142 grasp trials, 98 rotational
/// and 44 stable (static holds, in-band elastic twists and translational
/// slips), over a range of object sizes, masses and noise levels.
/// Deterministic for a fixed seed.
std::vector<GraspEpisode> default_corpus(std::uint64_t seed);

/// Parameters of corpus trial i without generating it (for writers).
struct CorpusCase {
  SimObject object;
  SimParams params;
  double grasp_offset_m = 0.0;
  int n_frames = 0;
  std::string name;
};
CorpusCase default_corpus_case(std::uint64_t seed, int index);
inline constexpr int kDefaultCorpusSize = 142;

/// Small-blob corpus exercising contour mode (images rendered).
std::vector<GraspEpisode> smallblob_corpus(std::uint64_t seed, int n = 20);

/// Closed-loop evaluation: n_episodes randomized center-of-gravity
/// placements over +-0.45 L, each driven by the chosen plant. success means
/// the controller finished Done at an offset that is truly stable for the
/// simulated object.
struct ClosedLoopEpisode {
  int episode = 0;
  double cog_offset_m = 0.0;
  int regrasps = 0;
  bool converged = false;
  bool success = false;
  double final_offset_m = 0.0;
};

struct ClosedLoopReport {
  std::vector<ClosedLoopEpisode> episodes;
  std::vector<EpisodeRecord> records;
  double success_rate = 0.0;
  double mean_regrasps = 0.0;
  int max_regrasps = 0;
};

ClosedLoopReport run_closed_loop(const SimObject& object_template,
                                 const SimParams& params,
                                 const PipelineConfig& pipeline_config,
                                 const ControllerConfig& controller_config,
                                 int n_episodes, std::uint64_t seed,
                                 bool use_oracle_plant = false);

std::string closed_loop_csv(const ClosedLoopReport& report);
std::string closed_loop_summary_csv(const ClosedLoopReport& report);

/// Mean wall-clock pipeline time per frame over an episode, in milliseconds.
double measure_pipeline_ms_per_frame(const GraspEpisode& episode,
                                     const PipelineConfig& config,
                                     int repeats = 1);

}  // namespace tacrot
