#include "tacrot/eval.hpp"

#include "tacrot/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace tacrot {
namespace {

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;

std::string pad3(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%03d", v);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string opt_cell(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

}  // namespace

const char* to_string(TrialClass c) {
  switch (c) {
    case TrialClass::Stable: return "Stable";
    case TrialClass::Rotational: return "Rotational";
  }
  return "?";
}

SequenceReport evaluate_sequence(const GraspEpisode& episode,
                                 const PipelineConfig& config) {
  if (episode.ground_truth.size() != episode.frames.size() ||
      episode.frames.empty())
    throw std::invalid_argument("evaluate_sequence: missing ground truth");

  const SequenceResult result = run_pipeline(episode, config);

  SequenceReport row;
  row.name = episode.name;
  row.n_frames = static_cast<int>(episode.frames.size());
  row.used_contour = result.used_contour;
  row.peak_measured_deg = result.peak_angle_deg;

  double peak_truth = 0.0;
  for (const GroundTruthFrame& gt : episode.ground_truth)
    peak_truth = std::max(peak_truth, std::abs(gt.angle_deg));
  row.peak_truth_deg = peak_truth;
  row.true_class = peak_truth > config.stability_angle_deg
                       ? TrialClass::Rotational
                       : TrialClass::Stable;
  row.predicted_class = result.verdict.verdict == GraspVerdict::RotationalFailure
                            ? TrialClass::Rotational
                            : TrialClass::Stable;

  for (const GroundTruthFrame& gt : episode.ground_truth) {
    if (gt.rotating) {
      row.true_onset_frame = gt.frame_index;
      break;
    }
  }
  if (result.onset_frame >= 0) row.detected_onset_frame = result.onset_frame;
  if (row.true_onset_frame && row.detected_onset_frame)
    row.onset_delay_frames =
        std::abs(*row.detected_onset_frame - *row.true_onset_frame);

  // Lifting window: true onset up to detachment (or the sequence end).
  if (row.true_onset_frame) {
    double sum = 0.0, sum10 = 0.0;
    int n = 0, n10 = 0;
    const int end = std::min(result.lift_end_frame, row.n_frames);
    for (int f = *row.true_onset_frame; f < end; ++f) {
      const double truth =
          std::abs(episode.ground_truth[static_cast<size_t>(f)].angle_deg);
      const double measured =
          result.frames[static_cast<size_t>(f)].angle_deg;
      const double err = std::abs(measured - truth);
      sum += err;
      ++n;
      if (truth < 10.0) {
        sum10 += err;
        ++n10;
      }
    }
    row.n_window_frames = n;
    row.n_under10_frames = n10;
    if (n > 0) row.mean_abs_angle_error_deg = sum / n;
    if (n10 > 0) row.mean_abs_angle_error_under10_deg = sum10 / n10;
  }
  return row;
}

EvalReport aggregate(std::vector<SequenceReport> rows) {
  EvalReport report;
  report.n_sequences = static_cast<int>(rows.size());

  double err_sum = 0.0, err10_sum = 0.0;
  long err_n = 0, err10_n = 0;
  double delay_sum = 0.0;
  int delay_n = 0;
  int rot_within5 = 0;

  for (const SequenceReport& row : rows) {
    const bool truly_rot = row.true_class == TrialClass::Rotational;
    const bool pred_rot = row.predicted_class == TrialClass::Rotational;
    if (truly_rot) {
      ++report.n_true_rotational;
      if (pred_rot)
        ++report.rotational_correct;
      else
        ++report.false_stable;
      if (row.onset_delay_frames && *row.onset_delay_frames <= 5)
        ++rot_within5;
    } else {
      ++report.n_true_stable;
      if (pred_rot)
        ++report.false_rotational;
      else
        ++report.stable_correct;
    }
    if (row.mean_abs_angle_error_deg) {
      err_sum += *row.mean_abs_angle_error_deg * row.n_window_frames;
      err_n += row.n_window_frames;
    }
    if (row.mean_abs_angle_error_under10_deg) {
      err10_sum += *row.mean_abs_angle_error_under10_deg * row.n_under10_frames;
      err10_n += row.n_under10_frames;
    }
    if (row.onset_delay_frames) {
      delay_sum += *row.onset_delay_frames;
      ++delay_n;
    }
  }

  if (report.n_sequences > 0)
    report.classification_accuracy =
        static_cast<double>(report.rotational_correct + report.stable_correct) /
        report.n_sequences;
  if (err_n > 0) report.mean_abs_angle_error_deg = err_sum / err_n;
  if (err10_n > 0) report.mean_abs_angle_error_under10_deg = err10_sum / err10_n;
  if (delay_n > 0) report.mean_onset_delay_frames = delay_sum / delay_n;
  if (report.n_true_rotational > 0)
    report.frac_onset_within_5 =
        static_cast<double>(rot_within5) / report.n_true_rotational;

  report.rows = std::move(rows);
  return report;
}

EvalReport evaluate_corpus(const std::string& directory,
                           const PipelineConfig& config,
                           const std::string& out_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".seq")
      files.push_back(entry.path());
  if (files.empty())
    throw ParseError(directory, 0, "no .seq sequences found");
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });

  std::vector<SequenceReport> rows;
  std::ostringstream timing;
  timing << "name,ms_per_frame\n";
  double total_ms = 0.0;
  long total_frames = 0;

  for (const fs::path& path : files) {
    auto [frames, gt] = read_sequence(path.string());
    GraspEpisode episode;
    episode.frames = std::move(frames);
    episode.ground_truth = std::move(gt);
    episode.name = path.stem().string();

    const auto t0 = std::chrono::steady_clock::now();
    SequenceReport row = evaluate_sequence(episode, config);
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    timing << episode.name << ','
           << format_double(ms / std::max(1, row.n_frames)) << '\n';
    total_ms += ms;
    total_frames += row.n_frames;
    rows.push_back(std::move(row));
  }
  timing << "overall,"
         << format_double(total_ms / std::max<long>(1, total_frames)) << '\n';

  EvalReport report = aggregate(std::move(rows));
  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / "report.csv", report_csv(report));
  write_text_file(fs::path(out_dir) / "summary.csv", summary_csv(report));
  write_text_file(fs::path(out_dir) / "timing.csv", timing.str());
  return report;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "name,n_frames,true_class,predicted_class,mean_abs_angle_error_deg,"
         "mean_abs_angle_error_under10_deg,n_window_frames,n_under10_frames,"
         "true_onset_frame,detected_onset_frame,onset_delay_frames,"
         "peak_truth_deg,peak_measured_deg,used_contour\n";
  for (const SequenceReport& row : report.rows) {
    out << row.name << ',' << row.n_frames << ',' << to_string(row.true_class)
        << ',' << to_string(row.predicted_class) << ','
        << opt_cell(row.mean_abs_angle_error_deg) << ','
        << opt_cell(row.mean_abs_angle_error_under10_deg) << ','
        << row.n_window_frames << ',' << row.n_under10_frames << ','
        << opt_cell(row.true_onset_frame) << ','
        << opt_cell(row.detected_onset_frame) << ','
        << opt_cell(row.onset_delay_frames) << ','
        << format_double(row.peak_truth_deg) << ','
        << format_double(row.peak_measured_deg) << ','
        << (row.used_contour ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string summary_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "key,value\n";
  out << "n_sequences," << report.n_sequences << '\n';
  out << "n_true_rotational," << report.n_true_rotational << '\n';
  out << "n_true_stable," << report.n_true_stable << '\n';
  out << "rotational_correct," << report.rotational_correct << '\n';
  out << "stable_correct," << report.stable_correct << '\n';
  out << "false_rotational," << report.false_rotational << '\n';
  out << "false_stable," << report.false_stable << '\n';
  out << "classification_accuracy,"
      << format_double(report.classification_accuracy) << '\n';
  out << "mean_abs_angle_error_deg,"
      << format_double(report.mean_abs_angle_error_deg) << '\n';
  out << "mean_abs_angle_error_under10_deg,"
      << format_double(report.mean_abs_angle_error_under10_deg) << '\n';
  out << "mean_onset_delay_frames,"
      << format_double(report.mean_onset_delay_frames) << '\n';
  out << "frac_onset_within_5," << format_double(report.frac_onset_within_5)
      << '\n';
  return out.str();
}

CorpusCase default_corpus_case(std::uint64_t seed, int index) {
  if (index < 0 || index >= kDefaultCorpusSize)
    throw std::invalid_argument("corpus index out of range");

  static const double kMasses[] = {0.16, 0.20, 0.24};
  static const double kNoises[] = {0.15, 0.20, 0.25};

  CorpusCase c;
  c.n_frames = 100;
  c.grasp_offset_m = 0.0;
  c.params.seed = seed + kSeedStride * static_cast<std::uint64_t>(index + 1);

  if (index < 88) {
    // Rotational grasps: offsets clearly past the stability radius.
    const int k = index / 2;
    const double sign = index % 2 ? -1.0 : 1.0;
    const double d = 0.045 + k * (0.135 - 0.045) / 43.0;
    c.object.cog_offset_m = sign * d;
    c.object.mass_kg = kMasses[index % 3];
    c.params.marker_noise_px = kNoises[(index / 3) % 3];
    c.name = "case_" + pad3(index) + "_rot";
  } else if (index < 98) {
    // Rotational grasps where the object detaches mid-lift.
    const int k = index - 88;
    const double sign = k % 2 ? -1.0 : 1.0;
    c.object.cog_offset_m = sign * (0.06 + 0.008 * k);
    c.params.marker_noise_px = kNoises[k % 3];
    c.params.detach_frame = 70;
    c.name = "case_" + pad3(index) + "_rotdetach";
  } else if (index < 112) {
    // Static holds: grasp essentially at the center of gravity.
    const int k = index - 98;
    const double sign = k % 2 ? -1.0 : 1.0;
    c.object.cog_offset_m = sign * 0.0015 * ((k + 1) / 2);
    c.params.marker_noise_px = kNoises[k % 3];
    c.name = "case_" + pad3(index) + "_static";
  } else if (index < 127) {
    // Elastic twists inside the stability band: rotation settles under the
    // threshold, the grasp counts as stable.
    const int k = index - 112;
    const double sign = k % 2 ? -1.0 : 1.0;
    const double frac = 0.45 + k * (0.85 - 0.45) / 14.0;
    c.object.cog_offset_m = sign * frac * c.object.stability_radius_m;
    c.params.marker_noise_px = kNoises[k % 3];
    c.name = "case_" + pad3(index) + "_inband";
  } else {
    // Translational slips: the grasp slides instead of rotating.
    const int k = index - 127;
    c.params.translation_px_per_frame = 1.0 + 0.1 * k;
    c.params.translation_dir_deg = std::fmod(40.0 * k, 360.0);
    if (k % 2) c.params.detach_frame = 75;
    c.params.marker_noise_px = kNoises[k % 3];
    c.name = "case_" + pad3(index) + "_trans";
  }
  return c;
}

std::vector<GraspEpisode> default_corpus(std::uint64_t seed) {
  std::vector<GraspEpisode> corpus;
  corpus.reserve(kDefaultCorpusSize);
  for (int i = 0; i < kDefaultCorpusSize; ++i) {
    const CorpusCase c = default_corpus_case(seed, i);
    GraspEpisode episode =
        simulate_grasp(c.object, c.params, c.grasp_offset_m, c.n_frames);
    episode.name = c.name;
    corpus.push_back(std::move(episode));
  }
  return corpus;
}

std::vector<GraspEpisode> smallblob_corpus(std::uint64_t seed, int n) {
  std::vector<GraspEpisode> corpus;
  corpus.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    SimObject object;
    object.footprint = SmallBlobFootprint{};
    const double sign = i % 2 ? -1.0 : 1.0;
    object.cog_offset_m = sign * (0.05 + 0.004 * i);
    SimParams params;
    params.seed = seed + kSeedStride * static_cast<std::uint64_t>(i + 1);
    GraspEpisode episode = simulate_grasp(object, params, 0.0, 100);
    episode.name = "blob_" + pad3(i);
    corpus.push_back(std::move(episode));
  }
  return corpus;
}

ClosedLoopReport run_closed_loop(const SimObject& object_template,
                                 const SimParams& params,
                                 const PipelineConfig& pipeline_config,
                                 const ControllerConfig& controller_config,
                                 int n_episodes, std::uint64_t seed,
                                 bool use_oracle_plant) {
  ClosedLoopReport report;
  std::mt19937_64 rng(seed);
  const double span = 0.45 * object_template.length_m;
  std::uniform_real_distribution<double> cog_dist(-span, span);
  constexpr int kPlantFrames = 100;

  for (int e = 0; e < n_episodes; ++e) {
    SimObject object = object_template;
    object.cog_offset_m = cog_dist(rng);
    SimParams p = params;
    p.seed = seed + kSeedStride * static_cast<std::uint64_t>(e + 1);

    const Plant plant =
        use_oracle_plant
            ? make_oracle_plant(object, p, kPlantFrames)
            : make_pipeline_plant(object, p, pipeline_config, kPlantFrames);

    EpisodeRecord record = run_episode(
        init_controller(object.length_m, controller_config), plant,
        controller_config);

    ClosedLoopEpisode row;
    row.episode = e;
    row.cog_offset_m = object.cog_offset_m;
    row.regrasps = record.regrasp_count;
    row.converged = record.converged;
    row.final_offset_m = record.final_offset_m;
    // Success: the grasp the controller settled on really is stable.
    double truth_peak = 0.0;
    for (int f = 0; f < kPlantFrames; ++f)
      truth_peak = std::max(truth_peak, sim_truth_angle_deg(
                                            object, p, row.final_offset_m, f));
    row.success =
        record.converged && truth_peak <= pipeline_config.stability_angle_deg;

    report.max_regrasps = std::max(report.max_regrasps, row.regrasps);
    report.episodes.push_back(row);
    report.records.push_back(std::move(record));
  }

  if (n_episodes > 0) {
    double regrasp_sum = 0.0;
    int successes = 0;
    for (const ClosedLoopEpisode& row : report.episodes) {
      regrasp_sum += row.regrasps;
      successes += row.success ? 1 : 0;
    }
    report.success_rate = static_cast<double>(successes) / n_episodes;
    report.mean_regrasps = regrasp_sum / n_episodes;
  }
  return report;
}

std::string closed_loop_csv(const ClosedLoopReport& report) {
  std::ostringstream out;
  out << "episode,cog_offset_m,regrasps,converged,success,final_offset_m\n";
  for (const ClosedLoopEpisode& row : report.episodes) {
    out << row.episode << ',' << format_double(row.cog_offset_m) << ','
        << row.regrasps << ',' << (row.converged ? 1 : 0) << ','
        << (row.success ? 1 : 0) << ',' << format_double(row.final_offset_m)
        << '\n';
  }
  return out.str();
}

std::string closed_loop_summary_csv(const ClosedLoopReport& report) {
  std::ostringstream out;
  out << "key,value\n";
  out << "n_episodes," << report.episodes.size() << '\n';
  out << "success_rate," << format_double(report.success_rate) << '\n';
  out << "mean_regrasps," << format_double(report.mean_regrasps) << '\n';
  out << "max_regrasps," << report.max_regrasps << '\n';
  return out.str();
}

double measure_pipeline_ms_per_frame(const GraspEpisode& episode,
                                     const PipelineConfig& config,
                                     int repeats) {
  if (episode.frames.empty() || repeats < 1) return 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) {
    const SequenceResult result = run_pipeline(episode, config);
    (void)result;
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return ms / (static_cast<double>(repeats) * episode.frames.size());
}

}  // namespace tacrot
