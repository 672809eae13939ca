// tacrot: simulate grasp trials, measure rotation on marker sequences,
// evaluate corpora and run closed-loop regrasp episodes.

#include "tacrot/controller.hpp"
#include "tacrot/eval.hpp"
#include "tacrot/geometry.hpp"
#include "tacrot/io.hpp"
#include "tacrot/pipeline.hpp"
#include "tacrot/sim.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace tacrot;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir;
};

Config load_config_or_default(const GlobalOpts& opts) {
  if (opts.config_path.empty()) return Config{};
  return read_config(opts.config_path);
}

void require_out(const GlobalOpts& opts, const char* subcommand) {
  if (opts.out_dir.empty())
    throw std::invalid_argument(std::string(subcommand) +
                                " needs --out <dir> for its outputs");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

/// Loads rendered frames for a sequence when `<stem>/frame_000000.ppm` exists
/// next to the .seq file.
std::vector<IntensityFrame> sibling_images(const fs::path& seq_path,
                                           size_t n_frames) {
  const fs::path dir = seq_path.parent_path() / seq_path.stem();
  std::vector<IntensityFrame> frames;
  if (!fs::is_directory(dir)) return frames;
  for (size_t i = 0; i < n_frames; ++i) {
    const fs::path file = dir / frame_file_name(static_cast<int>(i));
    if (!fs::exists(file)) break;
    frames.push_back(read_ppm(file.string()));
  }
  return frames;
}

int cmd_simulate(const GlobalOpts& opts, const std::string& corpus, int count,
                 bool images) {
  require_out(opts, "simulate");
  fs::create_directories(opts.out_dir);

  if (corpus == "smallblob") {
    const auto episodes = smallblob_corpus(opts.seed, count > 0 ? count : 20);
    for (const auto& ep : episodes) {
      const fs::path base = fs::path(opts.out_dir) / ep.name;
      write_sequence(base.string() + ".seq", ep.frames, ep.ground_truth);
      const fs::path img_dir = fs::path(opts.out_dir) / ep.name;
      fs::create_directories(img_dir);
      for (size_t i = 0; i < ep.intensity_frames.size(); ++i)
        write_ppm((img_dir / frame_file_name(static_cast<int>(i))).string(),
                  ep.intensity_frames[i]);
    }
    std::cout << "wrote " << episodes.size() << " small-blob sequences to "
              << opts.out_dir << "\n";
    return 0;
  }
  if (corpus != "default")
    throw std::invalid_argument("unknown corpus '" + corpus +
                                "' (expected default or smallblob)");

  const int n = count > 0 ? std::min(count, kDefaultCorpusSize)
                          : kDefaultCorpusSize;
  for (int i = 0; i < n; ++i) {
    CorpusCase c = default_corpus_case(opts.seed, i);
    const GraspEpisode ep = simulate_grasp(c.object, c.params,
                                           c.grasp_offset_m, c.n_frames,
                                           images);
    const fs::path base = fs::path(opts.out_dir) / c.name;
    write_sequence(base.string() + ".seq", ep.frames, ep.ground_truth);
    if (images && !ep.intensity_frames.empty()) {
      const fs::path img_dir = fs::path(opts.out_dir) / c.name;
      fs::create_directories(img_dir);
      for (size_t f = 0; f < ep.intensity_frames.size(); ++f)
        write_ppm((img_dir / frame_file_name(static_cast<int>(f))).string(),
                  ep.intensity_frames[f]);
    }
  }
  std::cout << "wrote " << n << " sequences to " << opts.out_dir << "\n";
  return 0;
}

int cmd_estimate(const GlobalOpts& opts, const std::string& seq_path) {
  const Config config = load_config_or_default(opts);
  auto [frames, gt] = read_sequence(seq_path);

  GraspEpisode episode;
  episode.frames = std::move(frames);
  episode.ground_truth = std::move(gt);
  episode.intensity_frames = sibling_images(seq_path, episode.frames.size());
  episode.name = fs::path(seq_path).stem().string();

  const SequenceResult result = run_pipeline(episode, config.pipeline);
  const std::string csv = estimates_csv(result);

  if (opts.out_dir.empty()) {
    std::cout << csv;
  } else {
    fs::create_directories(opts.out_dir);
    const fs::path out =
        fs::path(opts.out_dir) / (episode.name + "_estimates.csv");
    write_text(out, csv);
    std::cout << "estimates: " << out.string() << "\n";
  }

  std::cout << "verdict: " << to_string(result.verdict.verdict)
            << "  peak_angle_deg: " << format_double(result.peak_angle_deg)
            << "  orientation: " << to_string(result.peak_orientation)
            << "  onset_frame: " << result.onset_frame
            << (result.used_contour ? "  (contour mode)" : "") << "\n";
  return 0;
}

int cmd_evaluate(const GlobalOpts& opts, const std::string& dir) {
  require_out(opts, "evaluate");
  const Config config = load_config_or_default(opts);
  const EvalReport report = evaluate_corpus(dir, config.pipeline, opts.out_dir);
  std::cout << summary_csv(report);
  return 0;
}

int cmd_regrasp(const GlobalOpts& opts, int episodes, double length_m,
                double mass_kg, double radius_m, int frames, bool oracle) {
  require_out(opts, "regrasp");
  const Config config = load_config_or_default(opts);

  SimObject object;
  object.length_m = length_m;
  object.mass_kg = mass_kg;
  object.stability_radius_m = radius_m;

  SimParams params;
  params.seed = opts.seed;
  (void)frames;  // episodes run the default 100-frame trial

  const ClosedLoopReport report =
      run_closed_loop(object, params, config.pipeline, config.controller,
                      episodes, opts.seed, oracle);

  fs::create_directories(opts.out_dir);
  write_text(fs::path(opts.out_dir) / "episodes.csv", closed_loop_csv(report));
  write_text(fs::path(opts.out_dir) / "closed_loop_summary.csv",
             closed_loop_summary_csv(report));
  std::cout << closed_loop_summary_csv(report);
  return 0;
}

int cmd_length(const GlobalOpts& opts, const std::string& cloud_path) {
  const Config config = load_config_or_default(opts);
  const PointCloud cloud = read_point_cloud(cloud_path);
  const ObjectGeometry geometry =
      estimate_object_geometry(cloud, config.geometry, opts.seed);
  if (geometry.status != GeometryStatus::Ok)
    throw std::invalid_argument(std::string("geometry estimation failed: ") +
                                to_string(geometry.status));

  std::cout << "length_m,axis_x,axis_y,center_x,center_y\n"
            << format_double(geometry.length_m) << ','
            << format_double(geometry.axis_2d.x()) << ','
            << format_double(geometry.axis_2d.y()) << ','
            << format_double(geometry.center_2d.x()) << ','
            << format_double(geometry.center_2d.y()) << "\n";
  std::cout << "plane_nx,plane_ny,plane_nz,plane_d\n"
            << format_double(geometry.plane.normal.x()) << ','
            << format_double(geometry.plane.normal.y()) << ','
            << format_double(geometry.plane.normal.z()) << ','
            << format_double(geometry.plane.offset) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile rotation measurement and regrasp control"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are accepted after the subcommand too

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "config file (key = value)");
  app.add_option("--seed", opts.seed, "random seed");
  app.add_option("--out", opts.out_dir, "output directory");

  auto* sim = app.add_subcommand("simulate", "generate a synthetic corpus");
  std::string corpus = "default";
  int count = 0;
  bool images = false;
  sim->add_option("--corpus", corpus, "default | smallblob");
  sim->add_option("--count", count, "limit the number of sequences");
  sim->add_flag("--images", images, "render tactile images as PPM frames");

  auto* est = app.add_subcommand("estimate", "measure rotation on a sequence");
  std::string seq_path;
  est->add_option("sequence", seq_path, "marker sequence (.seq)")->required();

  auto* ev = app.add_subcommand("evaluate", "evaluate a sequence corpus");
  std::string eval_dir;
  ev->add_option("directory", eval_dir, "directory of .seq files")->required();

  auto* rg = app.add_subcommand("regrasp", "run closed-loop regrasp episodes");
  int episodes = 100;
  double length_m = 0.30, mass_kg = 0.20, radius_m = 0.0375;
  int frames = 100;
  bool oracle = false;
  rg->add_option("--episodes", episodes, "number of episodes");
  rg->add_option("--length", length_m, "object length, meters");
  rg->add_option("--mass", mass_kg, "object mass, kg");
  rg->add_option("--radius", radius_m, "stability radius, meters");
  rg->add_option("--frames", frames, "frames per simulated grasp");
  rg->add_flag("--oracle", oracle, "answer from ground truth, skip the pipeline");

  auto* len = app.add_subcommand("length", "object length from a point cloud");
  std::string cloud_path;
  len->add_option("cloud", cloud_path, "point cloud CSV (x,y,z)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) return cmd_simulate(opts, corpus, count, images);
    if (*est) return cmd_estimate(opts, seq_path);
    if (*ev) return cmd_evaluate(opts, eval_dir);
    if (*rg)
      return cmd_regrasp(opts, episodes, length_m, mass_kg, radius_m, frames,
                         oracle);
    if (*len) return cmd_length(opts, cloud_path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ControllerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable: require_subcommand(1)
}
