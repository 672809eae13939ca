#include "tacrot/io.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace tacrot {
namespace {

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  return out;
}

// Strict token-wise parsing so a malformed record reports its line.
class LineTokens {
 public:
  LineTokens(const std::string& path, int line_no, const std::string& line)
      : path_(path), line_no_(line_no), stream_(line) {}

  double next_double(const char* what) {
    double v;
    if (!(stream_ >> v))
      throw ParseError(path_, line_no_, std::string("expected ") + what);
    return v;
  }

  long next_int(const char* what) {
    long v;
    if (!(stream_ >> v))
      throw ParseError(path_, line_no_, std::string("expected ") + what);
    return v;
  }

  bool next_bool(const char* what) {
    long v = next_int(what);
    if (v != 0 && v != 1)
      throw ParseError(path_, line_no_,
                       std::string(what) + " must be 0 or 1");
    return v == 1;
  }

  void expect_end() {
    std::string rest;
    if (stream_ >> rest)
      throw ParseError(path_, line_no_, "trailing tokens on line");
  }

 private:
  const std::string& path_;
  int line_no_;
  std::istringstream stream_;
};

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<MarkerFrame> read_sequence_frames(const std::string& path) {
  auto in = open_in(path);
  std::vector<MarkerFrame> frames;
  std::set<int> id_set;  // id set of the first frame, fixed for the sequence
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LineTokens tok(path, line_no, line);
    MarkerFrame frame;
    frame.frame_index = static_cast<int>(tok.next_int("frame index"));
    frame.time_s = tok.next_double("timestamp");
    long count = tok.next_int("marker count");
    if (count < 0) throw ParseError(path, line_no, "negative marker count");
    std::set<int> seen;
    frame.markers.reserve(static_cast<size_t>(count));
    for (long i = 0; i < count; ++i) {
      Marker m;
      m.id = static_cast<int>(tok.next_int("marker id"));
      m.x = tok.next_double("marker x");
      m.y = tok.next_double("marker y");
      m.visible = tok.next_bool("visibility flag");
      if (!seen.insert(m.id).second)
        throw ParseError(path, line_no,
                         "duplicate marker id " + std::to_string(m.id));
      frame.markers.push_back(m);
    }
    tok.expect_end();

    if (!frames.empty()) {
      if (frame.frame_index <= frames.back().frame_index)
        throw ParseError(path, line_no, "non-monotone frame_index");
      if (frame.time_s < frames.back().time_s)
        throw ParseError(path, line_no, "decreasing timestamp");
      if (seen != id_set)
        throw ParseError(path, line_no,
                         "marker id set differs from the first frame");
    } else {
      if (frame.frame_index < 0)
        throw ParseError(path, line_no, "negative frame index");
      id_set = seen;
    }
    frames.push_back(std::move(frame));
  }
  if (frames.empty()) throw ParseError(path, 0, "empty sequence file");
  return frames;
}

void write_sequence_frames(const std::string& path,
                           const std::vector<MarkerFrame>& frames) {
  auto out = open_out(path);
  for (const auto& f : frames) {
    out << f.frame_index << ' ' << format_double(f.time_s) << ' '
        << f.markers.size();
    for (const auto& m : f.markers)
      out << ' ' << m.id << ' ' << format_double(m.x) << ' '
          << format_double(m.y) << ' ' << (m.visible ? 1 : 0);
    out << '\n';
  }
}

std::vector<GroundTruthFrame> read_ground_truth(const std::string& path) {
  auto in = open_in(path);
  std::vector<GroundTruthFrame> gt;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LineTokens tok(path, line_no, line);
    GroundTruthFrame g;
    g.frame_index = static_cast<int>(tok.next_int("frame index"));
    g.angle_deg = tok.next_double("angle");
    g.rotating = tok.next_bool("rotating flag");
    tok.expect_end();
    if (!gt.empty() && g.frame_index <= gt.back().frame_index)
      throw ParseError(path, line_no, "non-monotone frame_index");
    gt.push_back(g);
  }
  return gt;
}

void write_ground_truth(const std::string& path,
                        const std::vector<GroundTruthFrame>& gt) {
  auto out = open_out(path);
  for (const auto& g : gt)
    out << g.frame_index << ' ' << format_double(g.angle_deg) << ' '
        << (g.rotating ? 1 : 0) << '\n';
}

std::pair<std::vector<MarkerFrame>, std::vector<GroundTruthFrame>>
read_sequence(const std::string& path) {
  auto frames = read_sequence_frames(path);
  std::vector<GroundTruthFrame> gt;
  const std::string gt_path = path + ".gt";
  if (std::filesystem::exists(gt_path)) {
    gt = read_ground_truth(gt_path);
    if (gt.size() != frames.size())
      throw ParseError(gt_path, 0, "ground truth frame count differs from sequence");
    for (size_t i = 0; i < gt.size(); ++i)
      if (gt[i].frame_index != frames[i].frame_index)
        throw ParseError(gt_path, static_cast<int>(i + 1),
                         "ground truth frame index does not match sequence");
  }
  return {std::move(frames), std::move(gt)};
}

void write_sequence(const std::string& path,
                    const std::vector<MarkerFrame>& frames,
                    const std::vector<GroundTruthFrame>& gt) {
  write_sequence_frames(path, frames);
  if (!gt.empty()) write_ground_truth(path + ".gt", gt);
}

PointCloud read_point_cloud(const std::string& path) {
  auto in = open_in(path);
  PointCloud cloud;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    LineTokens tok(path, line_no, line);
    Vec3 p;
    p.x() = tok.next_double("x");
    p.y() = tok.next_double("y");
    p.z() = tok.next_double("z");
    tok.expect_end();
    if (!p.allFinite()) throw ParseError(path, line_no, "non-finite coordinate");
    cloud.points.push_back(p);
  }
  if (cloud.points.size() < 3)
    throw ParseError(path, 0, "point cloud needs at least 3 points");
  return cloud;
}

void write_point_cloud(const std::string& path, const PointCloud& cloud) {
  auto out = open_out(path);
  for (const auto& p : cloud.points)
    out << format_double(p.x()) << ',' << format_double(p.y()) << ','
        << format_double(p.z()) << '\n';
}

IntensityFrame read_ppm(const std::string& path) {
  auto in = open_in(path, /*binary=*/true);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw ParseError(path, 0, "not a binary PPM (P6) file");
  int w = 0, h = 0, maxval = 0;
  // Header tokens may be separated by whitespace or comment lines.
  auto next_header_int = [&](int& v) {
    while (true) {
      int c = in.peek();
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    if (!(in >> v)) throw ParseError(path, 0, "truncated PPM header");
  };
  next_header_int(w);
  next_header_int(h);
  next_header_int(maxval);
  if (w <= 0 || h <= 0) throw ParseError(path, 0, "invalid PPM dimensions");
  if (maxval != 255) throw ParseError(path, 0, "only 8-bit PPM supported");
  in.get();  // single whitespace after maxval
  IntensityFrame frame(w, h);
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<char> buf(n * 3);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<size_t>(in.gcount()) != buf.size())
    throw ParseError(path, 0, "truncated PPM pixel data");
  for (size_t i = 0; i < n; ++i) {
    frame.r[i] = static_cast<std::uint8_t>(buf[3 * i]);
    frame.g[i] = static_cast<std::uint8_t>(buf[3 * i + 1]);
    frame.b[i] = static_cast<std::uint8_t>(buf[3 * i + 2]);
  }
  return frame;
}

void write_ppm(const std::string& path, const IntensityFrame& frame) {
  auto out = open_out(path, /*binary=*/true);
  out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
  const size_t n = static_cast<size_t>(frame.width) * frame.height;
  std::vector<char> buf(n * 3);
  for (size_t i = 0; i < n; ++i) {
    buf[3 * i] = static_cast<char>(frame.r[i]);
    buf[3 * i + 1] = static_cast<char>(frame.g[i]);
    buf[3 * i + 2] = static_cast<char>(frame.b[i]);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.ppm", index);
  return buf;
}

namespace {

struct ConfigBinding {
  enum Kind { Int, Double, Bool } kind;
  void* ptr;
};

std::unordered_map<std::string, ConfigBinding> config_bindings(Config& c) {
  auto i = [](int& v) { return ConfigBinding{ConfigBinding::Int, &v}; };
  auto d = [](double& v) { return ConfigBinding{ConfigBinding::Double, &v}; };
  auto b = [](bool& v) { return ConfigBinding{ConfigBinding::Bool, &v}; };
  PipelineConfig& p = c.pipeline;
  GeometryConfig& g = c.geometry;
  ControllerConfig& r = c.controller;
  return {
      {"soft_stable_window", i(p.soft_stable_window)},
      {"hard_stable_frame", i(p.hard_stable_frame)},
      {"soft_stable_delta_px", d(p.soft_stable_delta_px)},
      {"onset_angle_threshold_deg", d(p.onset_angle_threshold_deg)},
      {"onset_motion_threshold_px", d(p.onset_motion_threshold_px)},
      {"stability_angle_deg", d(p.stability_angle_deg)},
      {"vote_dominance_ratio", d(p.vote_dominance_ratio)},
      {"svd_translation_ratio", d(p.svd_translation_ratio)},
      {"contact_intensity_threshold", i(p.contact_intensity_threshold)},
      {"min_contact_markers", i(p.min_contact_markers)},
      {"noise_floor_px", d(p.noise_floor_px)},
      {"cor_center_exclusion_px", d(p.cor_center_exclusion_px)},
      {"weight_rows_by_motion", b(p.weight_rows_by_motion)},
      {"min_eccentricity", d(p.min_eccentricity)},
      {"min_contour_area_px", i(p.min_contour_area_px)},
      {"contour_onset_deg", d(p.contour_onset_deg)},
      {"ransac_iterations", i(g.ransac_iterations)},
      {"ransac_inlier_threshold_m", d(g.ransac_inlier_threshold_m)},
      {"min_plane_inlier_ratio", d(g.min_plane_inlier_ratio)},
      {"length_percentile", d(g.length_percentile)},
      {"euclidean_length", b(g.euclidean_length)},
      {"max_regrasps", i(r.max_regrasps)},
      {"flip_direction", b(r.flip_direction)},
      {"edge_margin_ratio", d(r.edge_margin_ratio)},
      {"lift_height_m", d(r.lift_height_m)},
      {"hold_time_s", d(r.hold_time_s)},
  };
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config read_config(const std::string& path) {
  auto in = open_in(path);
  Config config;
  auto bindings = config_bindings(config);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path, line_no, "expected `key = value`");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = bindings.find(key);
    if (it == bindings.end())
      throw ParseError(path, line_no, "unknown key `" + key + "`");
    const auto& bind = it->second;
    try {
      switch (bind.kind) {
        case ConfigBinding::Int:
          *static_cast<int*>(bind.ptr) = std::stoi(value);
          break;
        case ConfigBinding::Double:
          *static_cast<double*>(bind.ptr) = std::stod(value);
          break;
        case ConfigBinding::Bool:
          if (value == "true" || value == "1")
            *static_cast<bool*>(bind.ptr) = true;
          else if (value == "false" || value == "0")
            *static_cast<bool*>(bind.ptr) = false;
          else
            throw std::invalid_argument("bool");
          break;
      }
    } catch (const std::exception&) {
      throw ParseError(path, line_no, "invalid value for `" + key + "`");
    }
  }
  std::string why;
  if (!config.pipeline.valid(&why)) throw ParseError(path, 0, why);
  return config;
}

void write_config(const std::string& path, const Config& config) {
  auto out = open_out(path);
  Config copy = config;
  auto bindings = config_bindings(copy);
  // Stable output order.
  std::vector<std::string> keys;
  keys.reserve(bindings.size());
  for (const auto& [k, v] : bindings) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) {
    const auto& bind = bindings.at(k);
    out << k << " = ";
    switch (bind.kind) {
      case ConfigBinding::Int:
        out << *static_cast<int*>(bind.ptr);
        break;
      case ConfigBinding::Double:
        out << format_double(*static_cast<double*>(bind.ptr));
        break;
      case ConfigBinding::Bool:
        out << (*static_cast<bool*>(bind.ptr) ? "true" : "false");
        break;
    }
    out << '\n';
  }
}

}  // namespace tacrot
