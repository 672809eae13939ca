#pragma once

#include "tacrot/config.hpp"
#include "tacrot/types.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tacrot {

/// Thrown on malformed or invariant-violating input files. Carries the file
/// path and, when known, the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, int line, const std::string& what)
      : std::runtime_error(path + (line > 0 ? ":" + std::to_string(line) : "") +
                           ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

// Marker sequences: one frame per line,
//   frame t marker_count (id x y visible)*
// whitespace-separated decimal. Doubles are written with enough digits to
// round-trip exactly.
std::vector<MarkerFrame> read_sequence_frames(const std::string& path);
void write_sequence_frames(const std::string& path,
                           const std::vector<MarkerFrame>& frames);

// Ground-truth sidecar `<name>.gt`: lines `frame angle_deg rotating`.
std::vector<GroundTruthFrame> read_ground_truth(const std::string& path);
void write_ground_truth(const std::string& path,
                        const std::vector<GroundTruthFrame>& gt);

/// Reads a sequence plus its `.gt` sidecar when one exists next to it.
/// Ground-truth entries must cover exactly the frame indices of the sequence.
std::pair<std::vector<MarkerFrame>, std::vector<GroundTruthFrame>>
read_sequence(const std::string& path);

/// Writes the sequence and, when ground truth is non-empty, the sidecar.
void write_sequence(const std::string& path,
                    const std::vector<MarkerFrame>& frames,
                    const std::vector<GroundTruthFrame>& gt = {});

// Point clouds: CSV `x,y,z` in meters, no header, at least 3 points.
PointCloud read_point_cloud(const std::string& path);
void write_point_cloud(const std::string& path, const PointCloud& cloud);

// Binary PPM (P6), 8-bit, channel-interleaved on disk.
IntensityFrame read_ppm(const std::string& path);
void write_ppm(const std::string& path, const IntensityFrame& frame);

/// Frame file name inside a sequence directory: frame_%06d.ppm.
std::string frame_file_name(int index);

// Flat `key = value` config file. Unknown keys are an error. '#' starts a
// comment, blank lines are ignored.
Config read_config(const std::string& path);
void write_config(const std::string& path, const Config& config);

// Formats a double with enough precision to round-trip exactly.
std::string format_double(double v);

}  // namespace tacrot
