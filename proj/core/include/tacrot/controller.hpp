#pragma once

#include "tacrot/config.hpp"
#include "tacrot/rotation.hpp"
#include "tacrot/types.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tacrot {

class ControllerError : public std::runtime_error {
 public:
  explicit ControllerError(const std::string& what)
      : std::runtime_error(what) {}
};

enum class ControlPhase { Initial, Coarse, Fine, Done };

const char* to_string(ControlPhase p);

/// Regrasp controller state. Offsets are meters along the object's principal
/// axis, 0 at the geometric center, and always clamped to the object:
/// |offset| <= 0.5 * L * (1 - edge_margin_ratio).
struct ControllerState {
  double object_length_m = 0.0;
  double grasp_offset_m = 0.0;
  std::optional<double> prev_offset_m;  // previous distinct grasp offset
  double step_size_m = 0.0;
  int direction = 0;  // +1 / -1, 0 before the first failure
  std::optional<Orientation> last_orientation;
  std::optional<std::pair<double, double>> bracket;  // visited offsets, low < high
  int regrasp_count = 0;
  int ambiguous_retries = 0;
  ControlPhase phase = ControlPhase::Initial;
};

struct GraspCommand {
  double offset_m = 0.0;
  double lift_height_m = 0.05;
  double hold_time_s = 3.0;
};

/// Starts at the geometric center with the coarse step 0.4 * L.
/// Throws ControllerError for a non-positive length.
ControllerState init_controller(double object_length_m,
                                const ControllerConfig& config = {});

GraspCommand make_command(const ControllerState& state,
                          const ControllerConfig& config = {});

struct ControlStep {
  ControllerState state;
  std::optional<GraspCommand> command;  // empty when Done
};

/// One controller transition for the verdict of the current grasp:
///  - StableGrasp: Done, no further command.
///  - First RotationalFailure: the rotation orientation picks the direction
///    (clockwise moves +1 under the default mounting; flip_direction inverts)
///    and the robot moves 0.4 * L; later failures use the base step L/6.
///  - Same orientation as the previous failure: continue in that direction by
///    the current step.
///  - Flipped orientation: the center of gravity was passed, so the two most
///    recent offsets become the bracket, direction reverses, and the step is
///    halved; every later move stays inside the bracket.
///  - Ambiguous orientation: one retry at the same offset, then an error.
/// Throws ControllerError when phase is Done, on a second consecutive
/// ambiguous verdict, or past max_regrasps commands.
ControlStep next_grasp(const ControllerState& state,
                       const StabilityVerdict& verdict,
                       std::optional<Orientation> orientation,
                       const ControllerConfig& config = {});

/// Plant response to a grasp command: the stability verdict of that grasp and
/// the rotation orientation when one was measured (Ambiguous acts as "none").
struct PlantResponse {
  StabilityVerdict verdict;
  Orientation orientation = Orientation::Ambiguous;
};

using Plant = std::function<PlantResponse(const GraspCommand&)>;

struct EpisodeStep {
  int step = 0;
  double offset_m = 0.0;
  GraspVerdict verdict = GraspVerdict::StableGrasp;
  Orientation orientation = Orientation::Ambiguous;
  double angle_deg = 0.0;
};

struct EpisodeRecord {
  std::vector<EpisodeStep> steps;
  ControlPhase final_phase = ControlPhase::Initial;
  bool converged = false;
  int regrasp_count = 0;
  double final_offset_m = 0.0;
  std::string error;  // non-empty when the controller gave up
};

/// Runs grasp -> verdict -> regrasp until Done or a controller error.
/// Deterministic for a deterministic plant; the step list replayed through a
/// recorded-log plant reproduces the identical trace.
EpisodeRecord run_episode(ControllerState state, const Plant& plant,
                          const ControllerConfig& config = {});

// Episode records as line-delimited text: `step offset_m verdict orientation
// angle_deg`, one step per line.
std::string episode_to_text(const EpisodeRecord& record);
std::vector<EpisodeStep> episode_from_text(const std::string& text);

/// Replays a recorded trace as a plant: response k comes from step k,
/// regardless of the commanded offset.
Plant plant_from_script(std::vector<EpisodeStep> script);

}  // namespace tacrot
