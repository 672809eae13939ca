#include "tacrot/controller.hpp"

#include "tacrot/io.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace tacrot {
namespace {

double max_offset(const ControllerState& state, const ControllerConfig& cfg) {
  return 0.5 * state.object_length_m * (1.0 - cfg.edge_margin_ratio);
}

double clamp_to_object(double offset, const ControllerState& state,
                       const ControllerConfig& cfg) {
  const double lim = max_offset(state, cfg);
  return std::clamp(offset, -lim, lim);
}

/// Keeps a move inside the bracket; a target at or past an endpoint becomes
/// the midpoint between the current offset and that endpoint, so the
/// remaining interval still shrinks geometrically.
double apply_bracket(double target, double current,
                     const std::pair<double, double>& bracket) {
  if (target <= bracket.first) return 0.5 * (current + bracket.first);
  if (target >= bracket.second) return 0.5 * (current + bracket.second);
  return target;
}

int direction_for(Orientation o, const ControllerConfig& cfg) {
  int d = o == Orientation::CW ? 1 : -1;
  return cfg.flip_direction ? -d : d;
}

Orientation parse_orientation(const std::string& s, int line) {
  if (s == "cw") return Orientation::CW;
  if (s == "ccw") return Orientation::CCW;
  if (s == "ambiguous") return Orientation::Ambiguous;
  throw ParseError("<episode>", line, "unknown orientation '" + s + "'");
}

GraspVerdict parse_verdict(const std::string& s, int line) {
  if (s == "StableGrasp") return GraspVerdict::StableGrasp;
  if (s == "RotationalFailure") return GraspVerdict::RotationalFailure;
  throw ParseError("<episode>", line, "unknown verdict '" + s + "'");
}

}  // namespace

const char* to_string(ControlPhase p) {
  switch (p) {
    case ControlPhase::Initial: return "Initial";
    case ControlPhase::Coarse: return "Coarse";
    case ControlPhase::Fine: return "Fine";
    case ControlPhase::Done: return "Done";
  }
  return "?";
}

ControllerState init_controller(double object_length_m,
                                const ControllerConfig& config) {
  if (!(object_length_m > 0.0))
    throw ControllerError("object length must be positive");
  ControllerState state;
  state.object_length_m = object_length_m;
  state.grasp_offset_m = 0.0;
  state.step_size_m = 0.4 * object_length_m;
  state.phase = ControlPhase::Initial;
  (void)config;
  return state;
}

GraspCommand make_command(const ControllerState& state,
                          const ControllerConfig& config) {
  return {state.grasp_offset_m, config.lift_height_m, config.hold_time_s};
}

ControlStep next_grasp(const ControllerState& state,
                       const StabilityVerdict& verdict,
                       std::optional<Orientation> orientation,
                       const ControllerConfig& config) {
  if (state.phase == ControlPhase::Done)
    throw ControllerError("episode already finished");

  ControlStep out;
  out.state = state;

  if (verdict.verdict == GraspVerdict::StableGrasp) {
    out.state.phase = ControlPhase::Done;
    return out;
  }

  if (out.state.regrasp_count >= config.max_regrasps)
    throw ControllerError("regrasp budget exhausted");

  const bool ambiguous = !orientation || *orientation == Orientation::Ambiguous;
  if (ambiguous) {
    if (++out.state.ambiguous_retries > 1)
      throw ControllerError("two consecutive ambiguous verdicts");
    ++out.state.regrasp_count;  // a retry still costs a grasp
    out.command = make_command(out.state, config);
    return out;
  }
  out.state.ambiguous_retries = 0;
  out.state.last_orientation = *orientation;

  const int dir = direction_for(*orientation, config);
  const double x = out.state.grasp_offset_m;
  double target = 0.0;

  if (out.state.phase == ControlPhase::Initial) {
    out.state.direction = dir;
    target = clamp_to_object(x + dir * out.state.step_size_m, out.state, config);
    out.state.step_size_m = out.state.object_length_m / 6.0;  // base step
    out.state.phase = ControlPhase::Coarse;
  } else if (dir == out.state.direction) {
    target = clamp_to_object(x + dir * out.state.step_size_m, out.state, config);
    if (out.state.bracket) target = apply_bracket(target, x, *out.state.bracket);
  } else {
    // The orientation flipped: the balance point sits between the two most
    // recent offsets. Bracket them, reverse and halve the step.
    const double prev = out.state.prev_offset_m.value_or(0.0);
    out.state.bracket = std::make_pair(std::min(prev, x), std::max(prev, x));
    out.state.direction = dir;
    out.state.step_size_m *= 0.5;
    out.state.phase = ControlPhase::Fine;
    target = clamp_to_object(x + dir * out.state.step_size_m, out.state, config);
    target = apply_bracket(target, x, *out.state.bracket);
  }

  if (std::abs(target - x) < 1e-12)
    throw ControllerError("no progress: offset pinned at the object edge");

  out.state.prev_offset_m = x;
  out.state.grasp_offset_m = target;
  ++out.state.regrasp_count;
  out.command = make_command(out.state, config);
  return out;
}

EpisodeRecord run_episode(ControllerState state, const Plant& plant,
                          const ControllerConfig& config) {
  EpisodeRecord record;
  int step_index = 0;
  while (true) {
    const GraspCommand command = make_command(state, config);
    const PlantResponse response = plant(command);
    record.steps.push_back({step_index, command.offset_m,
                            response.verdict.verdict, response.orientation,
                            response.verdict.measured_angle_deg});
    std::optional<Orientation> orientation;
    if (response.orientation != Orientation::Ambiguous)
      orientation = response.orientation;
    ControlStep cs;
    try {
      cs = next_grasp(state, response.verdict, orientation, config);
    } catch (const ControllerError& e) {
      record.error = e.what();
      break;
    }
    state = cs.state;
    if (!cs.command) break;
    ++step_index;
  }
  record.final_phase = state.phase;
  record.regrasp_count = state.regrasp_count;
  record.final_offset_m = state.grasp_offset_m;
  record.converged = state.phase == ControlPhase::Done && record.error.empty();
  return record;
}

std::string episode_to_text(const EpisodeRecord& record) {
  std::ostringstream out;
  for (const EpisodeStep& s : record.steps) {
    out << s.step << ' ' << format_double(s.offset_m) << ' '
        << to_string(s.verdict) << ' ' << to_string(s.orientation) << ' '
        << format_double(s.angle_deg) << '\n';
  }
  return out.str();
}

std::vector<EpisodeStep> episode_from_text(const std::string& text) {
  std::vector<EpisodeStep> steps;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    EpisodeStep s;
    std::string verdict, orientation, extra;
    if (!(ls >> s.step >> s.offset_m >> verdict >> orientation >> s.angle_deg))
      throw ParseError("<episode>", line_no, "expected 5 fields");
    if (ls >> extra)
      throw ParseError("<episode>", line_no, "trailing tokens");
    s.verdict = parse_verdict(verdict, line_no);
    s.orientation = parse_orientation(orientation, line_no);
    steps.push_back(s);
  }
  return steps;
}

Plant plant_from_script(std::vector<EpisodeStep> script) {
  auto index = std::make_shared<size_t>(0);
  return [script = std::move(script), index](const GraspCommand&) {
    if (*index >= script.size())
      throw ControllerError("episode script exhausted");
    const EpisodeStep& s = script[(*index)++];
    PlantResponse response;
    response.verdict.verdict = s.verdict;
    response.verdict.measured_angle_deg = s.angle_deg;
    response.orientation = s.orientation;
    return response;
  };
}

}  // namespace tacrot
