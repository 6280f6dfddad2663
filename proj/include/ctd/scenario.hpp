#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctd/engine.hpp"

// Synthetic stimulus pipeline: parametric 2D object paths in front of a fixed
// sensor array, distance-to-rate coding, and spike train emission. All units
// SI (meters, seconds); the vehicle itself does not move.

namespace ctd {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct SensorLayout {
  std::vector<Vec2> positions;  // left to right, strictly increasing x
  double range = 2.0;           // sensing cutoff R
  double rate_min = 10.0;       // spikes/s at the range boundary
  double rate_max = 200.0;      // spikes/s at contact
};

enum class TrajectoryKind { Line, Arc, Waypoints };

struct Waypoint {
  double t = 0.0;  // seconds
  Vec2 pos;
};

struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::Line;
  // line: start -> end at constant speed, held at end afterwards
  Vec2 start;
  Vec2 end;
  double speed = 1.0;  // m/s
  // arc: center + radius, start_angle -> end_angle at angular_speed, held after
  Vec2 center;
  double radius = 1.0;        // m
  double start_angle = 0.0;   // rad
  double end_angle = 0.0;     // rad
  double angular_speed = 1.0; // rad/s, magnitude
  // waypoints: piecewise-linear in time, clamped at both ends
  std::vector<Waypoint> waypoints;
};

enum class Encoding { Regular, Poisson };

struct Scenario {
  SensorLayout layout;
  std::vector<Trajectory> objects;
  double duration = 2.0;  // s
  double dt = 0.001;      // s per step
  std::uint64_t seed = 0;
  Encoding encoding = Encoding::Regular;
};

// Throws std::invalid_argument naming the broken invariant.
void check_scenario(const Scenario& scenario);

int num_steps(double duration, double dt);

// One position per timestep for t = 0..num_steps-1, held at the final point
// once the path ends.
std::vector<Vec2> sample_path(const Trajectory& trajectory, double duration,
                              double dt);

// Linear rate code: rate_max at contact, rate_min at the range boundary,
// zero beyond it.
double spike_rate(double distance, const SensorLayout& layout);

// One train per sensor. Per step each sensor takes the max rate over all
// objects. Regular encoding integrates rate*dt in a phase accumulator that
// starts at zero and emits at most one spike per step; Poisson encoding draws
// each step with probability rate*dt from a stream seeded by (seed, sensor).
// Throws std::invalid_argument when rate_max*dt > 1 under Poisson.
std::vector<SpikeTrain> encode(const Scenario& scenario);

// Constant-rate regular train over the given horizon; the same accumulator
// rule encode() uses.
SpikeTrain regular_train(int source, double rate, double dt, int horizon);

// JSON scenario files; see README for the schema. Throws std::runtime_error
// with a parse/validation message.
Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json_text(const Scenario& scenario);

}  // namespace ctd
