#include "ctd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ctd {

void check_scenario(const Scenario& s) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("scenario: " + what);
  };
  if (s.layout.positions.empty()) fail("layout has no sensors");
  for (std::size_t i = 1; i < s.layout.positions.size(); ++i)
    if (!(s.layout.positions[i - 1].x < s.layout.positions[i].x))
      fail("sensor positions not strictly increasing in x");
  if (!(s.layout.range > 0.0)) fail("range must be > 0");
  if (!(s.layout.rate_min > 0.0 && s.layout.rate_min < s.layout.rate_max))
    fail("rates must satisfy 0 < rate_min < rate_max");
  if (s.objects.empty()) fail("at least one object required");
  if (!(s.duration > 0.0)) fail("duration must be > 0");
  if (!(s.dt > 0.0)) fail("dt must be > 0");
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const Trajectory& tr = s.objects[i];
    const std::string name = "object " + std::to_string(i) + ": ";
    switch (tr.kind) {
      case TrajectoryKind::Line:
        if (!(tr.speed > 0.0)) fail(name + "speed must be > 0");
        break;
      case TrajectoryKind::Arc:
        if (!(tr.radius > 0.0)) fail(name + "radius must be > 0");
        if (!(tr.angular_speed > 0.0)) fail(name + "angular_speed must be > 0");
        break;
      case TrajectoryKind::Waypoints:
        if (tr.waypoints.empty()) fail(name + "waypoints empty");
        for (std::size_t k = 1; k < tr.waypoints.size(); ++k)
          if (!(tr.waypoints[k - 1].t < tr.waypoints[k].t))
            fail(name + "waypoint times not strictly increasing");
        break;
    }
  }
}

int num_steps(double duration, double dt) {
  return std::max(1, static_cast<int>(std::llround(duration / dt)));
}

namespace {

Vec2 line_at(const Trajectory& tr, double t) {
  const double dx = tr.end.x - tr.start.x;
  const double dy = tr.end.y - tr.start.y;
  const double length = std::hypot(dx, dy);
  if (length == 0.0) return tr.start;
  const double travelled = std::min(tr.speed * t, length);
  const double f = travelled / length;
  return {tr.start.x + f * dx, tr.start.y + f * dy};
}

Vec2 arc_at(const Trajectory& tr, double t) {
  const double span = tr.end_angle - tr.start_angle;
  const double dir = span < 0.0 ? -1.0 : 1.0;
  const double swept = std::min(tr.angular_speed * t, std::abs(span));
  const double theta = tr.start_angle + dir * swept;
  return {tr.center.x + tr.radius * std::cos(theta),
          tr.center.y + tr.radius * std::sin(theta)};
}

Vec2 waypoints_at(const Trajectory& tr, double t) {
  const std::vector<Waypoint>& w = tr.waypoints;
  if (t <= w.front().t) return w.front().pos;
  if (t >= w.back().t) return w.back().pos;
  std::size_t hi = 1;
  while (w[hi].t < t) ++hi;
  const Waypoint& a = w[hi - 1];
  const Waypoint& b = w[hi];
  const double f = (t - a.t) / (b.t - a.t);
  return {a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y)};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over seed + stream index
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<Vec2> sample_path(const Trajectory& trajectory, double duration,
                              double dt) {
  const int steps = num_steps(duration, dt);
  std::vector<Vec2> out;
  out.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    switch (trajectory.kind) {
      case TrajectoryKind::Line: out.push_back(line_at(trajectory, t)); break;
      case TrajectoryKind::Arc: out.push_back(arc_at(trajectory, t)); break;
      case TrajectoryKind::Waypoints: out.push_back(waypoints_at(trajectory, t)); break;
    }
  }
  return out;
}

double spike_rate(double distance, const SensorLayout& layout) {
  if (distance > layout.range) return 0.0;
  return layout.rate_min +
         (layout.rate_max - layout.rate_min) * (1.0 - distance / layout.range);
}

std::vector<SpikeTrain> encode(const Scenario& scenario) {
  check_scenario(scenario);
  if (scenario.encoding == Encoding::Poisson &&
      scenario.layout.rate_max * scenario.dt > 1.0)
    throw std::invalid_argument(
        "scenario: rate_max*dt > 1; dt too coarse for Poisson encoding");

  const int steps = num_steps(scenario.duration, scenario.dt);
  std::vector<std::vector<Vec2>> paths;
  paths.reserve(scenario.objects.size());
  for (const Trajectory& tr : scenario.objects)
    paths.push_back(sample_path(tr, scenario.duration, scenario.dt));

  std::vector<SpikeTrain> trains;
  const std::size_t sensors = scenario.layout.positions.size();
  for (std::size_t k = 0; k < sensors; ++k) {
    const Vec2 sensor = scenario.layout.positions[k];
    SpikeTrain train;
    train.source = static_cast<int>(k);
    train.horizon = steps;

    std::mt19937_64 rng(mix_seed(scenario.seed, k));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double acc = 0.0;
    for (int t = 0; t < steps; ++t) {
      double rate = 0.0;
      for (const std::vector<Vec2>& path : paths) {
        const double d = std::hypot(path[t].x - sensor.x, path[t].y - sensor.y);
        rate = std::max(rate, spike_rate(d, scenario.layout));
      }
      const double p = rate * scenario.dt;
      if (scenario.encoding == Encoding::Regular) {
        acc += p;
        if (acc >= 1.0) {
          train.times.push_back(t);
          acc = std::min(acc - 1.0, 1.0);  // saturate at one spike per step
        }
      } else {
        if (uniform(rng) < p) train.times.push_back(t);
      }
    }
    trains.push_back(std::move(train));
  }
  return trains;
}

SpikeTrain regular_train(int source, double rate, double dt, int horizon) {
  SpikeTrain train;
  train.source = source;
  train.horizon = horizon;
  double acc = 0.0;
  for (int t = 0; t < horizon; ++t) {
    acc += rate * dt;
    if (acc >= 1.0) {
      train.times.push_back(t);
      acc = std::min(acc - 1.0, 1.0);
    }
  }
  return train;
}

namespace {

using nlohmann::json;

Vec2 vec2_from(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::runtime_error("expected [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

json vec2_to(const Vec2& v) { return json::array({v.x, v.y}); }

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario parse error: ") + e.what());
  }
  try {
    Scenario s;
    const json& layout = j.at("layout");
    for (const json& p : layout.at("positions"))
      s.layout.positions.push_back(vec2_from(p));
    s.layout.range = layout.at("range").get<double>();
    s.layout.rate_min = layout.at("rate_min").get<double>();
    s.layout.rate_max = layout.at("rate_max").get<double>();
    for (const json& obj : j.at("objects")) {
      Trajectory tr;
      const std::string kind = obj.at("kind").get<std::string>();
      if (kind == "line") {
        tr.kind = TrajectoryKind::Line;
        tr.start = vec2_from(obj.at("start"));
        tr.end = vec2_from(obj.at("end"));
        tr.speed = obj.at("speed").get<double>();
      } else if (kind == "arc") {
        tr.kind = TrajectoryKind::Arc;
        tr.center = vec2_from(obj.at("center"));
        tr.radius = obj.at("radius").get<double>();
        tr.start_angle = obj.at("start_angle").get<double>();
        tr.end_angle = obj.at("end_angle").get<double>();
        tr.angular_speed = obj.at("angular_speed").get<double>();
      } else if (kind == "waypoints") {
        tr.kind = TrajectoryKind::Waypoints;
        for (const json& p : obj.at("points"))
          tr.waypoints.push_back({p.at("t").get<double>(), vec2_from(p.at("pos"))});
      } else {
        throw std::runtime_error("unknown trajectory kind '" + kind + "'");
      }
      s.objects.push_back(std::move(tr));
    }
    s.duration = j.at("duration").get<double>();
    s.dt = j.at("dt").get<double>();
    s.seed = j.value("seed", 0ULL);
    const std::string enc = j.value("encoding", std::string("regular"));
    if (enc == "regular") {
      s.encoding = Encoding::Regular;
    } else if (enc == "poisson") {
      s.encoding = Encoding::Poisson;
    } else {
      throw std::runtime_error("unknown encoding '" + enc + "'");
    }
    check_scenario(s);
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario field error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json_text(buffer.str());
}

std::string scenario_to_json_text(const Scenario& s) {
  json j;
  json layout;
  layout["positions"] = json::array();
  for (const Vec2& p : s.layout.positions) layout["positions"].push_back(vec2_to(p));
  layout["range"] = s.layout.range;
  layout["rate_min"] = s.layout.rate_min;
  layout["rate_max"] = s.layout.rate_max;
  j["layout"] = layout;
  j["objects"] = json::array();
  for (const Trajectory& tr : s.objects) {
    json obj;
    switch (tr.kind) {
      case TrajectoryKind::Line:
        obj["kind"] = "line";
        obj["start"] = vec2_to(tr.start);
        obj["end"] = vec2_to(tr.end);
        obj["speed"] = tr.speed;
        break;
      case TrajectoryKind::Arc:
        obj["kind"] = "arc";
        obj["center"] = vec2_to(tr.center);
        obj["radius"] = tr.radius;
        obj["start_angle"] = tr.start_angle;
        obj["end_angle"] = tr.end_angle;
        obj["angular_speed"] = tr.angular_speed;
        break;
      case TrajectoryKind::Waypoints: {
        obj["kind"] = "waypoints";
        json pts = json::array();
        for (const Waypoint& w : tr.waypoints)
          pts.push_back({{"t", w.t}, {"pos", vec2_to(w.pos)}});
        obj["points"] = pts;
        break;
      }
    }
    j["objects"].push_back(obj);
  }
  j["duration"] = s.duration;
  j["dt"] = s.dt;
  j["seed"] = s.seed;
  j["encoding"] = s.encoding == Encoding::Regular ? "regular" : "poisson";
  return j.dump(2) + "\n";
}

}  // namespace ctd
