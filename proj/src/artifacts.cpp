#include "ctd/artifacts.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace ctd {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_trace_jsonl(const std::string& path, const SimTrace& trace) {
  std::ofstream out = open_out(path);
  for (const TraceFrame& frame : trace.frames) {
    json j;
    j["t"] = frame.t;
    j["fired"] = frame.fired;
    json pots = json::object();
    for (std::size_t i = 0; i < trace.neuron_ids.size(); ++i)
      pots[std::to_string(trace.neuron_ids[i])] = frame.potentials[i];
    j["potentials"] = pots;
    j["aggregate_potential"] = frame.aggregate_potential;
    out << j.dump() << "\n";
  }
}

void write_spikes_csv(const std::string& path, const std::vector<SpikeTrain>& trains) {
  std::ofstream out = open_out(path);
  out << "t,sensor,spike\n";
  std::vector<std::pair<int, int>> rows;  // (t, sensor)
  for (const SpikeTrain& train : trains)
    for (int t : train.times) rows.emplace_back(t, train.source);
  std::sort(rows.begin(), rows.end());
  for (const auto& [t, sensor] : rows)
    out << t << "," << sensor << ",1\n";
}

void write_potential_csv(const std::string& path, const SimTrace& trace) {
  std::ofstream out = open_out(path);
  out << "t,aggregate_potential\n";
  for (const TraceFrame& frame : trace.frames) {
    json v = frame.aggregate_potential;  // shortest round-trip formatting
    out << frame.t << "," << v.dump() << "\n";
  }
}

void write_raster_svg(const std::string& path, const std::vector<SpikeTrain>& trains,
                      const SimTrace& trace) {
  int horizon = static_cast<int>(trace.frames.size());
  for (const SpikeTrain& train : trains) horizon = std::max(horizon, train.horizon);

  const int row_h = 10;
  const int rows = static_cast<int>(trains.size() + trace.neuron_ids.size());
  const int label_w = 70;
  const double x_scale = horizon > 0 ? 900.0 / horizon : 1.0;
  const int width = label_w + 910;
  const int height = rows * row_h + 20;

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<style>.sspike{stroke:#c02020;} .nspike{stroke:#2040c0;} "
         ".lbl{font:8px monospace;}</style>\n";

  int row = 0;
  auto row_y = [&](int r) { return 10 + r * row_h; };
  auto mark = [&](int t, int r, const char* cls) {
    const double x = label_w + t * x_scale;
    out << "<line class=\"" << cls << "\" x1=\"" << x << "\" y1=\"" << row_y(r)
        << "\" x2=\"" << x << "\" y2=\"" << row_y(r) + row_h - 2 << "\"/>\n";
  };

  for (const SpikeTrain& train : trains) {
    out << "<text class=\"lbl\" x=\"2\" y=\"" << row_y(row) + row_h - 3
        << "\">S" << train.source << "</text>\n";
    for (int t : train.times) mark(t, row, "sspike");
    ++row;
  }
  for (std::size_t i = 0; i < trace.neuron_ids.size(); ++i) {
    out << "<text class=\"lbl\" x=\"2\" y=\"" << row_y(row) + row_h - 3
        << "\">n" << trace.neuron_ids[i] << "</text>\n";
    for (const TraceFrame& frame : trace.frames)
      if (std::binary_search(frame.fired.begin(), frame.fired.end(),
                             trace.neuron_ids[i]))
        mark(frame.t, row, "nspike");
    ++row;
  }
  out << "</svg>\n";
}

Detections decode_detections(const SimTrace& trace, const CircuitTopology& topology,
                             int proximity_window, double seizure_threshold,
                             int seizure_window) {
  Detections det;
  det.seizures = detect_seizures(trace, seizure_threshold, seizure_window);

  for (int unit : units_of_kind(topology, UnitKind::Pdd)) {
    const ActivationPattern pattern = trace_pattern(trace, topology, unit);
    det.unit_directions.push_back({unit, classify_direction(pattern)});
  }
  for (int unit : units_of_kind(topology, UnitKind::Cmd)) {
    det.unit_proximities.push_back(
        {unit, decode_proximity(trace, topology, unit, proximity_window)});
  }

  // Circuit-level direction: majority over units, mean confidence of the
  // winning side; ties or silence give none.
  int lr = 0, rl = 0;
  double lr_conf = 0.0, rl_conf = 0.0;
  for (const UnitDirection& u : det.unit_directions) {
    if (u.estimate.direction == Direction::LeftToRight) {
      ++lr;
      lr_conf += u.estimate.confidence;
    } else if (u.estimate.direction == Direction::RightToLeft) {
      ++rl;
      rl_conf += u.estimate.confidence;
    }
  }
  if (lr > rl) {
    det.direction = {Direction::LeftToRight, lr_conf / lr};
  } else if (rl > lr) {
    det.direction = {Direction::RightToLeft, rl_conf / rl};
  }

  // Circuit-level proximity: the state carried by most active windows,
  // priority deciding ties.
  std::map<Proximity, int> counts;
  for (const UnitProximity& u : det.unit_proximities)
    for (const ProximityWindow& w : u.windows)
      if (w.state != Proximity::None) ++counts[w.state];
  int best = 0;
  for (Proximity p : {Proximity::Near, Proximity::Middle, Proximity::Far}) {
    auto it = counts.find(p);
    if (it != counts.end() && it->second > best) {
      best = it->second;
      det.proximity = p;
    }
  }
  return det;
}

json detections_to_json(const Detections& det) {
  json j;
  j["direction"] = to_string(det.direction.direction);
  j["confidence"] = det.direction.confidence;
  j["proximity"] = to_string(det.proximity);

  json dirs = json::array();
  for (const UnitDirection& u : det.unit_directions) {
    dirs.push_back({{"unit", u.unit_id},
                    {"direction", to_string(u.estimate.direction)},
                    {"confidence", u.estimate.confidence}});
  }
  j["pdd_units"] = dirs;

  json proxs = json::array();
  for (const UnitProximity& u : det.unit_proximities) {
    json windows = json::array();
    for (const ProximityWindow& w : u.windows)
      windows.push_back({{"t_start", w.t_start},
                         {"t_end", w.t_end},
                         {"state", to_string(w.state)}});
    proxs.push_back({{"unit", u.unit_id}, {"windows", windows}});
  }
  j["cmd_units"] = proxs;

  json events = json::array();
  for (const SeizureEvent& e : det.seizures.events)
    events.push_back({{"t_start", e.t_start},
                      {"t_end", e.t_end},
                      {"peak_activity", e.peak_activity}});
  j["seizures"] = {{"activity_threshold", det.seizures.activity_threshold},
                   {"window", det.seizures.window},
                   {"events", events}};
  return j;
}

void write_detections_json(const std::string& path, const Detections& detections) {
  std::ofstream out = open_out(path);
  out << detections_to_json(detections).dump(2) << "\n";
}

json params_to_json(const CmdParams& p) {
  return {{"weights", {{"near", p.w_near}, {"middle", p.w_middle}, {"far", p.w_far}}},
          {"thresholds",
           {{"near", p.t_near}, {"middle", p.t_middle}, {"far", p.t_far}}},
          {"priority_inhibition_weight", p.priority_inhibition_weight}};
}

CmdParams params_from_json(const json& j) {
  CmdParams p;
  p.w_near = j.at("weights").at("near").get<double>();
  p.w_middle = j.at("weights").at("middle").get<double>();
  p.w_far = j.at("weights").at("far").get<double>();
  p.t_near = j.at("thresholds").at("near").get<double>();
  p.t_middle = j.at("thresholds").at("middle").get<double>();
  p.t_far = j.at("thresholds").at("far").get<double>();
  p.priority_inhibition_weight =
      j.value("priority_inhibition_weight", p.priority_inhibition_weight);
  return p;
}

CmdParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open params file: " + path);
  json j;
  try {
    in >> j;
    return params_from_json(j);
  } catch (const json::exception& e) {
    throw std::runtime_error("params parse error in " + path + ": " + e.what());
  }
}

void write_params_json(const std::string& path, const CmdParams& params,
                       const BandSpec& bands, const BandReport& report) {
  json j = params_to_json(params);
  j["bands"] = {{"f1", bands.f1}, {"f2", bands.f2}, {"tolerance", bands.tolerance}};
  j["measured"] = {{"f1", report.measured_f1}, {"f2", report.measured_f2}};
  j["pass"] = report.pass;
  if (!report.pass) j["failure"] = report.failure;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace ctd
