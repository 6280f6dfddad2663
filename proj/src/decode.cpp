#include "ctd/decode.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace ctd {

std::string to_string(Direction d) {
  switch (d) {
    case Direction::LeftToRight: return "LR";
    case Direction::RightToLeft: return "RL";
    default: return "none";
  }
}

std::string to_string(Proximity p) {
  switch (p) {
    case Proximity::Near: return "N";
    case Proximity::Middle: return "M";
    case Proximity::Far: return "F";
    default: return "none";
  }
}

namespace {

const AtomicUnit& find_unit(const CircuitTopology& topology, int unit_id) {
  for (const AtomicUnit& u : topology.atomic_units)
    if (u.id == unit_id) return u;
  throw std::invalid_argument("unknown atomic unit " + std::to_string(unit_id));
}

bool fired_in_frame(const TraceFrame& frame, int neuron_id) {
  return std::binary_search(frame.fired.begin(), frame.fired.end(), neuron_id);
}

}  // namespace

ActivationPattern trace_pattern(const SimTrace& trace, const CircuitTopology& topology,
                                int unit_id) {
  const AtomicUnit& unit = find_unit(topology, unit_id);
  if (unit.kind != UnitKind::Pdd)
    throw std::invalid_argument("unit " + std::to_string(unit_id) + " is not a PDD unit");

  ActivationPattern pattern;
  pattern.unit_id = unit_id;
  for (const TraceFrame& frame : trace.frames) {
    for (std::size_t m = 0; m < unit.members.size(); ++m) {
      if (fired_in_frame(frame, unit.members[m])) {
        pattern.entries.push_back({frame.t, static_cast<int>(m)});
        break;  // at most one member per step by winner-take-all
      }
    }
  }
  return pattern;
}

DirectionEstimate classify_direction(const ActivationPattern& pattern) {
  long long sum = 0;
  long long pairs = 0;
  for (std::size_t i = 1; i < pattern.entries.size(); ++i) {
    const int delta =
        ((pattern.entries[i].member - pattern.entries[i - 1].member) % 3 + 3) % 3;
    if (delta == 0) continue;
    sum += delta == 1 ? 1 : -1;
    ++pairs;
  }
  if (pairs == 0) return {Direction::None, 0.0};
  const double mean = static_cast<double>(sum) / static_cast<double>(pairs);
  if (mean > 0.0) return {Direction::LeftToRight, mean};
  if (mean < 0.0) return {Direction::RightToLeft, -mean};
  return {Direction::None, 0.0};
}

std::vector<ProximityWindow> decode_proximity(const SimTrace& trace,
                                              const CircuitTopology& topology,
                                              int cmd_unit_id, int window) {
  const AtomicUnit& unit = find_unit(topology, cmd_unit_id);
  if (unit.kind != UnitKind::Cmd)
    throw std::invalid_argument("unit " + std::to_string(cmd_unit_id) +
                                " is not a CMD unit");
  if (window < 1) throw std::invalid_argument("window must be >= 1");

  std::vector<ProximityWindow> out;
  const int total = static_cast<int>(trace.frames.size());
  for (int start = 0; start < total; start += window) {
    const int end = std::min(start + window, total);
    bool near = false, middle = false, far = false;
    for (int t = start; t < end; ++t) {
      const TraceFrame& frame = trace.frames[t];
      near = near || fired_in_frame(frame, unit.members[0]);
      middle = middle || fired_in_frame(frame, unit.members[1]);
      far = far || fired_in_frame(frame, unit.members[2]);
    }
    Proximity state = Proximity::None;
    if (near) {
      state = Proximity::Near;
    } else if (middle) {
      state = Proximity::Middle;
    } else if (far) {
      state = Proximity::Far;
    }
    out.push_back({start, end - 1, state});
  }
  return out;
}

std::vector<double> aggregate_potential(const SimTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.frames.size());
  for (const TraceFrame& frame : trace.frames) out.push_back(frame.aggregate_potential);
  return out;
}

SeizureReport detect_seizures(const SimTrace& trace, double activity_threshold,
                              int window) {
  if (!(activity_threshold > 0.0 && activity_threshold <= 1.0))
    throw std::invalid_argument("activity_threshold must be in (0, 1]");
  if (window < 1) throw std::invalid_argument("window must be >= 1");

  SeizureReport report;
  report.activity_threshold = activity_threshold;
  report.window = window;

  const int total = static_cast<int>(trace.frames.size());
  const int neurons = static_cast<int>(trace.neuron_ids.size());
  if (total == 0 || neurons == 0) return report;

  std::vector<double> prefix(total + 1, 0.0);
  for (int t = 0; t < total; ++t)
    prefix[t + 1] = prefix[t] + static_cast<double>(trace.frames[t].fired.size()) /
                                    static_cast<double>(neurons);

  const int w = std::min(window, total);
  const int last_start = total - w;
  std::optional<SeizureEvent> open;
  for (int start = 0; start <= last_start; ++start) {
    const double mean = (prefix[start + w] - prefix[start]) / w;
    // a window sitting exactly at the threshold is flagged
    if (mean >= activity_threshold) {
      const int cover_end = start + w - 1;
      if (open && start <= open->t_end + 1) {
        open->t_end = std::max(open->t_end, cover_end);
        open->peak_activity = std::max(open->peak_activity, mean);
      } else {
        if (open) report.events.push_back(*open);
        open = SeizureEvent{start, cover_end, mean};
      }
    }
  }
  if (open) report.events.push_back(*open);
  return report;
}

DirectionEstimate classify_coincidence(const SimTrace& trace,
                                       const std::vector<int>& coincidence_neurons) {
  std::vector<int> first_fire(coincidence_neurons.size(), -1);
  bool any = false;
  for (const TraceFrame& frame : trace.frames) {
    for (std::size_t c = 0; c < coincidence_neurons.size(); ++c) {
      if (first_fire[c] < 0 && fired_in_frame(frame, coincidence_neurons[c])) {
        first_fire[c] = frame.t;
        any = true;
      }
    }
  }
  if (!any) return {Direction::None, 0.0};

  int ordered = 0;
  int pairs = 0;
  for (std::size_t c = 1; c < first_fire.size(); ++c) {
    if (first_fire[c - 1] < 0 || first_fire[c] < 0) continue;
    ++pairs;
    if (first_fire[c - 1] <= first_fire[c]) ++ordered;
  }
  const double confidence =
      pairs == 0 ? 1.0 : static_cast<double>(ordered) / static_cast<double>(pairs);
  return {Direction::LeftToRight, confidence};
}

}  // namespace ctd
