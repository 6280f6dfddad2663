#pragma once

#include <string>
#include <vector>

#include "ctd/engine.hpp"

// Readouts over simulation traces: the per-unit activation pattern and its
// direction, windowed proximity states, the aggregate potential series, and
// runaway-activity (seizure) detection.

namespace ctd {

enum class Direction { None, LeftToRight, RightToLeft };
enum class Proximity { None, Near, Middle, Far };

std::string to_string(Direction d);
std::string to_string(Proximity p);

struct PatternEntry {
  int t = 0;
  int member = 0;  // in-unit index 0..2
};

struct ActivationPattern {
  int unit_id = 0;
  std::vector<PatternEntry> entries;  // strictly increasing t, silent steps omitted
};

// Which member of a PDD unit fired per step. Throws std::invalid_argument for
// unknown ids or non-PDD units.
ActivationPattern trace_pattern(const SimTrace& trace, const CircuitTopology& topology,
                                int unit_id);

struct DirectionEstimate {
  Direction direction = Direction::None;
  double confidence = 0.0;  // |mean sign| over non-zero member deltas
};

// Consecutive member deltas mod 3 map to +1 (ascending) or -1 (descending);
// zero deltas are skipped. Direction follows the sign of the mean.
DirectionEstimate classify_direction(const ActivationPattern& pattern);

struct ProximityWindow {
  int t_start = 0;
  int t_end = 0;  // inclusive
  Proximity state = Proximity::None;
};

// Non-overlapping windows over the trace; per window the highest-priority CMD
// member that fired wins (near > middle > far), none when the unit is silent.
std::vector<ProximityWindow> decode_proximity(const SimTrace& trace,
                                              const CircuitTopology& topology,
                                              int cmd_unit_id, int window);

// The per-frame aggregate potential as one series.
std::vector<double> aggregate_potential(const SimTrace& trace);

struct SeizureEvent {
  int t_start = 0;
  int t_end = 0;           // inclusive
  double peak_activity = 0.0;  // highest windowed firing fraction inside
};

struct SeizureReport {
  std::vector<SeizureEvent> events;  // disjoint, ordered
  double activity_threshold = 0.5;
  int window = 50;
};

// Flags maximal intervals whose sliding-window mean firing fraction reaches
// activity_threshold. Fraction = fired count / neuron count per frame.
SeizureReport detect_seizures(const SimTrace& trace, double activity_threshold,
                              int window);

// Readout for the left-to-right baseline: any coincidence fire means a
// left-to-right detection; confidence is the fraction of adjacent coincidence
// pairs whose first fires are ordered left to right.
DirectionEstimate classify_coincidence(const SimTrace& trace,
                                       const std::vector<int>& coincidence_neurons);

}  // namespace ctd
