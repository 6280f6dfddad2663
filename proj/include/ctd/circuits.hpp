#pragma once

#include <vector>

#include "ctd/engine.hpp"

// Builders for the four circuit families: standalone PDD arrays, CMD units,
// the combined curved trajectory detector (CTD), and the classic
// left-to-right coincidence baseline. All builders emit topologies that pass
// validate(); they throw std::invalid_argument on bad arguments.

namespace ctd {

// Per-state weights and thresholds of one curved-motion-detector unit.
// States are ordered near / middle / far; priority runs near > middle > far.
struct CmdParams {
  double w_near = 0.2;
  double w_middle = 0.5;
  double w_far = 1.0;
  double t_near = 2.0;
  double t_middle = 3.0;
  double t_far = 4.0;
  double priority_inhibition_weight = -10.0;  // <= 0; 0 leaves the links out
};

// Throws std::invalid_argument naming the violated constraint:
// w_near < w_middle < w_far, t_near < t_middle < t_far, all positive,
// priority weight <= 0, and the onset ordering
// t_far/w_far < t_middle/w_middle < t_near/w_near that makes the far state
// the first to respond as input rate grows.
void check_cmd_params(const CmdParams& params);

struct CtdConfig {
  int num_sensors = 4;  // >= 3; sensors window into units {i, i+1, i+2}
  CmdParams cmd;
  double pdd_leak = 0.0;
  double cmd_leak = 0.9;
  int refractory = 1;
  // When false, builds the epilepsy ablation: no inhibitory synapses and no
  // atomic-unit registration (the engine's same-step unit arbitration stands
  // in for instantaneous mutual inhibition, so it goes too).
  bool inhibition = true;
};

// num_units independent 3-neuron winner-take-all units, unit u bound to the
// disjoint sensor triple {3u, 3u+1, 3u+2}. Thresholds 1, leak 0, full
// inhibitory cycle of weight -1 inside each unit.
CircuitTopology build_pdd(int num_units);

// The CTD's direction stage alone: overlapping sensor windows, one unit per
// window, num_sensors - 2 units.
CircuitTopology build_pdd_stage(int num_sensors, double leak = 0.0,
                                int refractory = 1, bool inhibition = true);

// Appends one CMD unit fed by all three members of an existing PDD unit;
// every synapse into the state-i neuron carries weight w_i. Returns the new
// unit's id (or the id it would have had, when unregistered).
int add_cmd_unit(CircuitTopology& topology, const CmdParams& params, int pdd_unit_id,
                 double leak = 0.9, int refractory = 1, bool register_unit = true);

// PDD stage plus one CMD unit per PDD unit.
CircuitTopology build_ctd(const CtdConfig& config);

// One CMD unit driven straight from sensor 0 through per-state weights;
// the fixture behind rate sweeps and calibration. Params are taken as given
// (no invariant check) so sweeps can report on bad parameter sets.
CircuitTopology build_cmd_probe(const CmdParams& params, double leak = 0.9,
                                int refractory = 1, bool inhibition = true);

struct BraitenbergCircuit {
  CircuitTopology topology;
  std::vector<int> delay_neurons;        // level D, (left, right) per pair
  std::vector<int> coincidence_neurons;  // level C, one per adjacent pair
};

// Three-level left-to-right detector: sensors (F) drive per-pair branch
// neurons (D); the left branch reaches the threshold-2 coincidence neuron (C)
// branch_delay steps late, so only stimuli sweeping left-to-right at the
// matching latency line both inputs up.
BraitenbergCircuit build_braitenberg_lr(int num_sensors, int branch_delay);

// Ids of the atomic units of one kind, in declaration order.
std::vector<int> units_of_kind(const CircuitTopology& topology, UnitKind kind);

// Member neuron ids of a unit; throws if the unit id is unknown.
const std::vector<int>& unit_members(const CircuitTopology& topology, int unit_id);

}  // namespace ctd
