#include "ctd/circuits.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ctd {

void check_cmd_params(const CmdParams& p) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("CmdParams: " + what);
  };
  if (!(p.w_near > 0.0 && p.w_middle > 0.0 && p.w_far > 0.0))
    fail("weights must be positive");
  if (!(p.t_near > 0.0 && p.t_middle > 0.0 && p.t_far > 0.0))
    fail("thresholds must be positive");
  if (!(p.w_near < p.w_middle && p.w_middle < p.w_far))
    fail("weight ordering w_near < w_middle < w_far violated");
  if (!(p.t_near < p.t_middle && p.t_middle < p.t_far))
    fail("threshold ordering t_near < t_middle < t_far violated");
  if (p.priority_inhibition_weight > 0.0)
    fail("priority inhibition weight must be <= 0");
  const double onset_far = p.t_far / p.w_far;
  const double onset_middle = p.t_middle / p.w_middle;
  const double onset_near = p.t_near / p.w_near;
  if (!(onset_far < onset_middle && onset_middle < onset_near))
    fail("onset ordering t_far/w_far < t_middle/w_middle < t_near/w_near violated");
}

namespace {

void add_pdd_unit(CircuitTopology& topo, int unit_id, int first_neuron_id,
                  int first_sensor_id, double leak, int refractory,
                  bool inhibition) {
  std::vector<int> members;
  for (int k = 0; k < 3; ++k) {
    const int id = first_neuron_id + k;
    topo.neurons.push_back({id, 1.0, leak, refractory, 0.0});
    topo.sensor_bindings[first_sensor_id + k].push_back(id);
    members.push_back(id);
  }
  if (inhibition) {
    for (int a : members)
      for (int b : members)
        if (a != b) topo.synapses.push_back({neuron_source(a), b, -1.0, 0});
    topo.atomic_units.push_back({unit_id, UnitKind::Pdd, members});
  }
}

}  // namespace

CircuitTopology build_pdd(int num_units) {
  if (num_units < 1) throw std::invalid_argument("build_pdd: num_units must be >= 1");
  CircuitTopology topo;
  for (int u = 0; u < num_units; ++u)
    add_pdd_unit(topo, u, 3 * u, 3 * u, 0.0, 1, true);
  return topo;
}

CircuitTopology build_pdd_stage(int num_sensors, double leak, int refractory,
                                bool inhibition) {
  if (num_sensors < 3)
    throw std::invalid_argument("build_pdd_stage: num_sensors must be >= 3");
  CircuitTopology topo;
  const int units = num_sensors - 2;
  for (int u = 0; u < units; ++u)
    add_pdd_unit(topo, u, 3 * u, u, leak, refractory, inhibition);
  return topo;
}

int add_cmd_unit(CircuitTopology& topology, const CmdParams& params, int pdd_unit_id,
                 double leak, int refractory, bool register_unit) {
  check_cmd_params(params);
  const std::vector<int>& sources = unit_members(topology, pdd_unit_id);

  int next_id = 0;
  for (const NeuronSpec& n : topology.neurons) next_id = std::max(next_id, n.id + 1);
  int next_unit = 0;
  for (const AtomicUnit& u : topology.atomic_units)
    next_unit = std::max(next_unit, u.id + 1);

  const int near_id = next_id;
  const int middle_id = next_id + 1;
  const int far_id = next_id + 2;
  topology.neurons.push_back({near_id, params.t_near, leak, refractory, 0.0});
  topology.neurons.push_back({middle_id, params.t_middle, leak, refractory, 0.0});
  topology.neurons.push_back({far_id, params.t_far, leak, refractory, 0.0});

  const double weights[3] = {params.w_near, params.w_middle, params.w_far};
  const int states[3] = {near_id, middle_id, far_id};
  for (int s = 0; s < 3; ++s)
    for (int src : sources)
      topology.synapses.push_back({neuron_source(src), states[s], weights[s], 0});

  const double inhib = params.priority_inhibition_weight;
  if (inhib != 0.0) {
    topology.synapses.push_back({neuron_source(near_id), middle_id, inhib, 0});
    topology.synapses.push_back({neuron_source(near_id), far_id, inhib, 0});
    topology.synapses.push_back({neuron_source(middle_id), far_id, inhib, 0});
  }
  if (register_unit)
    topology.atomic_units.push_back(
        {next_unit, UnitKind::Cmd, {near_id, middle_id, far_id}});
  return next_unit;
}

CircuitTopology build_ctd(const CtdConfig& config) {
  if (config.num_sensors < 3)
    throw std::invalid_argument("build_ctd: num_sensors must be >= 3");
  check_cmd_params(config.cmd);

  CircuitTopology topo = build_pdd_stage(config.num_sensors, config.pdd_leak,
                                         config.refractory, config.inhibition);
  const int units = config.num_sensors - 2;
  if (config.inhibition) {
    for (int u = 0; u < units; ++u)
      add_cmd_unit(topo, config.cmd, u, config.cmd_leak, config.refractory, true);
    return topo;
  }

  // Ablation: the PDD stage carries no units, so wire the CMD stage by the
  // id layout instead (PDD unit u occupies ids 3u..3u+2).
  CmdParams open = config.cmd;
  open.priority_inhibition_weight = 0.0;
  int next_id = 3 * units;
  for (int u = 0; u < units; ++u) {
    const int states[3] = {next_id, next_id + 1, next_id + 2};
    const double thresholds[3] = {open.t_near, open.t_middle, open.t_far};
    const double weights[3] = {open.w_near, open.w_middle, open.w_far};
    for (int s = 0; s < 3; ++s) {
      topo.neurons.push_back(
          {states[s], thresholds[s], config.cmd_leak, config.refractory, 0.0});
      for (int k = 0; k < 3; ++k)
        topo.synapses.push_back({neuron_source(3 * u + k), states[s], weights[s], 0});
    }
    next_id += 3;
  }
  return topo;
}

CircuitTopology build_cmd_probe(const CmdParams& params, double leak, int refractory,
                                bool inhibition) {
  CircuitTopology topo;
  const int states[3] = {0, 1, 2};
  const double thresholds[3] = {params.t_near, params.t_middle, params.t_far};
  const double weights[3] = {params.w_near, params.w_middle, params.w_far};
  for (int s = 0; s < 3; ++s) {
    topo.neurons.push_back({states[s], thresholds[s], leak, refractory, 0.0});
    topo.synapses.push_back({sensor_source(0), states[s], weights[s], 0});
  }
  const double inhib = params.priority_inhibition_weight;
  if (inhibition && inhib != 0.0) {
    topo.synapses.push_back({neuron_source(0), 1, inhib, 0});
    topo.synapses.push_back({neuron_source(0), 2, inhib, 0});
    topo.synapses.push_back({neuron_source(1), 2, inhib, 0});
  }
  if (inhibition)
    topo.atomic_units.push_back({0, UnitKind::Cmd, {0, 1, 2}});
  return topo;
}

BraitenbergCircuit build_braitenberg_lr(int num_sensors, int branch_delay) {
  if (num_sensors < 2)
    throw std::invalid_argument("build_braitenberg_lr: num_sensors must be >= 2");
  if (branch_delay < 0)
    throw std::invalid_argument("build_braitenberg_lr: negative branch_delay");

  BraitenbergCircuit circuit;
  CircuitTopology& topo = circuit.topology;
  for (int p = 0; p + 1 < num_sensors; ++p) {
    const int left = 3 * p;
    const int right = 3 * p + 1;
    const int coincidence = 3 * p + 2;
    topo.neurons.push_back({left, 1.0, 0.0, 1, 0.0});
    topo.neurons.push_back({right, 1.0, 0.0, 1, 0.0});
    topo.neurons.push_back({coincidence, 2.0, 0.0, 1, 0.0});
    topo.sensor_bindings[p].push_back(left);
    topo.sensor_bindings[p + 1].push_back(right);
    topo.synapses.push_back({neuron_source(left), coincidence, 1.0, branch_delay});
    topo.synapses.push_back({neuron_source(right), coincidence, 1.0, 0});
    circuit.delay_neurons.push_back(left);
    circuit.delay_neurons.push_back(right);
    circuit.coincidence_neurons.push_back(coincidence);
  }
  return circuit;
}

std::vector<int> units_of_kind(const CircuitTopology& topology, UnitKind kind) {
  std::vector<int> out;
  for (const AtomicUnit& u : topology.atomic_units)
    if (u.kind == kind) out.push_back(u.id);
  return out;
}

const std::vector<int>& unit_members(const CircuitTopology& topology, int unit_id) {
  for (const AtomicUnit& u : topology.atomic_units)
    if (u.id == unit_id) return u.members;
  throw std::invalid_argument("unknown atomic unit " + std::to_string(unit_id));
}

}  // namespace ctd
