#include "ctd/engine.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace ctd {

namespace {

std::string neuron_name(int id) { return "neuron " + std::to_string(id); }

}  // namespace

std::vector<Violation> validate(const CircuitTopology& topology) {
  std::vector<Violation> out;
  std::unordered_set<int> ids;
  for (const NeuronSpec& n : topology.neurons) {
    if (!ids.insert(n.id).second)
      out.push_back({neuron_name(n.id), "duplicate id"});
    if (!(n.threshold > 0.0))
      out.push_back({neuron_name(n.id), "threshold must be > 0"});
    if (n.leak < 0.0 || n.leak > 1.0)
      out.push_back({neuron_name(n.id), "leak outside [0, 1]"});
    if (n.refractory < 0)
      out.push_back({neuron_name(n.id), "negative refractory"});
  }

  for (std::size_t i = 0; i < topology.synapses.size(); ++i) {
    const Synapse& s = topology.synapses[i];
    const std::string name = "synapse " + std::to_string(i);
    if (s.weight == 0.0) out.push_back({name, "zero weight"});
    if (s.delay < 0) out.push_back({name, "negative delay"});
    if (!ids.count(s.post))
      out.push_back({name, "post " + std::to_string(s.post) + " not a neuron"});
    if (s.pre.kind == SourceKind::Neuron && !ids.count(s.pre.id))
      out.push_back({name, "pre " + std::to_string(s.pre.id) + " not a neuron"});
  }

  std::unordered_set<int> unit_ids;
  std::unordered_map<int, int> member_unit;
  for (const AtomicUnit& u : topology.atomic_units) {
    const std::string name = "unit " + std::to_string(u.id);
    if (!unit_ids.insert(u.id).second)
      out.push_back({name, "duplicate id"});
    if (u.members.size() != 3)
      out.push_back({name, "unit size != 3"});
    for (int m : u.members) {
      if (!ids.count(m)) {
        out.push_back({name, "member " + std::to_string(m) + " not a neuron"});
        continue;
      }
      auto [it, fresh] = member_unit.emplace(m, u.id);
      if (!fresh && it->second != u.id)
        out.push_back({name, "member " + std::to_string(m) + " already in unit " +
                                 std::to_string(it->second)});
    }
  }

  for (const auto& [sensor, bound] : topology.sensor_bindings) {
    for (int m : bound) {
      if (!ids.count(m))
        out.push_back({"sensor " + std::to_string(sensor),
                       "bound neuron " + std::to_string(m) + " missing"});
    }
  }
  return out;
}

std::vector<int> sensor_ids(const CircuitTopology& topology) {
  std::set<int> s;
  for (const auto& [sensor, bound] : topology.sensor_bindings) s.insert(sensor);
  for (const Synapse& syn : topology.synapses)
    if (syn.pre.kind == SourceKind::Sensor) s.insert(syn.pre.id);
  return {s.begin(), s.end()};
}

Simulator::Simulator(const CircuitTopology& topology) {
  const std::vector<Violation> bad = validate(topology);
  if (!bad.empty()) {
    std::string msg = "invalid topology:";
    for (const Violation& v : bad) msg += " [" + v.element + ": " + v.message + "]";
    throw std::invalid_argument(msg);
  }

  for (const NeuronSpec& n : topology.neurons) neuron_ids_.push_back(n.id);
  std::sort(neuron_ids_.begin(), neuron_ids_.end());
  std::unordered_map<int, int> slot_of;
  for (std::size_t i = 0; i < neuron_ids_.size(); ++i)
    slot_of[neuron_ids_[i]] = static_cast<int>(i);

  const std::size_t n = neuron_ids_.size();
  threshold_.resize(n);
  leak_.resize(n);
  refractory_.resize(n);
  reset_.resize(n);
  potential_.assign(n, 0.0);
  refr_left_.assign(n, 0);
  sensor_in_.resize(n);
  neuron_in_.resize(n);
  for (const NeuronSpec& spec : topology.neurons) {
    const int s = slot_of[spec.id];
    threshold_[s] = spec.threshold;
    leak_[s] = spec.leak;
    refractory_[s] = spec.refractory;
    reset_[s] = spec.reset_potential;
  }

  sensor_ids_ = sensor_ids(topology);
  std::unordered_map<int, int> sensor_slot_of;
  for (std::size_t i = 0; i < sensor_ids_.size(); ++i)
    sensor_slot_of[sensor_ids_[i]] = static_cast<int>(i);

  int max_sensor_delay = 0;
  int max_neuron_delay = 0;
  for (const auto& [sensor, bound] : topology.sensor_bindings) {
    for (int post : bound)
      sensor_in_[slot_of[post]].push_back({sensor_slot_of[sensor], 1.0, 0});
  }
  for (const Synapse& syn : topology.synapses) {
    const int post = slot_of[syn.post];
    if (syn.pre.kind == SourceKind::Sensor) {
      sensor_in_[post].push_back({sensor_slot_of[syn.pre.id], syn.weight, syn.delay});
      max_sensor_delay = std::max(max_sensor_delay, syn.delay);
    } else {
      neuron_in_[post].push_back({slot_of[syn.pre.id], syn.weight, syn.delay});
      max_neuron_delay = std::max(max_neuron_delay, syn.delay);
    }
  }

  for (const AtomicUnit& unit : topology.atomic_units) {
    std::vector<int> slots;
    for (int m : unit.members) slots.push_back(slot_of[m]);
    unit_members_.push_back(std::move(slots));
  }

  sensor_depth_ = max_sensor_delay + 1;
  fired_depth_ = max_neuron_delay + 2;  // delay d reads back d+1 steps
  sensor_hist_.assign(sensor_depth_, std::vector<std::uint8_t>(sensor_ids_.size(), 0));
  fired_hist_.assign(fired_depth_, std::vector<std::uint8_t>(n, 0));
}

int Simulator::sensor_slot(int sensor_id) const {
  auto it = std::lower_bound(sensor_ids_.begin(), sensor_ids_.end(), sensor_id);
  if (it == sensor_ids_.end() || *it != sensor_id)
    throw std::invalid_argument("sensor " + std::to_string(sensor_id) +
                                " is not bound in this topology");
  return static_cast<int>(it - sensor_ids_.begin());
}

TraceFrame Simulator::step(const std::vector<int>& sensors_spiking) {
  const int t = now_;
  std::vector<std::uint8_t>& sensor_now = sensor_hist_[t % sensor_depth_];
  std::fill(sensor_now.begin(), sensor_now.end(), 0);
  for (int s : sensors_spiking) sensor_now[sensor_slot(s)] = 1;

  const std::size_t n = neuron_ids_.size();
  // Potentials first: every neuron sees the same previous-step firings.
  for (std::size_t j = 0; j < n; ++j) {
    double v = leak_[j] * potential_[j];
    for (const SensorEdge& e : sensor_in_[j]) {
      const int src_t = t - e.delay;
      if (src_t >= 0 && sensor_hist_[src_t % sensor_depth_][e.source_slot])
        v += e.weight;
    }
    for (const NeuronEdge& e : neuron_in_[j]) {
      const int src_t = t - 1 - e.delay;
      if (src_t >= 0 && fired_hist_[src_t % fired_depth_][e.source_slot])
        v += e.weight;
    }
    potential_[j] = std::max(0.0, v);
  }

  std::vector<std::uint8_t> crossed(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    crossed[j] = potential_[j] >= threshold_[j] && refr_left_[j] == 0;

  // Same-step resolution inside an atomic unit: the earliest member in the
  // unit's order fires, the others are held back this step.
  std::vector<std::uint8_t> fires = crossed;
  for (const std::vector<int>& members : unit_members_) {
    bool taken = false;
    for (int s : members) {
      if (!crossed[s]) continue;
      if (taken) fires[s] = 0;
      taken = true;
    }
  }

  TraceFrame frame;
  frame.t = t;
  std::vector<std::uint8_t>& fired_now = fired_hist_[t % fired_depth_];
  std::fill(fired_now.begin(), fired_now.end(), 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (fires[j]) {
      fired_now[j] = 1;
      potential_[j] = reset_[j];
      refr_left_[j] = refractory_[j];
      frame.fired.push_back(neuron_ids_[j]);
    } else if (refr_left_[j] > 0) {
      --refr_left_[j];
    }
  }

  frame.potentials = potential_;
  double sum = 0.0;
  for (double v : potential_) sum += v;
  frame.aggregate_potential = sum;
  ++now_;
  return frame;
}

SimTrace run(const CircuitTopology& topology, const std::vector<SpikeTrain>& inputs,
             int horizon, std::uint64_t /*seed*/) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");

  const std::vector<int> known = sensor_ids(topology);
  for (const SpikeTrain& train : inputs) {
    if (!std::binary_search(known.begin(), known.end(), train.source))
      throw std::invalid_argument("input source " + std::to_string(train.source) +
                                  " is not bound in this topology");
    int prev = -1;
    for (int t : train.times) {
      if (t <= prev)
        throw std::invalid_argument("spike times of source " +
                                    std::to_string(train.source) +
                                    " not strictly increasing");
      if (t < 0 || t >= train.horizon)
        throw std::invalid_argument("spike time outside [0, horizon) for source " +
                                    std::to_string(train.source));
      prev = t;
    }
  }

  std::vector<std::vector<int>> spikes_at(horizon);
  for (const SpikeTrain& train : inputs)
    for (int t : train.times)
      if (t < horizon) spikes_at[t].push_back(train.source);

  Simulator sim(topology);
  SimTrace trace;
  trace.neuron_ids = sim.neuron_ids();
  trace.frames.reserve(horizon);
  for (int t = 0; t < horizon; ++t) trace.frames.push_back(sim.step(spikes_at[t]));
  return trace;
}

}  // namespace ctd
