#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Discrete-time spiking circuit core. One step is one tick of the global
// clock (dt is owned by the scenario layer); all neurons update synchronously
// from the previous step's firing vector, so declaration order never matters.

namespace ctd {

struct NeuronSpec {
  int id = 0;
  double threshold = 1.0;      // > 0
  double leak = 0.0;           // per-step retention factor in [0, 1]
  int refractory = 1;          // steps the neuron cannot fire after a spike
  double reset_potential = 0.0;
};

enum class SourceKind { Neuron, Sensor };

struct SourceId {
  SourceKind kind = SourceKind::Neuron;
  int id = 0;

  friend bool operator==(const SourceId&, const SourceId&) = default;
};

inline SourceId neuron_source(int id) { return {SourceKind::Neuron, id}; }
inline SourceId sensor_source(int id) { return {SourceKind::Sensor, id}; }

struct Synapse {
  SourceId pre;
  int post = 0;
  double weight = 0.0;  // > 0 excitatory, < 0 inhibitory; zero is invalid
  int delay = 0;        // extra whole steps on top of the synaptic step
};

enum class UnitKind { Pdd, Cmd };

// Repeatable 3-neuron building block. Member order is significant: when two
// members cross threshold on the same step, the lowest index fires and the
// rest are held back that step.
struct AtomicUnit {
  int id = 0;
  UnitKind kind = UnitKind::Pdd;
  std::vector<int> members;
};

struct CircuitTopology {
  std::vector<NeuronSpec> neurons;
  std::vector<Synapse> synapses;
  std::vector<AtomicUnit> atomic_units;
  // sensor id -> neurons driven with unit weight at zero delay
  std::map<int, std::vector<int>> sensor_bindings;
};

// Ordered spike times from one source, all in [0, horizon).
struct SpikeTrain {
  int source = 0;
  std::vector<int> times;
  int horizon = 0;
};

struct TraceFrame {
  int t = 0;
  std::vector<int> fired;          // neuron ids, ascending
  std::vector<double> potentials;  // post-update values, SimTrace column order
  double aggregate_potential = 0.0;
};

struct SimTrace {
  std::vector<int> neuron_ids;  // ascending; column order for potentials
  std::vector<TraceFrame> frames;
};

struct Violation {
  std::string element;
  std::string message;
};

// Empty result iff every structural invariant holds. Violations are data,
// not errors; builders are expected to produce clean topologies.
std::vector<Violation> validate(const CircuitTopology& topology);

// Sensor ids the topology accepts input on (bindings plus sensor-pre synapses).
std::vector<int> sensor_ids(const CircuitTopology& topology);

// Single-run stepping engine. State is confined to one instance; topologies
// are shared immutably.
class Simulator {
 public:
  // Throws std::invalid_argument if validate(topology) is non-empty.
  explicit Simulator(const CircuitTopology& topology);

  // Advances one step. sensors_spiking lists the sensor ids emitting a spike
  // at the current step; unknown ids throw std::invalid_argument.
  TraceFrame step(const std::vector<int>& sensors_spiking);

  int now() const { return now_; }
  const std::vector<int>& neuron_ids() const { return neuron_ids_; }

 private:
  struct SensorEdge {
    int source_slot = 0;
    double weight = 0.0;
    int delay = 0;
  };
  struct NeuronEdge {
    int source_slot = 0;
    double weight = 0.0;
    int delay = 0;
  };

  int sensor_slot(int sensor_id) const;

  int now_ = 0;
  std::vector<int> neuron_ids_;
  std::vector<int> sensor_ids_;
  std::vector<double> threshold_;
  std::vector<double> leak_;
  std::vector<int> refractory_;
  std::vector<double> reset_;
  std::vector<double> potential_;
  std::vector<int> refr_left_;
  std::vector<std::vector<SensorEdge>> sensor_in_;   // per neuron slot
  std::vector<std::vector<NeuronEdge>> neuron_in_;   // per neuron slot
  std::vector<std::vector<int>> unit_members_;       // unit index -> member slots
  std::vector<std::vector<std::uint8_t>> fired_hist_;   // ring: [t % depth][slot]
  std::vector<std::vector<std::uint8_t>> sensor_hist_;  // ring: [t % depth][slot]
  int fired_depth_ = 1;
  int sensor_depth_ = 1;
};

// Runs the topology against the given input trains for t = 0..horizon-1.
// Fully deterministic; the seed is part of the contract but the core engine
// draws no random numbers (stochastic encodings live upstream).
SimTrace run(const CircuitTopology& topology, const std::vector<SpikeTrain>& inputs,
             int horizon, std::uint64_t seed = 0);

}  // namespace ctd
