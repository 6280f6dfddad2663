#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ctd/circuits.hpp"
#include "ctd/decode.hpp"
#include "ctd/engine.hpp"
#include "ctd/tuning.hpp"

// Writers for the files a simulation run leaves behind, and the JSON form of
// tunable parameters. All output is deterministic byte-for-byte given the
// same inputs.

namespace ctd {

// One TraceFrame per line: {"aggregate_potential": ..., "fired": [...],
// "potentials": {"id": v, ...}, "t": ...}.
void write_trace_jsonl(const std::string& path, const SimTrace& trace);

// Header t,sensor,spike; one row per emitted sensor spike.
void write_spikes_csv(const std::string& path, const std::vector<SpikeTrain>& trains);

// Header t,aggregate_potential; one row per frame.
void write_potential_csv(const std::string& path, const SimTrace& trace);

// Spike raster: one row per sensor, then one row per neuron; one mark per
// spike. Sensor marks carry class "sspike", neuron marks "nspike".
void write_raster_svg(const std::string& path, const std::vector<SpikeTrain>& trains,
                      const SimTrace& trace);

struct UnitDirection {
  int unit_id = 0;
  DirectionEstimate estimate;
};

struct UnitProximity {
  int unit_id = 0;
  std::vector<ProximityWindow> windows;
};

struct Detections {
  DirectionEstimate direction;            // circuit-level call
  Proximity proximity = Proximity::None;  // modal active window state
  std::vector<UnitDirection> unit_directions;
  std::vector<UnitProximity> unit_proximities;
  SeizureReport seizures;
};

// Decodes every PDD/CMD unit of the topology and aggregates the
// circuit-level answer by majority across units.
Detections decode_detections(const SimTrace& trace, const CircuitTopology& topology,
                             int proximity_window, double seizure_threshold,
                             int seizure_window);

nlohmann::json detections_to_json(const Detections& detections);
void write_detections_json(const std::string& path, const Detections& detections);

nlohmann::json params_to_json(const CmdParams& params);
CmdParams params_from_json(const nlohmann::json& j);
CmdParams load_params(const std::string& path);
void write_params_json(const std::string& path, const CmdParams& params,
                       const BandSpec& bands, const BandReport& report);

}  // namespace ctd
