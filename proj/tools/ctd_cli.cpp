// Command-line front end: scenario simulation, CMD band tuning, and the
// baseline-vs-CTD comparison. Exit codes: 0 success, 2 input error,
// 3 internal invariant breach, 4 infeasible tuning.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctd/artifacts.hpp"
#include "ctd/circuits.hpp"
#include "ctd/decode.hpp"
#include "ctd/engine.hpp"
#include "ctd/scenario.hpp"
#include "ctd/tuning.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SimulateOptions {
  std::string scenario_path;
  std::string circuit = "ctd";
  std::string params = "default";  // default | tune | <file>
  std::string out_dir = ".";
  std::string emit = "trace,raster,report";
  double seizure_threshold = 0.5;
  int seizure_window = 50;
  int proximity_window = 50;
  int branch_delay = 200;
  double f1 = 160.0;
  double f2 = 250.0;
  double tolerance = 0.1;
  double cmd_leak = 0.9;
};

struct TuneOptions {
  double f1 = 0.0;
  double f2 = 0.0;
  double tolerance = 0.1;
  double leak = 0.9;
  double dt = 0.001;
  std::string out_file = "cmd_params.json";
};

struct CompareOptions {
  SimulateOptions sim;  // shares scenario/params/decode flags
};

bool emits(const SimulateOptions& opt, const std::string& what) {
  std::size_t pos = 0;
  while (pos < opt.emit.size()) {
    std::size_t comma = opt.emit.find(',', pos);
    if (comma == std::string::npos) comma = opt.emit.size();
    if (opt.emit.substr(pos, comma - pos) == what) return true;
    pos = comma + 1;
  }
  return false;
}

ctd::CmdParams resolve_params(const SimulateOptions& opt, double dt) {
  if (opt.params == "default") return ctd::CmdParams{};
  if (opt.params == "tune") {
    const ctd::BandSpec bands{opt.f1, opt.f2, opt.tolerance};
    return ctd::calibrate(bands, opt.cmd_leak, dt);
  }
  return ctd::load_params(opt.params);
}

// Post-run sanity: the per-frame aggregate must equal the potential sum and
// no atomic unit may fire two members in one frame.
void check_trace_invariants(const ctd::SimTrace& trace,
                            const ctd::CircuitTopology& topology) {
  for (const ctd::TraceFrame& frame : trace.frames) {
    double sum = 0.0;
    for (double v : frame.potentials) sum += v;
    if (std::abs(sum - frame.aggregate_potential) > 1e-9)
      throw std::logic_error("aggregate potential mismatch at t=" +
                             std::to_string(frame.t));
    for (const ctd::AtomicUnit& unit : topology.atomic_units) {
      int fired = 0;
      for (int m : unit.members)
        if (std::binary_search(frame.fired.begin(), frame.fired.end(), m)) ++fired;
      if (fired > 1)
        throw std::logic_error("unit " + std::to_string(unit.id) +
                               " fired " + std::to_string(fired) +
                               " members at t=" + std::to_string(frame.t));
    }
  }
}

struct RunResult {
  ctd::CircuitTopology topology;
  std::vector<ctd::SpikeTrain> trains;
  ctd::SimTrace trace;
  ctd::Detections detections;
};

RunResult run_circuit(const ctd::Scenario& scenario, const SimulateOptions& opt,
                      const std::string& circuit) {
  const int sensors = static_cast<int>(scenario.layout.positions.size());
  RunResult result;
  std::vector<int> coincidence;
  if (circuit == "ctd") {
    ctd::CtdConfig config;
    config.num_sensors = sensors;
    config.cmd = resolve_params(opt, scenario.dt);
    config.cmd_leak = opt.cmd_leak;
    result.topology = ctd::build_ctd(config);
  } else if (circuit == "pdd-only") {
    result.topology = ctd::build_pdd_stage(sensors);
  } else if (circuit == "braitenberg-lr") {
    ctd::BraitenbergCircuit braitenberg =
        ctd::build_braitenberg_lr(sensors, opt.branch_delay);
    coincidence = braitenberg.coincidence_neurons;
    result.topology = std::move(braitenberg.topology);
  } else {
    throw std::invalid_argument("unknown circuit '" + circuit + "'");
  }

  result.trains = ctd::encode(scenario);
  const int horizon = ctd::num_steps(scenario.duration, scenario.dt);
  result.trace = ctd::run(result.topology, result.trains, horizon, scenario.seed);
  check_trace_invariants(result.trace, result.topology);
  result.detections =
      ctd::decode_detections(result.trace, result.topology, opt.proximity_window,
                             opt.seizure_threshold, opt.seizure_window);
  if (!coincidence.empty())
    result.detections.direction = ctd::classify_coincidence(result.trace, coincidence);
  return result;
}

int cmd_simulate(const SimulateOptions& opt) {
  const ctd::Scenario scenario = ctd::load_scenario(opt.scenario_path);
  const RunResult result = run_circuit(scenario, opt, opt.circuit);

  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);
  if (emits(opt, "trace")) {
    ctd::write_trace_jsonl((out / "trace.jsonl").string(), result.trace);
    ctd::write_spikes_csv((out / "spikes.csv").string(), result.trains);
    ctd::write_potential_csv((out / "potential.csv").string(), result.trace);
  }
  if (emits(opt, "report"))
    ctd::write_detections_json((out / "detections.json").string(), result.detections);
  if (emits(opt, "raster"))
    ctd::write_raster_svg((out / "raster.svg").string(), result.trains, result.trace);

  std::cout << "circuit=" << opt.circuit
            << " direction=" << ctd::to_string(result.detections.direction.direction)
            << " confidence=" << result.detections.direction.confidence
            << " proximity=" << ctd::to_string(result.detections.proximity)
            << " seizure_events=" << result.detections.seizures.events.size() << "\n";
  return 0;
}

int cmd_tune(const TuneOptions& opt) {
  const ctd::BandSpec bands{opt.f1, opt.f2, opt.tolerance};
  const ctd::CmdParams params = ctd::calibrate(bands, opt.leak, opt.dt);
  const ctd::BandReport report = ctd::verify_bands(params, bands, opt.leak, opt.dt);
  if (const fs::path parent = fs::path(opt.out_file).parent_path(); !parent.empty())
    fs::create_directories(parent);
  ctd::write_params_json(opt.out_file, params, bands, report);
  std::cout << "calibrated w=(" << params.w_near << ", " << params.w_middle << ", "
            << params.w_far << ") t=(" << params.t_near << ", " << params.t_middle
            << ", " << params.t_far << ") measured=(" << report.measured_f1 << ", "
            << report.measured_f2 << ") " << (report.pass ? "pass" : "FAIL") << "\n";
  if (!report.pass) throw ctd::InfeasibleBands("verification failed: " + report.failure);
  return 0;
}

int cmd_compare(const SimulateOptions& opt) {
  const ctd::Scenario scenario = ctd::load_scenario(opt.scenario_path);
  const RunResult baseline = run_circuit(scenario, opt, "braitenberg-lr");
  const RunResult full = run_circuit(scenario, opt, "ctd");

  fs::create_directories(opt.out_dir);
  json j;
  j["braitenberg-lr"] = ctd::detections_to_json(baseline.detections);
  j["ctd"] = ctd::detections_to_json(full.detections);
  std::ofstream out(fs::path(opt.out_dir) / "compare.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write compare.json");
  out << j.dump(2) << "\n";

  auto line = [](const std::string& name, const ctd::Detections& det) {
    std::printf("%-15s direction=%-4s confidence=%.2f proximity=%-4s seizures=%zu\n",
                name.c_str(), ctd::to_string(det.direction.direction).c_str(),
                det.direction.confidence, ctd::to_string(det.proximity).c_str(),
                det.seizures.events.size());
  };
  line("braitenberg-lr", baseline.detections);
  line("ctd", full.detections);
  return 0;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ctd::InfeasibleBands& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking-circuit simulator for curved trajectory detection"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario through a circuit");
  simulate->add_option("--scenario", sim.scenario_path, "scenario JSON file")
      ->required();
  simulate->add_option("--circuit", sim.circuit, "ctd | pdd-only | braitenberg-lr");
  simulate->add_option("--params", sim.params, "default | tune | params JSON file");
  simulate->add_option("--out", sim.out_dir, "output directory");
  simulate->add_option("--emit", sim.emit, "comma list of trace,raster,report");
  simulate->add_option("--seizure-threshold", sim.seizure_threshold,
                       "windowed firing fraction that flags a seizure");
  simulate->add_option("--seizure-window", sim.seizure_window, "seizure window, steps");
  simulate->add_option("--proximity-window", sim.proximity_window,
                       "proximity decode window, steps");
  simulate->add_option("--branch-delay", sim.branch_delay,
                       "baseline left-branch delay, steps");
  simulate->add_option("--f1", sim.f1, "far/middle band edge for --params tune");
  simulate->add_option("--f2", sim.f2, "middle/near band edge for --params tune");
  simulate->add_option("--tolerance", sim.tolerance, "band tolerance for --params tune");
  simulate->add_option("--cmd-leak", sim.cmd_leak, "CMD per-step retention factor");

  TuneOptions tune;
  CLI::App* tune_cmd = app.add_subcommand("tune", "calibrate CMD weights to rate bands");
  tune_cmd->add_option("--f1", tune.f1, "far/middle band edge, spikes/s")->required();
  tune_cmd->add_option("--f2", tune.f2, "middle/near band edge, spikes/s")->required();
  tune_cmd->add_option("--tolerance", tune.tolerance, "relative tolerance");
  tune_cmd->add_option("--leak", tune.leak, "CMD per-step retention factor");
  tune_cmd->add_option("--dt", tune.dt, "timestep, seconds");
  tune_cmd->add_option("--out", tune.out_file, "output params JSON file");

  CompareOptions compare;
  compare.sim.params = "tune";
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "run baseline and CTD side by side");
  compare_cmd->add_option("--scenario", compare.sim.scenario_path, "scenario JSON file")
      ->required();
  compare_cmd->add_option("--out", compare.sim.out_dir, "output directory");
  compare_cmd->add_option("--params", compare.sim.params,
                          "default | tune | params JSON file (default: tune)");
  compare_cmd->add_option("--branch-delay", compare.sim.branch_delay,
                          "baseline left-branch delay, steps");
  compare_cmd->add_option("--seizure-threshold", compare.sim.seizure_threshold,
                          "windowed firing fraction that flags a seizure");
  compare_cmd->add_option("--seizure-window", compare.sim.seizure_window,
                          "seizure window, steps");
  compare_cmd->add_option("--proximity-window", compare.sim.proximity_window,
                          "proximity decode window, steps");
  compare_cmd->add_option("--f1", compare.sim.f1, "band edge for --params tune");
  compare_cmd->add_option("--f2", compare.sim.f2, "band edge for --params tune");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (simulate->parsed()) return guarded([&] { return cmd_simulate(sim); });
  if (tune_cmd->parsed()) return guarded([&] { return cmd_tune(tune); });
  return guarded([&] { return cmd_compare(compare.sim); });
}
