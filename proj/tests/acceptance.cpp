// Acceptance suite: one check per shipped claim, one PASS/FAIL line each.
// Exits with the number of failed checks.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ctd/artifacts.hpp"
#include "ctd/circuits.hpp"
#include "ctd/decode.hpp"
#include "ctd/engine.hpp"
#include "ctd/scenario.hpp"
#include "ctd/tuning.hpp"

using namespace ctd;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  if (!pass) ++failures;
}

std::string scenario_path(const std::string& name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

SimTrace run_scenario(const Scenario& s, const CircuitTopology& topo) {
  return run(topo, encode(s), num_steps(s.duration, s.dt), s.seed);
}

std::vector<int> dedup_members(const ActivationPattern& pattern) {
  std::vector<int> out;
  for (const PatternEntry& e : pattern.entries)
    if (out.empty() || out.back() != e.member) out.push_back(e.member);
  return out;
}

// ---------------------------------------------------------------- criterion 1
void criterion_wta() {
  std::mt19937 rng(20260808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  int runs = 0;
  for (int i = 0; i < 200; ++i) {
    Scenario s;
    const int sensors = 3 + static_cast<int>(unit(rng) * 4);  // 3..6
    for (int k = 0; k < sensors; ++k)
      s.layout.positions.push_back({-0.3 + 0.2 * k, 0.0});
    s.layout.range = 0.5 + 2.0 * unit(rng);
    s.layout.rate_min = 5.0 + 20.0 * unit(rng);
    s.layout.rate_max = s.layout.rate_min + 100.0 + 500.0 * unit(rng);
    s.duration = 0.6;
    s.seed = i;
    s.encoding = unit(rng) < 0.5 ? Encoding::Regular : Encoding::Poisson;
    if (s.encoding == Encoding::Poisson && s.layout.rate_max > 900.0)
      s.layout.rate_max = 900.0;
    const int objects = 1 + (unit(rng) < 0.4 ? 1 : 0);
    for (int o = 0; o < objects; ++o) {
      Trajectory tr;
      if (unit(rng) < 0.5) {
        tr.kind = TrajectoryKind::Line;
        tr.start = {-1.0 + 2.0 * unit(rng), 0.05 + 1.5 * unit(rng)};
        tr.end = {-1.0 + 2.0 * unit(rng), 0.05 + 1.5 * unit(rng)};
        tr.speed = 0.2 + 2.0 * unit(rng);
      } else {
        tr.kind = TrajectoryKind::Arc;
        tr.center = {-0.5 + unit(rng), 0.5 + 1.5 * unit(rng)};
        tr.radius = 0.2 + 1.0 * unit(rng);
        tr.start_angle = -3.0 * unit(rng);
        tr.end_angle = 3.0 * unit(rng);
        tr.angular_speed = 0.2 + 2.0 * unit(rng);
      }
      s.objects.push_back(tr);
    }

    CtdConfig config;
    config.num_sensors = sensors;
    const CircuitTopology topo = build_ctd(config);
    const SimTrace trace = run_scenario(s, topo);
    ++runs;
    for (const TraceFrame& frame : trace.frames) {
      for (const AtomicUnit& u : topo.atomic_units) {
        if (u.kind != UnitKind::Pdd) continue;
        int fired = 0;
        for (int m : u.members)
          if (std::binary_search(frame.fired.begin(), frame.fired.end(), m)) ++fired;
        if (fired > 1) ++violations;
      }
    }
  }
  report(1, "PDD winner-take-all over randomized scenarios", violations == 0,
         std::to_string(runs) + " runs, " + std::to_string(violations) +
             " frames with two fired members");
}

// ---------------------------------------------------------------- criterion 2
void criterion_sawtooth() {
  const CmdParams params = calibrate(BandSpec{160.0, 330.0, 0.1}, 0.9, 0.001);
  bool pass = true;
  std::string detail;
  for (const bool lr : {true, false}) {
    const Scenario s =
        load_scenario(scenario_path(lr ? "lr_sweep.json" : "rl_sweep.json"));
    CtdConfig config;
    config.num_sensors = static_cast<int>(s.layout.positions.size());
    config.cmd = params;
    const CircuitTopology topo = build_ctd(config);
    const SimTrace trace = run_scenario(s, topo);
    const std::vector<int> expected =
        lr ? std::vector<int>{0, 1, 2, 0, 1, 2} : std::vector<int>{2, 1, 0, 2, 1, 0};
    for (int unit : units_of_kind(topo, UnitKind::Pdd)) {
      const ActivationPattern pattern = trace_pattern(trace, topo, unit);
      const DirectionEstimate est = classify_direction(pattern);
      const bool dir_ok =
          est.direction == (lr ? Direction::LeftToRight : Direction::RightToLeft) &&
          est.confidence >= 0.9;
      const bool shape_ok = dedup_members(pattern) == expected;
      if (!dir_ok || !shape_ok) pass = false;
      detail += (lr ? "LR" : "RL");
      detail += " u" + std::to_string(unit) + " conf=" +
                std::to_string(est.confidence).substr(0, 4) +
                (shape_ok ? " sawtooth " : " WRONG-PATTERN ");
    }
  }
  report(2, "sawtooth direction decoding on line sweeps", pass, detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_bands() {
  const BandSpec bands{160.0, 250.0, 0.1};
  const double leak = 0.9;
  const double dt = 0.001;
  const CmdParams params = calibrate(bands, leak, dt);
  const BandReport rep = verify_bands(params, bands, leak, dt);

  // pre-inhibition cumulative sets at one rate per band
  CmdParams open = params;
  open.priority_inhibition_weight = 0.0;
  const CircuitTopology probe = build_cmd_probe(open, leak, 1, false);
  auto fired_set = [&](double rate) {
    const int horizon = 3000;
    const SimTrace trace = run(probe, {regular_train(0, rate, dt, horizon)}, horizon);
    std::set<int> out;
    for (const TraceFrame& f : trace.frames)
      if (f.t >= 600)
        for (int id : f.fired) out.insert(id);
    return out;
  };
  const std::set<int> low = fired_set(60.0);
  const std::set<int> mid = fired_set(200.0);
  const std::set<int> high = fired_set(320.0);
  const bool nested = low == std::set<int>{2} && mid == std::set<int>{1, 2} &&
                      high == std::set<int>{0, 1, 2};

  std::ostringstream detail;
  detail << "measured f1=" << rep.measured_f1 << " f2=" << rep.measured_f2
         << " (targets 160/250, tol 10%)"
         << (nested ? ", nested {F}<{M,F}<{N,M,F}" : ", nesting BROKEN");
  report(3, "CMD band structure against the sweep oracle", rep.pass && nested,
         detail.str());
}

// ---------------------------------------------------------------- criterion 4
void criterion_trajectories() {
  const CmdParams params = calibrate(BandSpec{160.0, 330.0, 0.1}, 0.9, 0.001);
  const int window = 150;
  struct Case {
    const char* file;
    Proximity target;
  };
  const std::array<Case, 3> cases = {{{"receding_arc.json", Proximity::Far},
                                      {"straight_pass.json", Proximity::Middle},
                                      {"approaching_arc.json", Proximity::Near}}};
  bool pass = true;
  std::string detail;
  for (const Case& c : cases) {
    const Scenario s = load_scenario(scenario_path(c.file));
    CtdConfig config;
    config.num_sensors = static_cast<int>(s.layout.positions.size());
    config.cmd = params;
    const CircuitTopology topo = build_ctd(config);
    const SimTrace trace = run_scenario(s, topo);
    for (int unit : units_of_kind(topo, UnitKind::Cmd)) {
      int active = 0;
      int hits = 0;
      for (const ProximityWindow& w : decode_proximity(trace, topo, unit, window)) {
        if (w.state == Proximity::None) continue;
        ++active;
        if (w.state == c.target) ++hits;
      }
      const double frac = active > 0 ? static_cast<double>(hits) / active : 0.0;
      if (frac < 0.8) pass = false;
      detail += to_string(c.target) + ":u" + std::to_string(unit) + "=" +
                std::to_string(static_cast<int>(100.0 * frac)) + "% ";
    }
  }
  report(4, "trajectory classification in >=80% of active windows", pass, detail);
}

// ---------------------------------------------------------------- criterion 5
void criterion_baseline_asymmetry() {
  const CmdParams params = calibrate(BandSpec{160.0, 330.0, 0.1}, 0.9, 0.001);
  bool pass = true;
  std::string detail;
  for (const bool lr : {true, false}) {
    const Scenario s =
        load_scenario(scenario_path(lr ? "lr_sweep.json" : "rl_sweep.json"));
    const int sensors = static_cast<int>(s.layout.positions.size());
    const auto trains = encode(s);
    const int horizon = num_steps(s.duration, s.dt);

    const BraitenbergCircuit baseline = build_braitenberg_lr(sensors, 200);
    const SimTrace base_trace = run(baseline.topology, trains, horizon);
    const DirectionEstimate base =
        classify_coincidence(base_trace, baseline.coincidence_neurons);

    CtdConfig config;
    config.num_sensors = sensors;
    config.cmd = params;
    const CircuitTopology topo = build_ctd(config);
    const SimTrace trace = run(topo, trains, horizon);
    Direction ctd_dir = Direction::None;
    double ctd_conf = 0.0;
    {
      int votes = 0;
      for (int unit : units_of_kind(topo, UnitKind::Pdd)) {
        const DirectionEstimate est = classify_direction(trace_pattern(trace, topo, unit));
        if (est.direction != Direction::None) {
          ctd_dir = est.direction;
          ctd_conf += est.confidence;
          ++votes;
        }
      }
      if (votes > 0) ctd_conf /= votes;
    }

    if (lr) {
      if (base.direction != Direction::LeftToRight) pass = false;
      if (ctd_dir != Direction::LeftToRight || ctd_conf < 0.9) pass = false;
    } else {
      if (base.direction != Direction::None) pass = false;
      if (ctd_dir != Direction::RightToLeft || ctd_conf < 0.9) pass = false;
    }
    detail += std::string(lr ? "LR" : "RL") + ": baseline=" +
              to_string(base.direction) + " ctd=" + to_string(ctd_dir) + " ";
  }
  report(5, "baseline detects LR only; CTD detects both", pass, detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_seizure_suppression() {
  const Scenario s = load_scenario(scenario_path("two_objects.json"));
  const CmdParams params = calibrate(BandSpec{160.0, 250.0, 0.1}, 0.9, 0.001);
  const auto trains = encode(s);
  const int horizon = num_steps(s.duration, s.dt);

  auto seizure_count = [&](bool inhibition) {
    CtdConfig config;
    config.num_sensors = static_cast<int>(s.layout.positions.size());
    config.cmd = params;
    config.inhibition = inhibition;
    const CircuitTopology topo = build_ctd(config);
    const SimTrace trace = run(topo, trains, horizon);
    return detect_seizures(trace, 0.5, 50).events.size();
  };
  const std::size_t ablated = seizure_count(false);
  const std::size_t full = seizure_count(true);
  report(6, "inhibition suppresses seizures on the two-object scenario",
         ablated >= 1 && full == 0,
         "ablated events=" + std::to_string(ablated) +
             ", full CTD events=" + std::to_string(full) + " (threshold 0.5, window 50)");
}

// ---------------------------------------------------------------- criterion 7
void criterion_scaling() {
  std::vector<int> neurons, synapses;
  bool valid = true;
  for (int k = 3; k <= 9; ++k) {
    CtdConfig config;
    config.num_sensors = k;
    const CircuitTopology topo = build_ctd(config);
    if (!validate(topo).empty()) valid = false;
    neurons.push_back(static_cast<int>(topo.neurons.size()));
    synapses.push_back(static_cast<int>(topo.synapses.size()));
  }
  bool linear = true;
  for (std::size_t i = 1; i < neurons.size(); ++i) {
    if (neurons[i] - neurons[i - 1] != neurons[1] - neurons[0]) linear = false;
    if (synapses[i] - synapses[i - 1] != synapses[1] - synapses[0]) linear = false;
  }
  for (int u = 1; u <= 8; ++u)
    if (!validate(build_pdd(u)).empty()) valid = false;
  report(7, "builder counts grow linearly and validate clean", linear && valid,
         "neurons 3..9 sensors: +" + std::to_string(neurons[1] - neurons[0]) +
             "/sensor, synapses +" + std::to_string(synapses[1] - synapses[0]) +
             "/sensor");
}

// ---------------------------------------------------------------- criterion 8
void criterion_cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path out_a = fs::temp_directory_path() / "ctd_acc_a";
  const fs::path out_b = fs::temp_directory_path() / "ctd_acc_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  const std::string base = std::string(CTD_CLI_PATH) + " simulate --scenario " +
                           scenario_path("lr_sweep.json") + " --params tune" +
                           " --f1 160 --f2 330 --out ";
  const int rc_a = std::system((base + out_a.string() + " > /dev/null").c_str());
  const int rc_b = std::system((base + out_b.string() + " > /dev/null").c_str());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(out_a / "trace.jsonl");
  const std::string b = slurp(out_b / "trace.jsonl");
  const bool pass = rc_a == 0 && rc_b == 0 && !a.empty() && a == b;
  report(8, "identical CLI invocations give byte-identical traces", pass,
         std::to_string(a.size()) + " bytes compared");
}

// ---------------------------------------------------------------- criterion 9
void criterion_micro_oracles() {
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> weight(0.05, 3.0);
  std::uniform_real_distribution<double> threshold(0.5, 6.0);
  std::uniform_real_distribution<double> leak(0.0, 0.99);
  std::uniform_real_distribution<double> rate(5.0, 900.0);
  const int horizon = 2000;
  const double dt = 0.001;
  int mismatches = 0;
  for (int i = 0; i < 50; ++i) {
    const double w = weight(rng);
    const double thr = threshold(rng);
    const double l = leak(rng);
    const SpikeTrain drive = regular_train(0, rate(rng), dt, horizon);

    // independent scalar recurrence over the same spike times
    int expected = -1;
    {
      double v = 0.0;
      std::size_t k = 0;
      for (int t = 0; t < horizon && expected < 0; ++t) {
        v = l * v;
        if (k < drive.times.size() && drive.times[k] == t) {
          v += w;
          ++k;
        }
        if (v < 0.0) v = 0.0;
        if (v >= thr) expected = t;
      }
    }

    CircuitTopology topo;
    topo.neurons.push_back({0, thr, l, 1, 0.0});
    topo.synapses.push_back({sensor_source(0), 0, w, 0});
    const SimTrace trace = run(topo, {drive}, horizon);
    int actual = -1;
    for (const TraceFrame& f : trace.frames)
      if (!f.fired.empty()) {
        actual = f.t;
        break;
      }
    if (actual != expected) ++mismatches;
  }
  report(9, "first-fire steps match the scalar recurrence oracle", mismatches == 0,
         "50 randomized tuples, " + std::to_string(mismatches) + " mismatches");
}

}  // namespace

int main() {
  criterion_wta();
  criterion_sawtooth();
  criterion_bands();
  criterion_trajectories();
  criterion_baseline_asymmetry();
  criterion_seizure_suppression();
  criterion_scaling();
  criterion_cli_determinism();
  criterion_micro_oracles();
  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
