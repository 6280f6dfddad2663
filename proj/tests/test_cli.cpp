#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CTD_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 256> buffer{};
  CommandResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buffer.data(), buffer.size(), pipe)) result.output += buffer.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ctd_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario(const std::string& name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

}  // namespace

TEST_CASE("simulate writes the full artifact set and decodes the sweep") {
  const fs::path out = fresh_dir("simulate");
  const auto result = run_cli("simulate --scenario " + scenario("lr_sweep.json") +
                              " --params tune --f1 160 --f2 330 --out " + out.string());
  CHECK(result.exit_code == 0);
  CHECK(fs::exists(out / "trace.jsonl"));
  CHECK(fs::exists(out / "spikes.csv"));
  CHECK(fs::exists(out / "potential.csv"));
  CHECK(fs::exists(out / "detections.json"));
  CHECK(fs::exists(out / "raster.svg"));

  const json det = json::parse(slurp(out / "detections.json"));
  CHECK(det.at("direction") == "LR");
  CHECK(det.at("confidence").get<double>() >= 0.9);
  CHECK(det.at("seizures").at("events").empty());
  CHECK(det.at("pdd_units").size() == 2);
  CHECK(det.at("cmd_units").size() == 2);

  // raster sensor marks match spikes.csv rows; neuron marks match the trace
  const std::string svg = slurp(out / "raster.svg");
  const std::string csv = slurp(out / "spikes.csv");
  const std::size_t csv_rows = count_occurrences(csv, "\n") - 1;  // minus header
  CHECK(count_occurrences(svg, "class=\"sspike\"") == csv_rows);

  std::size_t fired_total = 0;
  std::istringstream trace_in(slurp(out / "trace.jsonl"));
  std::string line;
  int frames = 0;
  while (std::getline(trace_in, line)) {
    const json frame = json::parse(line);
    fired_total += frame.at("fired").size();
    CHECK(frame.contains("potentials"));
    CHECK(frame.contains("aggregate_potential"));
    CHECK(frame.at("t") == frames);
    ++frames;
  }
  CHECK(frames == 3500);
  CHECK(count_occurrences(svg, "class=\"nspike\"") == fired_total);
}

TEST_CASE("repeated runs are byte-identical") {
  const fs::path out_a = fresh_dir("det_a");
  const fs::path out_b = fresh_dir("det_b");
  const std::string base = "simulate --scenario " + scenario("rl_sweep.json") +
                           " --circuit ctd --out ";
  CHECK(run_cli(base + out_a.string()).exit_code == 0);
  CHECK(run_cli(base + out_b.string()).exit_code == 0);
  CHECK(slurp(out_a / "trace.jsonl") == slurp(out_b / "trace.jsonl"));
  CHECK(slurp(out_a / "detections.json") == slurp(out_b / "detections.json"));
}

TEST_CASE("emit flags select artifacts") {
  const fs::path out = fresh_dir("emit");
  const auto result = run_cli("simulate --scenario " + scenario("rl_sweep.json") +
                              " --emit report --out " + out.string());
  CHECK(result.exit_code == 0);
  CHECK(fs::exists(out / "detections.json"));
  CHECK(!fs::exists(out / "trace.jsonl"));
  CHECK(!fs::exists(out / "raster.svg"));
}

TEST_CASE("input errors exit 2") {
  SUBCASE("missing scenario file") {
    const auto result = run_cli("simulate --scenario /nonexistent/foo.json");
    CHECK(result.exit_code == 2);
  }
  SUBCASE("malformed scenario") {
    const fs::path dir = fresh_dir("badjson");
    std::ofstream(dir / "bad.json") << "{ not json";
    const auto result = run_cli("simulate --scenario " + (dir / "bad.json").string());
    CHECK(result.exit_code == 2);
  }
  SUBCASE("scenario that violates invariants") {
    const fs::path dir = fresh_dir("badscn");
    std::ofstream(dir / "bad.json") <<
        R"({"layout":{"positions":[[0,0]],"range":-1,"rate_min":10,"rate_max":200},)"
        R"("objects":[{"kind":"line","start":[0,1],"end":[0,1],"speed":1}],)"
        R"("duration":1,"dt":0.001})";
    const auto result = run_cli("simulate --scenario " + (dir / "bad.json").string());
    CHECK(result.exit_code == 2);
  }
  SUBCASE("unknown circuit") {
    const auto result = run_cli("simulate --scenario " + scenario("lr_sweep.json") +
                                " --circuit hopfield");
    CHECK(result.exit_code == 2);
  }
  SUBCASE("unknown flag") {
    const auto result = run_cli("simulate --scenario x --frobnicate");
    CHECK(result.exit_code == 2);
  }
}

TEST_CASE("tune writes a reloadable parameter file") {
  const fs::path dir = fresh_dir("tune");
  const fs::path params = dir / "cmd_params.json";
  const auto result =
      run_cli("tune --f1 160 --f2 250 --tolerance 0.1 --out " + params.string());
  CHECK(result.exit_code == 0);
  const json j = json::parse(slurp(params));
  CHECK(j.at("pass") == true);
  CHECK(j.at("weights").at("near").get<double>() <
        j.at("weights").at("middle").get<double>());
  CHECK(j.at("measured").at("f1").get<double>() ==
        doctest::Approx(160.0).epsilon(0.1));
  CHECK(j.at("measured").at("f2").get<double>() ==
        doctest::Approx(250.0).epsilon(0.1));

  // round trip: simulate accepts the tuned file
  const auto sim = run_cli("simulate --scenario " + scenario("straight_pass.json") +
                           " --params " + params.string() + " --emit report --out " +
                           (dir / "run").string());
  CHECK(sim.exit_code == 0);
}

TEST_CASE("degenerate bands exit 4") {
  const fs::path dir = fresh_dir("tune_bad");
  const auto equal =
      run_cli("tune --f1 100 --f2 100 --out " + (dir / "p.json").string());
  CHECK(equal.exit_code == 4);
  const auto collapsing =
      run_cli("tune --f1 450 --f2 470 --out " + (dir / "q.json").string());
  CHECK(collapsing.exit_code == 4);
}

TEST_CASE("compare contrasts baseline and CTD") {
  SUBCASE("reverse sweep splits the two circuits") {
    const fs::path out = fresh_dir("compare");
    const auto result = run_cli("compare --scenario " + scenario("rl_sweep.json") +
                                " --branch-delay 200 --out " + out.string());
    CHECK(result.exit_code == 0);
    const json j = json::parse(slurp(out / "compare.json"));
    CHECK(j.at("braitenberg-lr").at("direction") == "none");
    CHECK(j.at("ctd").at("direction") == "RL");
  }
  SUBCASE("two nearby objects overload only the baseline") {
    const fs::path out = fresh_dir("compare_two");
    const auto result = run_cli("compare --scenario " + scenario("two_objects.json") +
                                " --branch-delay 2 --out " + out.string());
    CHECK(result.exit_code == 0);
    const json j = json::parse(slurp(out / "compare.json"));
    CHECK(j.at("braitenberg-lr").at("seizures").at("events").size() >= 1);
    CHECK(j.at("ctd").at("seizures").at("events").empty());
  }
}
