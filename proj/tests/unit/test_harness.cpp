#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dexitac/error.hpp"
#include "dexitac/harness/commands.hpp"
#include "dexitac/harness/scenario_io.hpp"
#include "dexitac/harness/track_io.hpp"

using namespace dexitac;
using namespace dexitac::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dexitac_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kQuick = R"(name = quick
seed = 5
duration = 4

[control]
perception = markers

[event]
time = 0
finger = 1
kind = contact
x = 320
y = 240
depth = 1.5

[event]
time = 0
finger = 2
kind = contact
x = 300
y = 250
depth = 1.5

[event]
time = 3.5
finger = 2
kind = remove
)";

}  // namespace

TEST_CASE("minimal file fills defaults") {
  const control::Scenario sc = parse_scenario("name = tiny\n");
  const control::Scenario def;
  CHECK(sc.name == "tiny");
  CHECK(sc.seed == def.seed);
  CHECK(sc.duration == def.duration);
  CHECK(sc.thresholds.t1 == 0.5);
  CHECK(sc.thresholds.t2 == 5.0);
  CHECK(sc.plant.valve_latency == 0.010);
  CHECK(sc.events.empty());
  CHECK(parse_scenario("").name == def.name);
}

TEST_CASE("comments, blank lines and sections") {
  const control::Scenario sc = parse_scenario(
      "# header\n\nseed = 99\n[thresholds]\nt1 = 0.4   \nwindow_mode = restart\n[plant]\nline_delay = 0.02\n");
  CHECK(sc.seed == 99u);
  CHECK(sc.thresholds.t1 == 0.4);
  CHECK(sc.thresholds.window_mode == control::WindowMode::Restart);
  CHECK(sc.plant.line_delay == 0.02);
}

TEST_CASE("out-of-order stimulus times are rejected") {
  const std::string text =
      "[event]\ntime = 2\nfinger = 1\nkind = contact\nx = 1\ny = 1\ndepth = 1\n"
      "[event]\ntime = 1\nfinger = 1\nkind = remove\n";
  CHECK_THROWS_AS(parse_scenario(text), ValidationError);
  try {
    parse_scenario(text);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("time") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("[event]\ntime = 0\nfinger = 3\nkind = remove\n"), ValidationError);
  CHECK_THROWS_AS(parse_scenario("[thresholds]\nt1 = 6\n"), ValidationError);
}

TEST_CASE("unknown key names the key and line") {
  try {
    parse_scenario("name = x\n\n[plant]\nvalve_latncy = 0.01\n");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("valve_latncy") != std::string::npos);
  }
}

TEST_CASE("malformed input is a parse error") {
  CHECK_THROWS_AS(parse_scenario("seed = abc\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("seed = 12x\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("duration =\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("just words\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[nope]\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("seed = 1\nseed = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[thresholds]\nwindow_mode = sometimes\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[event]\ntime = 0\nfinger = 1\nkind = contact\n"), ParseError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.txt"), ScenarioError);
}

TEST_CASE("format round trip") {
  for (const auto& entry : fs::directory_iterator(DEXITAC_SCENARIO_DIR)) {
    CAPTURE(entry.path().string());
    const control::Scenario sc = load_scenario(entry.path());
    const std::string text = format_scenario(sc);
    CHECK(format_scenario(parse_scenario(text)) == text);
    CHECK(config_hash(parse_scenario(text)) == config_hash(sc));
  }
  control::Scenario odd = parse_scenario(kQuick);
  odd.plant.valve_latency = 0.1 + 0.2;  // needs all 17 digits
  CHECK(parse_scenario(format_scenario(odd)).plant.valve_latency == odd.plant.valve_latency);
  CHECK(config_hash(odd) != config_hash(parse_scenario(kQuick)));
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("grasp output is byte-identical across runs") {
  const control::Scenario sc = parse_scenario(kQuick);
  const fs::path a = scratch("grasp_a");
  const fs::path b = scratch("grasp_b");
  grasp_to_dir(sc, a);
  grasp_to_dir(sc, b);
  for (const char* f : {"scenario.txt", "episode.csv", "plant.csv", "transitions.csv", "track.csv", "summary.txt",
                        "manifest.txt"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const std::string manifest = slurp(a / "manifest.txt");
  CHECK(manifest.find("seed = 5\n") != std::string::npos);
  CHECK(manifest.find("subcommand = grasp\n") != std::string::npos);
  CHECK(manifest.find("config_hash = fnv1a64:") != std::string::npos);

  control::Scenario other = sc;
  other.seed = 6;
  const fs::path c = scratch("grasp_c");
  grasp_to_dir(other, c);
  CHECK(slurp(a / "episode.csv") != slurp(c / "episode.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("track files replay to the same flags") {
  const control::Scenario sc = parse_scenario(kQuick);
  const control::EpisodeTrace trace = control::run_grasp(sc);
  const TrackFile track = track_from_episode(trace, sc.thresholds, 0.05);
  REQUIRE(track.rows.size() == 2 * trace.rows.size());

  std::stringstream io;
  write_track_csv(io, track);
  const TrackFile back = read_track_csv(io);
  REQUIRE(back.rows.size() == track.rows.size());
  CHECK(back.pixel_scale_s == track.pixel_scale_s);
  CHECK(back.thresholds.t1 == track.thresholds.t1);

  const ReplayResult r = replay_track(back);
  CHECK(r.mismatches == 0u);
  bool saw_stable = false;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    REQUIRE(r.rows[i].flag == track.rows[i].flag);
    saw_stable |= r.rows[i].flag == control::FlagKind::StableGrasp;
  }
  CHECK(saw_stable);

  // A tampered flag is reported.
  TrackFile bad = back;
  bad.rows[5].flag = control::FlagKind::Regrasp;
  CHECK(replay_track(bad).mismatches == 1u);
}

TEST_CASE("track csv rejects malformed rows") {
  std::stringstream bad("finger,seq,timestamp,contact,x,y,d_mm,flag\n1,0,0.0,1,320,240,,Sideways\n");
  CHECK_THROWS(read_track_csv(bad));
}

TEST_CASE("synth then analyze recovers the ground truth") {
  const fs::path frames = scratch("synth");
  const fs::path out = scratch("analyze");
  SynthOptions s;
  s.seed = 3;
  s.frames = 6;
  s.fingers = {1, 2};
  s.start.center = {300.0, 230.0};
  s.start.depth = 1.5;
  s.velocity = {4.0, 1.5};
  synthesize_frames(s, frames);
  REQUIRE(fs::exists(frames / "markers_1.csv"));

  const TrackFile track = analyze_frames(frames, out, AnalyzeOptions{});
  REQUIRE(track.rows.size() == 12u);
  REQUIRE(fs::exists(out / "track.csv"));
  REQUIRE(fs::exists(out / "heatmaps"));

  std::map<std::pair<int, long>, Point2> truth;
  std::ifstream in(frames / "stimulus.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    int f;
    long seq;
    double x, y, d;
    REQUIRE(std::sscanf(line.c_str(), "%d,%ld,%lf,%lf,%lf", &f, &seq, &x, &y, &d) == 5);
    truth[{f, seq}] = {x, y};
  }
  for (const TrackRow& r : track.rows) {
    REQUIRE(r.center.has_value());
    CHECK(distance(*r.center, truth.at({r.finger, r.seq})) <= 2.0);
  }
  // Steady drift of |(4, 1.5)| px per frame.
  CHECK(track.rows[3].displacement_mm.value() == doctest::Approx(0.05 * std::hypot(4.0, 1.5)).epsilon(0.5));
  fs::remove_all(frames);
  fs::remove_all(out);
}

TEST_CASE("workspace summary") {
  const fs::path dir = scratch("workspace");
  const auto s = workspace_to_dir({kinematics::ChainOrder::DexRot, kinematics::ChainOrder::RotDex}, 5, dir);
  REQUIRE(s.size() == 2u);
  CHECK(fs::exists(dir / "workspace_dexrot.csv"));
  CHECK(fs::exists(dir / "workspace_rotdex.csv"));
  const std::string summary = slurp(dir / "summary.txt");
  CHECK(summary.find("rotdex_smaller = true") != std::string::npos);
  std::ifstream csv(dir / "workspace_rotdex.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "x,y,z");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 5 * 5 * 5 * 5);
  fs::remove_all(dir);
}
