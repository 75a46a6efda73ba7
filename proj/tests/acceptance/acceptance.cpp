// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dexitac/control/arbiter.hpp"
#include "dexitac/control/classifier.hpp"
#include "dexitac/control/episode.hpp"
#include "dexitac/error.hpp"
#include "dexitac/harness/commands.hpp"
#include "dexitac/harness/scenario_io.hpp"
#include "dexitac/harness/track_io.hpp"
#include "dexitac/kinematics/kinematics.hpp"
#include "dexitac/plant/plant.hpp"
#include "dexitac/sensor/sensor_sim.hpp"
#include "dexitac/tactile/density.hpp"
#include "dexitac/tactile/pipeline.hpp"

namespace {

using namespace dexitac;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Result {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. KDE against the direct per-point sum.
Result kde_correctness() {
  const auto t0 = Clock::now();
  const double c = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * 15.0 * 15.0);
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> count(1, 50);
  std::uniform_real_distribution<double> ux(-5.0, 69.0);
  std::uniform_real_distribution<double> uy(-5.0, 53.0);
  tactile::KdeConfig cfg;
  cfg.frame_width = 64;
  cfg.frame_height = 48;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    tactile::MarkerSet set;
    set.centroids.resize(static_cast<std::size_t>(count(rng)));
    for (auto& p : set.centroids) p = {ux(rng), uy(rng)};
    const tactile::DensityField f = tactile::estimate_density(set, cfg);
    if (f.cols != 64 || f.rows != 48) return {false, "grid is not 64x48"};
    for (int y = 0; y < 48; ++y) {
      for (int x = 0; x < 64; ++x) {
        double sum = 0.0;
        for (const Point2& m : set.centroids) {
          sum += std::exp(-((x - m.x) * (x - m.x) + (y - m.y) * (y - m.y)) / (2.0 * 15.0 * 15.0)) * c;
        }
        worst = std::max(worst, std::abs(f.at(x, y) - sum / static_cast<double>(set.size())));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-12 && secs < 10.0, fmt("max abs error %.3g over 100 sets, %.2f s", worst, secs)};
}

// 2. Rendered frames through the full detector recover the stimulus centre.
Result perception_round_trip() {
  int frames = 0;
  int hits = 0;
  tactile::PerceptionConfig cfg;
  cfg.kde.grid_stride = 4;
  for (std::uint64_t episode = 0; episode < 50; ++episode) {
    std::mt19937_64 rng(sensor::derive_seed(2024, episode));
    std::uniform_real_distribution<double> ux(120.0, 520.0);
    std::uniform_real_distribution<double> uy(100.0, 380.0);
    std::uniform_real_distribution<double> depth(1.0, 2.0);
    std::uniform_real_distribution<double> drift(-3.0, 3.0);
    sensor::SensorModel model;
    model.seed = sensor::derive_seed(episode, 1);
    sensor::ContactStimulus s;
    s.center = {ux(rng), uy(rng)};
    s.depth = depth(rng);
    const Point2 v{drift(rng), drift(rng)};
    for (int k = 0; k < 6; ++k) {
      sensor::SensorModel noisy = model;
      noisy.seed = sensor::derive_seed(episode, 2, 1, static_cast<std::uint64_t>(k));
      const auto image = sensor::render_frame(sensor::displace_markers(model, s), noisy);
      const auto p = tactile::perceive(image, cfg);
      ++frames;
      if (p.contact && distance(p.contact->center, s.center) <= 2.0) ++hits;
      s.center = s.center + v;
    }
  }
  const double rate = static_cast<double>(hits) / frames;
  return {rate >= 0.95, fmt("%d/%d frames within 2 px (%.1f%%)", hits, frames, 100.0 * rate)};
}

// 3. Branch partition of classify_frame and the closing timeout.
Result branch_fidelity() {
  using control::FlagKind;
  const control::ControlThresholds t;
  const double frame = 1.0 / 30.0;
  const std::vector<double> values = {0.0,  0.25, 0.5, std::nextafter(0.5, 1.0), 2.0,
                                      5.0, std::nextafter(5.0, 6.0), 6.0};
  // Frames are 1/30 s apart; position 29/30 sit on the window edge and are
  // left out so the oracle does not depend on rounding of k/30.
  const std::vector<int> positions = {-1, 5, 28, 31, 60, 118};
  const std::vector<int> lengths = {60, 90, 91, 120};
  long cases = 0;
  long wrong = 0;

  for (int n : lengths) {
    for (double base : values) {
      for (double spike : values) {
        for (int pos : positions) {
          if (pos >= n - 1) continue;
          for (double latest : values) {
            std::vector<double> d(static_cast<std::size_t>(n), base);  // d[k]: step into frame k
            if (pos > 0) d[static_cast<std::size_t>(pos)] = spike;
            d.back() = latest;

            tactile::ContactTrack track;
            for (int k = 0; k < n; ++k) {
              track.centers.push_back({k * frame, {320.0 + k, 240.0}});
              if (k > 0) track.displacements.push_back({k * frame, d[static_cast<std::size_t>(k)]});
            }
            const double now = (n - 1) * frame;

            FlagKind expect;
            if (latest > t.t2) {
              expect = FlagKind::Regrasp;
            } else if (latest > t.t1) {
              expect = FlagKind::DisturbanceOccured;
            } else {
              bool quiet = (n - 1) * frame >= t.stability_window - 1e-9;
              for (int k = 1; k < n; ++k) {
                if (k * frame > now - t.stability_window + 1e-9 && d[static_cast<std::size_t>(k)] > t.t1) quiet = false;
              }
              expect = quiet ? FlagKind::StableGrasp : FlagKind::NoContact;
            }
            ++cases;
            wrong += control::classify_frame(track, t, now).kind != expect;
          }
        }
      }
    }
  }

  // Release exactly at 10 s of closing without contact, and never if a
  // contact frame arrives first.
  auto closing_until = [&](int contact_frame) {
    control::GraspController c;
    c.start(0.0);
    for (int f = 1; f <= 400; ++f) {
      const double now = f * frame;
      const bool touch = f == contact_frame;
      const control::PerceptionFlag a{1, FlagKind::NoContact, now, touch};
      const control::PerceptionFlag b{2, FlagKind::NoContact, now, false};
      const auto cmd = c.arbitrate(a, b, now);
      if (cmd && cmd->kind == control::CommandKind::Release) return f;
      if (c.phase() != control::GraspPhase::Closing) return -f;
    }
    return 0;
  };
  const int release_frame = closing_until(-1);
  const int touched = closing_until(299);
  const bool release_ok = release_frame == 300 && touched == -299;
  return {wrong == 0 && release_ok,
          fmt("%ld/%ld classifier cases match the oracle; release at frame %d (10 s), contact at 9.97 s -> %s",
              cases - wrong, cases, release_frame, touched == -299 ? "Contacted" : "wrong")};
}

// 4. Poke after sealing: seal, reopen, reseal, with latency in [0.06, 0.36] s.
Result disturbance_recovery() {
  const control::Scenario sc = harness::load_scenario(fs::path(DEXITAC_SCENARIO_DIR) / "poke.txt");
  const control::EpisodeTrace trace = control::run_grasp(sc);
  std::vector<control::CommandKind> after_start;
  for (std::size_t i = 1; i < trace.commands.size(); ++i) after_start.push_back(trace.commands[i].kind);
  using K = control::CommandKind;
  bool sequence = after_start.size() >= 3 && after_start[0] == K::CloseValves && after_start[1] == K::ReopenValves &&
                  after_start[2] == K::CloseValves;
  double seal = -1, reopen = -1, reseal = -1;
  if (sequence) {
    seal = trace.commands[1].timestamp;
    reopen = trace.commands[2].timestamp;
    reseal = trace.commands[3].timestamp;
    sequence = seal < 5.0 && reopen >= 5.0;
  }
  double latency = -1.0;
  try {
    latency = control::measure_response_latency(trace);
  } catch (const NoDisturbance&) {
  }
  const bool ok = sequence && latency >= 0.06 - 1e-9 && latency <= 0.36;
  return {ok, fmt("seal %.3f s, reopen %.3f s, reseal %.3f s; latency %.3f s", seal, reopen, reseal, latency)};
}

// 5. Random valve commands never leave the actuator limits.
Result safety_invariant() {
  const auto t0 = Clock::now();
  plant::PlantConfig c;
  c.volume_ratio = 0.2;
  plant::Plant p(c);
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> mask(1, 255);
  std::uniform_int_distribution<int> valve(-1, 1);
  std::uniform_int_distribution<int> gap(1, 150);
  double lo = 0.0, hi = 0.0;
  long violations = 0;
  int next = 0;
  for (int t = 0; t < 100000; ++t) {
    if (t == next) {
      p.apply_valve_command(static_cast<std::uint8_t>(mask(rng)), plant::valve_from_int(valve(rng)));
      next += gap(rng);
    }
    p.step();
    for (double v : p.state().chambers) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      violations += v < plant::kPressureMin || v > plant::kPressureMax;
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 30.0,
          fmt("1e5 ticks, chamber range [%.2f, %.2f] kPa, %ld violations, %.2f s", lo, hi, violations, secs)};
}

// 6. Workspace ordering plus the kinematics checks.
Result workspace_ordering() {
  using namespace kinematics;
  FingerChain dr;
  FingerChain rd;
  rd.order = ChainOrder::RotDex;
  const double v_dr = workspace(dr, 9).hull_volume;
  const double v_rd = workspace(rd, 9).hull_volume;

  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> k(-0.06, 0.06);
  std::uniform_real_distribution<double> phi(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> len(5.0, 40.0);
  double ortho = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Matrix3d r = cc_transform({k(rng), phi(rng), len(rng)}).block<3, 3>(0, 0);
    ortho = std::max(ortho, (r.transpose() * r - Eigen::Matrix3d::Identity()).norm());
  }
  double continuity = 0.0;
  for (double a : {0.0, 0.8, -2.0}) {
    const Eigen::Vector3d p0 = cc_transform({0.0, a, 30.0}).block<3, 1>(0, 3);
    const Eigen::Vector3d p1 = cc_transform({1e-8, a, 30.0}).block<3, 1>(0, 3);
    continuity = std::max(continuity, (p0 - p1).norm());
  }
  const Eigen::Vector3d q = cc_transform({1.0 / 50.0, 0.0, 25.0 * std::numbers::pi}).block<3, 1>(0, 3);
  const double quarter = (q - Eigen::Vector3d(50.0, 0.0, 50.0)).norm();

  const bool ok = v_rd < v_dr && ortho < 1e-10 && continuity < 1e-4 && quarter < 1e-6;
  return {ok, fmt("RotDex %.0f < DexRot %.0f mm^3 (ratio %.3f); |RtR-I| %.2g, kappa->0 %.2g mm, quarter circle %.2g mm",
                  v_rd, v_dr, v_rd / v_dr, ortho, continuity, quarter)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every regular file under a and b, compared byte for byte.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::vector<fs::path> rel;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
  }
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file();
  if (rel.size() != count_b) return false;
  for (const auto& r : rel) {
    if (!fs::exists(b / r) || slurp(a / r) != slurp(b / r)) return false;
  }
  files += rel.size();
  return true;
}

// 7. Every subcommand twice with the same seed.
Result determinism() {
  const fs::path root = fs::temp_directory_path() / "dexitac_acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0;
  std::vector<std::string> failed;
  auto twice = [&](const std::string& name, const std::function<void(const fs::path&)>& run) {
    run(root / (name + "_a"));
    run(root / (name + "_b"));
    if (!same_tree(root / (name + "_a"), root / (name + "_b"), files)) failed.push_back(name);
  };

  control::Scenario sc = harness::load_scenario(fs::path(DEXITAC_SCENARIO_DIR) / "slip.txt");
  twice("grasp", [&](const fs::path& d) { harness::grasp_to_dir(sc, d); });
  twice("workspace", [&](const fs::path& d) {
    harness::workspace_to_dir({kinematics::ChainOrder::DexRot, kinematics::ChainOrder::RotDex}, 6, d);
  });
  harness::SynthOptions so;
  so.seed = 77;
  so.frames = 4;
  so.fingers = {1, 2};
  so.start.center = {300.0, 220.0};
  so.velocity = {3.0, 0.0};
  twice("synth", [&](const fs::path& d) { harness::synthesize_frames(so, d); });
  twice("analyze", [&](const fs::path& d) { harness::analyze_frames(root / "synth_a", d, {}); });
  twice("replay", [&](const fs::path& d) {
    fs::create_directories(d);
    harness::TrackFile t = harness::read_track_csv(root / "grasp_a" / "track.csv");
    t.rows = harness::replay_track(t).rows;
    harness::write_track_csv(d / "track.csv", t);
  });
  fs::remove_all(root);
  std::string detail = fmt("%zu files identical across grasp, workspace, synth, analyze, replay", files);
  if (!failed.empty()) {
    detail = "differs:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

// 8. The static grasp settles in 3..15 s of simulated time.
Result time_to_stable() {
  const control::Scenario sc = harness::load_scenario(fs::path(DEXITAC_SCENARIO_DIR) / "static_grasp.txt");
  const control::EpisodeTrace trace = control::run_grasp(sc);
  const auto t = trace.time_to_stable();
  if (!t) return {false, "never reached Stable"};
  return {*t >= 3.0 && *t <= 15.0, fmt("Stable at %.3f s", *t)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Result (*)()>> criteria = {
      {"AC1 kde correctness", kde_correctness},
      {"AC2 perception round trip", perception_round_trip},
      {"AC3 branch fidelity", branch_fidelity},
      {"AC4 disturbance recovery", disturbance_recovery},
      {"AC5 safety invariant", safety_invariant},
      {"AC6 workspace ordering", workspace_ordering},
      {"AC7 determinism", determinism},
      {"AC8 time to stable", time_to_stable},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Result r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
