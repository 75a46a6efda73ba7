#include "dexitac/harness/commands.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "dexitac/error.hpp"
#include "dexitac/harness/scenario_io.hpp"
#include "dexitac/tactile/pgm.hpp"

namespace dexitac::harness {
namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_manifest(const fs::path& dir, const std::string& subcommand, std::uint64_t seed,
                    std::uint64_t hash, const std::vector<std::string>& outputs) {
  auto out = open_out(dir / "manifest.txt");
  out << "tool = dexitac\n"
      << "subcommand = " << subcommand << '\n'
      << "seed = " << seed << '\n'
      << "config_hash = fnv1a64:" << hex64(hash) << '\n';
  for (const std::string& f : outputs) out << "output = " << f << '\n';
}

control::EpisodeTrace grasp_to_dir(const control::Scenario& sc, const fs::path& dir) {
  fs::create_directories(dir);
  const control::EpisodeTrace trace = control::run_grasp(sc);

  open_out(dir / "scenario.txt") << format_scenario(sc);
  {
    auto out = open_out(dir / "episode.csv");
    control::write_episode_csv(out, trace);
  }
  {
    auto out = open_out(dir / "plant.csv");
    control::write_plant_csv(out, trace);
  }
  {
    auto out = open_out(dir / "transitions.csv");
    control::write_transitions_csv(out, trace);
  }
  write_track_csv(dir / "track.csv", track_from_episode(trace, sc.thresholds, tactile::KdeConfig{}.pixel_scale_s));

  {
    auto out = open_out(dir / "summary.txt");
    out << "scenario = " << sc.name << '\n' << "seed = " << sc.seed << '\n';
    out << "final_phase = " << control::to_string(trace.final_phase) << '\n';
    if (auto t = trace.time_to_stable()) out << "time_to_stable = " << fixed(*t, 3) << '\n';
    else out << "time_to_stable = none\n";
    int regrasps = 0;
    for (const auto& c : trace.transitions) regrasps += c.to == control::GraspPhase::Regrasping;
    out << "regrasps = " << regrasps << '\n';
    out << "commands = " << trace.commands.size() << '\n';
    if (!trace.disturbance_onsets.empty()) {
      try {
        out << "response_latency = " << fixed(control::measure_response_latency(trace), 3) << '\n';
      } catch (const NoDisturbance&) {
        out << "response_latency = none\n";
      }
    }
  }
  write_manifest(dir, "grasp", sc.seed, config_hash(sc),
                 {"scenario.txt", "episode.csv", "plant.csv", "transitions.csv", "track.csv", "summary.txt"});
  return trace;
}

std::vector<WorkspaceSummary> workspace_to_dir(const std::vector<kinematics::ChainOrder>& orders,
                                               int samples, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<WorkspaceSummary> result;
  std::vector<std::string> outputs;
  std::string config = "samples=" + std::to_string(samples);
  for (kinematics::ChainOrder order : orders) {
    kinematics::FingerChain chain;
    chain.order = order;
    const kinematics::Workspace ws = kinematics::workspace(chain, samples);
    const std::string name = "workspace_" + kinematics::to_string(order) + ".csv";
    auto out = open_out(dir / name);
    out << "x,y,z\n";
    for (const auto& p : ws.points) {
      out << fixed(p.x(), 6) << ',' << fixed(p.y(), 6) << ',' << fixed(p.z(), 6) << '\n';
    }
    outputs.push_back(name);
    config += ";" + kinematics::to_string(order);
    result.push_back({order, ws.points.size(), ws.hull_volume});
  }
  {
    auto out = open_out(dir / "summary.txt");
    out << "samples_per_axis = " << samples << '\n';
    for (const auto& s : result) {
      const std::string o = kinematics::to_string(s.order);
      out << o << ".points = " << s.points << '\n' << o << ".hull_volume_mm3 = " << fixed(s.hull_volume, 3) << '\n';
    }
    if (result.size() == 2) {
      const auto& a = result[0];
      const auto& b = result[1];
      const auto& dexrot = a.order == kinematics::ChainOrder::DexRot ? a : b;
      const auto& rotdex = a.order == kinematics::ChainOrder::DexRot ? b : a;
      out << "rotdex_smaller = " << (rotdex.hull_volume < dexrot.hull_volume ? "true" : "false") << '\n';
      if (dexrot.hull_volume > 0) out << "volume_ratio = " << fixed(rotdex.hull_volume / dexrot.hull_volume, 6) << '\n';
    }
  }
  outputs.push_back("summary.txt");
  write_manifest(dir, "workspace", 0, fnv1a64(config), outputs);
  return result;
}

TrackFile analyze_frames(const fs::path& frames, const fs::path& dir, const AnalyzeOptions& opt) {
  if (!(opt.frame_rate > 0)) throw ConfigError("frame_rate must be > 0");
  const auto files = tactile::list_frame_files(frames);
  if (files.empty()) throw Error("no frame_<finger>_<seq>.pgm files in '" + frames.string() + "'");
  fs::create_directories(dir);
  if (opt.heatmaps) fs::create_directories(dir / "heatmaps");

  TrackFile track;
  track.thresholds = opt.thresholds;
  track.pixel_scale_s = opt.perception.kde.pixel_scale_s;
  std::map<int, control::FingerMonitor> monitors;
  for (const tactile::FrameFile& f : files) {
    const double t = static_cast<double>(f.seq) / opt.frame_rate;
    const tactile::TactileFrame frame =
        tactile::preprocess(tactile::read_pgm(f.path), opt.perception.preprocess, t, f.finger);
    const tactile::Perception p = tactile::perceive(frame, opt.perception);

    auto it = monitors.find(f.finger);
    if (it == monitors.end()) {
      it = monitors.emplace(f.finger, control::FingerMonitor(f.finger, opt.thresholds, opt.perception.kde)).first;
    }
    TrackRow row;
    row.finger = f.finger;
    row.seq = f.seq;
    row.timestamp = t;
    if (p.contact) row.center = p.contact->center;
    row.flag = it->second.update(row.center, t).kind;
    row.displacement_mm = it->second.latest_displacement();
    track.rows.push_back(row);

    if (opt.heatmaps && p.field) {
      char name[64];
      std::snprintf(name, sizeof name, "density_%d_%06ld.pgm", f.finger, f.seq);
      tactile::write_heatmap_pgm((dir / "heatmaps" / name).string(), *p.field);
    }
  }
  write_track_csv(dir / "track.csv", track);

  std::string config = "frames=" + frames.filename().string() + ";stride=" +
                       std::to_string(opt.perception.kde.grid_stride) + ";rate=" + fixed(opt.frame_rate, 6);
  std::vector<std::string> outputs = {"track.csv"};
  if (opt.heatmaps) outputs.push_back("heatmaps/");
  write_manifest(dir, "analyze", 0, fnv1a64(config), outputs);
  return track;
}

void synthesize_frames(const SynthOptions& opt, const fs::path& dir) {
  if (opt.frames < 1) throw ConfigError("frames must be >= 1");
  sensor::validate(opt.start);
  fs::create_directories(dir);
  sensor::SensorModel model = opt.sensor;
  model.seed = sensor::derive_seed(opt.seed, 1);

  auto stim_out = open_out(dir / "stimulus.csv");
  stim_out << "finger,seq,x,y,depth\n";
  std::vector<std::string> outputs = {"stimulus.csv"};
  for (int finger : opt.fingers) {
    if (finger != 1 && finger != 2) throw ConfigError("finger must be 1 or 2");
    std::vector<std::pair<long, tactile::MarkerSet>> truth;
    for (int k = 0; k < opt.frames; ++k) {
      sensor::ContactStimulus s = opt.start;
      s.center = opt.start.center + opt.velocity * static_cast<double>(k);
      s.timestamp = k / 30.0;
      tactile::MarkerSet markers = sensor::displace_markers(model, s);
      sensor::SensorModel noisy = model;
      noisy.seed = sensor::derive_seed(opt.seed, 2, static_cast<std::uint64_t>(finger), static_cast<std::uint64_t>(k));
      const tactile::TactileFrame frame = sensor::render_frame(markers, noisy);
      tactile::write_pgm(dir / tactile::frame_file_name(finger, k), frame);
      stim_out << finger << ',' << k << ',' << fixed(s.center.x, 6) << ',' << fixed(s.center.y, 6) << ','
               << fixed(s.depth, 6) << '\n';
      truth.emplace_back(k, std::move(markers));
    }
    const std::string gt = "markers_" + std::to_string(finger) + ".csv";
    sensor::write_ground_truth_csv(dir / gt, truth);
    outputs.push_back(gt);
  }
  write_manifest(dir, "synth", opt.seed, fnv1a64("frames=" + std::to_string(opt.frames)), outputs);
}

}  // namespace dexitac::harness
