#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "dexitac/error.hpp"
#include "dexitac/harness/commands.hpp"
#include "dexitac/harness/scenario_io.hpp"
#include "dexitac/harness/track_io.hpp"

namespace {

using namespace dexitac;

int run(int argc, char** argv) {
  CLI::App app{"dexitac: tactile grasp control simulator"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  app.add_option("--seed", seed, "Root seed; overrides the scenario seed");
  app.add_flag("--deterministic", deterministic, "Force single-threaded execution");

  // grasp
  auto* grasp = app.add_subcommand("grasp", "Run a closed-loop grasp episode");
  std::string scenario_path;
  std::string grasp_out;
  bool concurrent = false;
  grasp->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  grasp->add_option("--out", grasp_out, "Output directory")->required();
  grasp->add_flag("--concurrent", concurrent, "One perception worker per finger");

  // workspace
  auto* ws = app.add_subcommand("workspace", "Tip workspace of both chain orders");
  std::string order = "both";
  int samples = 9;
  std::string ws_out = "workspace";
  ws->add_option("--order", order, "dexrot, rotdex or both")
      ->check(CLI::IsMember({"dexrot", "rotdex", "both"}));
  ws->add_option("--samples", samples, "Pressure samples per chamber axis")->check(CLI::Range(2, 64));
  ws->add_option("--out", ws_out, "Output directory");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Perception over a PGM frame directory");
  std::string frames_dir;
  std::string analyze_out = "analysis";
  harness::AnalyzeOptions aopt;
  bool no_heatmaps = false;
  analyze->add_option("--frames", frames_dir, "Directory of frame_<finger>_<seq>.pgm")
      ->required()
      ->check(CLI::ExistingDirectory);
  analyze->add_option("--out", analyze_out, "Output directory");
  analyze->add_option("--stride", aopt.perception.kde.grid_stride, "Density grid stride, px")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--frame-rate", aopt.frame_rate, "Frame rate, Hz")->check(CLI::PositiveNumber);
  analyze->add_flag("--no-heatmaps", no_heatmaps, "Skip density heatmap export");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run classification over a track CSV");
  std::string track_path;
  std::string replay_out;
  replay->add_option("--track", track_path, "Track CSV")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Write the replayed track here");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate sensor-sim frames with ground truth");
  harness::SynthOptions sopt;
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--frames", sopt.frames, "Frames per finger")->check(CLI::PositiveNumber);
  synth->add_option("--fingers", sopt.fingers, "Finger ids")->check(CLI::IsMember({1, 2}));
  synth->add_option("--x", sopt.start.center.x, "Contact centre x at frame 0, px");
  synth->add_option("--y", sopt.start.center.y, "Contact centre y at frame 0, px");
  synth->add_option("--depth", sopt.start.depth, "Indentation depth, mm");
  synth->add_option("--radius", sopt.start.radius, "Contact envelope radius, px");
  synth->add_option("--vx", sopt.velocity.x, "Centre drift per frame, px");
  synth->add_option("--vy", sopt.velocity.y, "Centre drift per frame, px");
  synth->add_option("--shear-x", sopt.start.shear.x, "Shear, px");
  synth->add_option("--shear-y", sopt.start.shear.y, "Shear, px");
  sopt.start.depth = 1.5;

  CLI11_PARSE(app, argc, argv);

  if (grasp->parsed()) {
    control::Scenario sc = harness::load_scenario(scenario_path);
    if (seed) sc.seed = *seed;
    if (concurrent) sc.control.concurrent = true;
    if (deterministic) sc.control.concurrent = false;
    const auto trace = harness::grasp_to_dir(sc, grasp_out);
    std::cout << "final phase: " << control::to_string(trace.final_phase) << '\n';
    if (auto t = trace.time_to_stable()) std::printf("time to stable: %.3f s\n", *t);
    return 0;
  }
  if (ws->parsed()) {
    std::vector<kinematics::ChainOrder> orders;
    if (order == "both") orders = {kinematics::ChainOrder::DexRot, kinematics::ChainOrder::RotDex};
    else orders = {kinematics::chain_order_from_string(order)};
    for (const auto& s : harness::workspace_to_dir(orders, samples, ws_out)) {
      std::printf("%s: %zu points, hull volume %.1f mm^3\n", kinematics::to_string(s.order).c_str(), s.points,
                  s.hull_volume);
    }
    return 0;
  }
  if (analyze->parsed()) {
    aopt.heatmaps = !no_heatmaps;
    const auto track = harness::analyze_frames(frames_dir, analyze_out, aopt);
    std::size_t contacts = 0;
    for (const auto& r : track.rows) contacts += r.center.has_value();
    std::printf("%zu frames, %zu with contact\n", track.rows.size(), contacts);
    return 0;
  }
  if (replay->parsed()) {
    const auto track = harness::read_track_csv(std::filesystem::path(track_path));
    const auto result = harness::replay_track(track);
    if (!replay_out.empty()) {
      harness::TrackFile out = track;
      out.rows = result.rows;
      harness::write_track_csv(std::filesystem::path(replay_out), out);
    }
    std::printf("%zu rows, %zu flag mismatches\n", result.rows.size(), result.mismatches);
    return result.mismatches == 0 ? 0 : 1;
  }
  if (synth->parsed()) {
    if (seed) sopt.seed = *seed;
    harness::synthesize_frames(sopt, synth_out);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dexitac::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
