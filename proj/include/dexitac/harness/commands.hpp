#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dexitac/control/episode.hpp"
#include "dexitac/harness/track_io.hpp"
#include "dexitac/kinematics/kinematics.hpp"
#include "dexitac/sensor/sensor_sim.hpp"
#include "dexitac/tactile/pipeline.hpp"

namespace dexitac::harness {

// manifest.txt: subcommand, seed, config hash and the files written.
// Nothing time- or host-dependent goes in, so reruns stay byte-identical.
void write_manifest(const std::filesystem::path& dir, const std::string& subcommand, std::uint64_t seed,
                    std::uint64_t config_hash, const std::vector<std::string>& outputs);

// grasp: scenario.txt, episode.csv, plant.csv, transitions.csv, track.csv,
// summary.txt, manifest.txt.
control::EpisodeTrace grasp_to_dir(const control::Scenario& scenario, const std::filesystem::path& out);

struct WorkspaceSummary {
  kinematics::ChainOrder order;
  std::size_t points = 0;
  double hull_volume = 0.0;  // mm^3
};

// workspace: workspace_<order>.csv (x,y,z) per order plus summary.txt.
std::vector<WorkspaceSummary> workspace_to_dir(const std::vector<kinematics::ChainOrder>& orders,
                                               int samples_per_axis, const std::filesystem::path& out);

struct AnalyzeOptions {
  double frame_rate = 30.0;  // Hz; frame seq n is at n / frame_rate
  tactile::PerceptionConfig perception;
  control::ControlThresholds thresholds;
  bool heatmaps = true;
};

// analyze: perception over frame_<finger>_<seq>.pgm files. Writes track.csv
// and, if requested, heatmaps/density_<finger>_<seq>.pgm.
TrackFile analyze_frames(const std::filesystem::path& frames, const std::filesystem::path& out,
                         const AnalyzeOptions& options);

struct SynthOptions {
  std::uint64_t seed = 1;
  int frames = 30;
  std::vector<int> fingers = {1};
  sensor::SensorModel sensor;
  sensor::ContactStimulus start;  // stimulus of frame 0
  Point2 velocity{0.0, 0.0};      // px per frame
};

// synth: sensor-sim frames with ground truth. Writes the frame PGMs,
// stimulus.csv (finger,seq,x,y,depth) and markers_<finger>.csv.
void synthesize_frames(const SynthOptions& options, const std::filesystem::path& out);

}  // namespace dexitac::harness
