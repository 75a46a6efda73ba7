#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dexitac/geometry.hpp"
#include "dexitac/tactile/frame.hpp"
#include "dexitac/tactile/markers.hpp"

namespace dexitac::sensor {

// Synthetic marker skin. The default grid tiles the whole 640x480 view
// at 15 px pitch, centred, so the rest-state density stays above the
// contact threshold everywhere including the image border.
struct SensorModel {
  int grid_rows = 32;
  int grid_cols = 43;
  double spacing = 15.0;       // px
  double marker_radius = 4.0;  // px
  double noise_sigma = 0.01;   // intensity units
  std::uint64_t seed = 1;
  double displacement_gain = 30.0;  // px of radial marker shift per mm of depth
  double jitter = 0.0;              // px, uniform in [-jitter, jitter] per axis, from `seed`
  double background = 1.0;
  double marker_intensity = 0.1;
  int frame_width = tactile::kFrameWidth;
  int frame_height = tactile::kFrameHeight;
};

void validate(const SensorModel& model);

struct ContactStimulus {
  Point2 center{320.0, 240.0};
  double depth = 0.0;    // mm
  double radius = 25.0;  // px, width of the Gaussian envelope
  Point2 shear{0.0, 0.0};
  double timestamp = 0.0;
};

void validate(const ContactStimulus& stimulus);

// Rest-state marker positions, row-major over the grid.
tactile::MarkerSet nominal_markers(const SensorModel& model);

// Each nominal marker at distance r from the stimulus centre moves
// radially outward by depth * gain * exp(-r^2 / (2 radius^2)) px, plus the
// shear vector scaled by the same envelope. A marker exactly at the
// centre is pushed along +x. Marker order is preserved.
tactile::MarkerSet displace_markers(const SensorModel& model, const ContactStimulus& stimulus);

// White background, dark anti-aliased disks (4x4 supersampling), additive
// Gaussian noise from model.seed, clamped to [0, 1].
tactile::TactileFrame render_frame(const tactile::MarkerSet& markers, const SensorModel& model);

// Deterministic sub-seed derivation (splitmix64 mixing of the parts).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

// Ground-truth sidecar: "seq,marker,x,y" rows.
void write_ground_truth_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<long, tactile::MarkerSet>>& frames);

}  // namespace dexitac::sensor
