#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dexitac/control/classifier.hpp"
#include "dexitac/control/episode.hpp"
#include "dexitac/tactile/density.hpp"

namespace dexitac::harness {

// One frame of one finger.
struct TrackRow {
  int finger = 1;
  long seq = 0;
  double timestamp = 0.0;
  std::optional<Point2> center;  // absent when the frame has no contact
  std::optional<double> displacement_mm;
  control::FlagKind flag = control::FlagKind::NoContact;
};

// Classification settings travel in the header comments so a track can be
// replayed on its own.
struct TrackFile {
  control::ControlThresholds thresholds;
  double pixel_scale_s = 0.05;  // mm per px
  std::vector<TrackRow> rows;
};

// "# key = value" header lines, then
// finger,seq,timestamp,contact,x,y,d_mm,flag
void write_track_csv(std::ostream& out, const TrackFile& track);
void write_track_csv(const std::filesystem::path& path, const TrackFile& track);
TrackFile read_track_csv(std::istream& in);
TrackFile read_track_csv(const std::filesystem::path& path);

// Track rows of both fingers from an episode, finger 1 first.
TrackFile track_from_episode(const control::EpisodeTrace& trace, const control::ControlThresholds& thresholds,
                             double pixel_scale_s);

struct ReplayResult {
  std::vector<TrackRow> rows;  // recomputed displacement and flag
  std::size_t mismatches = 0;  // rows whose flag differs from the recorded one
};

// Re-runs per-finger classification over the recorded centres.
ReplayResult replay_track(const TrackFile& track);

}  // namespace dexitac::harness
