#pragma once

#include <optional>
#include <string>

#include "dexitac/geometry.hpp"
#include "dexitac/tactile/contact.hpp"
#include "dexitac/tactile/density.hpp"

namespace dexitac::control {

enum class WindowMode {
  Sliding,  // StableGrasp on every frame whose trailing window is clean
  Restart,  // StableGrasp once per completed window, then counting restarts
};

struct ControlThresholds {
  double t1 = 0.5;                 // mm
  double t2 = 5.0;                 // mm
  double stability_window = 3.0;   // s
  double no_contact_timeout = 10.0;  // s
  WindowMode window_mode = WindowMode::Sliding;
};

void validate(const ControlThresholds& t);

enum class FlagKind { StableGrasp, DisturbanceOccured, Regrasp, NoContact };

std::string to_string(FlagKind kind);
FlagKind flag_kind_from_string(const std::string& s);

struct PerceptionFlag {
  int finger_id = 1;
  FlagKind kind = FlagKind::NoContact;
  double timestamp = 0.0;
  // A contact centre was found in this frame. NoContact with contact=true
  // means "touching, nothing to report yet".
  bool contact = false;

  friend bool operator==(const PerceptionFlag&, const PerceptionFlag&) = default;
};

// Which displacement band D falls in: <= t1, (t1, t2], > t2.
FlagKind displacement_band(double d_mm, const ControlThresholds& t);

// Per-frame flag for one finger.
//   - no centre at `now` -> NoContact, contact = false
//   - latest D > t2 -> Regrasp; latest D in (t1, t2] -> DisturbanceOccured
//   - track spans the full window and every D inside (now - window, now]
//     is <= t1 -> StableGrasp
//   - otherwise NoContact with contact = true
PerceptionFlag classify_frame(const tactile::ContactTrack& track, const ControlThresholds& thresholds,
                              double now, int finger_id = 1);

// Per-finger perception worker state: the track of the current contact
// episode. Losing contact ends the episode and clears the track.
class FingerMonitor {
 public:
  FingerMonitor(int finger_id, ControlThresholds thresholds, tactile::KdeConfig kde);

  PerceptionFlag update(const std::optional<Point2>& center, double timestamp);

  const tactile::ContactTrack& track() const { return track_; }
  std::optional<double> latest_displacement() const;
  int finger_id() const { return finger_id_; }

 private:
  int finger_id_;
  ControlThresholds thresholds_;
  tactile::KdeConfig kde_;
  tactile::ContactTrack track_;
};

}  // namespace dexitac::control
