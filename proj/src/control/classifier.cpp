#include "dexitac/control/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "dexitac/error.hpp"

namespace dexitac::control {
namespace {

// Timestamps are tick multiples; this absorbs their rounding only.
constexpr double kTimeEps = 1e-9;

}  // namespace

void validate(const ControlThresholds& t) {
  if (!(t.t1 > 0.0 && t.t1 < t.t2)) throw ConfigError("thresholds need 0 < t1 < t2");
  if (!(t.stability_window > 0.0 && t.no_contact_timeout > 0.0)) {
    throw ConfigError("stability window and no-contact timeout must be > 0");
  }
}

std::string to_string(FlagKind k) {
  switch (k) {
    case FlagKind::StableGrasp: return "StableGrasp";
    case FlagKind::DisturbanceOccured: return "DisturbanceOccured";
    case FlagKind::Regrasp: return "Regrasp";
    case FlagKind::NoContact: return "NoContact";
  }
  return "?";
}

FlagKind flag_kind_from_string(const std::string& s) {
  for (FlagKind k : {FlagKind::StableGrasp, FlagKind::DisturbanceOccured, FlagKind::Regrasp,
                     FlagKind::NoContact}) {
    if (to_string(k) == s) return k;
  }
  throw Error("unknown flag '" + s + "'");
}

FlagKind displacement_band(double d, const ControlThresholds& t) {
  if (d <= t.t1) return FlagKind::StableGrasp;
  if (d <= t.t2) return FlagKind::DisturbanceOccured;
  return FlagKind::Regrasp;
}

PerceptionFlag classify_frame(const tactile::ContactTrack& track, const ControlThresholds& t,
                              double now, int finger_id) {
  PerceptionFlag flag{finger_id, FlagKind::NoContact, now, false};
  if (track.empty() || track.latest().timestamp < now - kTimeEps) return flag;
  flag.contact = true;

  const auto& ds = track.displacements;
  if (!ds.empty() && std::abs(ds.back().timestamp - track.latest().timestamp) <= kTimeEps) {
    const FlagKind band = displacement_band(ds.back().mm, t);
    if (band != FlagKind::StableGrasp) {
      flag.kind = band;
      return flag;
    }
  }

  const double window_start = now - t.stability_window;
  if (track.centers.front().timestamp > window_start + kTimeEps) return flag;

  // Newest violation bounds the window from below.
  double anchor = track.centers.front().timestamp;
  for (auto it = ds.rbegin(); it != ds.rend(); ++it) {
    if (it->mm > t.t1) {
      anchor = it->timestamp;
      break;
    }
  }
  if (anchor > window_start + kTimeEps) return flag;

  if (t.window_mode == WindowMode::Restart) {
    // Fire only on the frame that completes another full window.
    const double prev = track.centers.size() >= 2 ? track.centers[track.centers.size() - 2].timestamp
                                                  : anchor;
    const auto completed = [&](double time) {
      return std::floor((time - anchor) / t.stability_window + kTimeEps);
    };
    if (!(completed(now) > completed(std::max(prev, anchor)))) return flag;
  }
  flag.kind = FlagKind::StableGrasp;
  return flag;
}

FingerMonitor::FingerMonitor(int finger_id, ControlThresholds thresholds, tactile::KdeConfig kde)
    : finger_id_(finger_id), thresholds_(thresholds), kde_(kde) {
  validate(thresholds_);
}

PerceptionFlag FingerMonitor::update(const std::optional<Point2>& center, double timestamp) {
  if (center) {
    track_ = tactile::track_displacement(std::move(track_), *center, timestamp, kde_);
  } else {
    track_ = {};
  }
  return classify_frame(track_, thresholds_, timestamp, finger_id_);
}

std::optional<double> FingerMonitor::latest_displacement() const {
  if (track_.displacements.empty() || track_.empty()) return std::nullopt;
  if (track_.displacements.back().timestamp != track_.latest().timestamp) return std::nullopt;
  return track_.displacements.back().mm;
}

}  // namespace dexitac::control
