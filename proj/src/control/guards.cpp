#include "dexitac/control/guards.hpp"

#include <algorithm>

namespace dexitac::control {

std::string to_string(EdgeAction a) {
  return a == EdgeAction::Continue ? "Continue" : "StopAndReturn";
}

EdgeAction edge_guard(const tactile::ContactTrack& track, int width, int height, double margin) {
  if (track.empty()) return EdgeAction::Continue;
  const Point2 c = track.latest().center;
  const double to_edge = std::min({c.x, c.y, width - c.x, height - c.y});
  return to_edge < margin ? EdgeAction::StopAndReturn : EdgeAction::Continue;
}

}  // namespace dexitac::control
