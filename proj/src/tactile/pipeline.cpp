#include "dexitac/tactile/pipeline.hpp"

namespace dexitac::tactile {

Perception perceive_markers(const MarkerSet& markers, const KdeConfig& config) {
  Perception p;
  p.markers = markers;
  if (markers.empty()) return p;
  p.field = estimate_density(markers, config);
  p.contact = extract_contact(*p.field, config);
  return p;
}

Perception perceive(const TactileFrame& frame, const PerceptionConfig& config) {
  return perceive_markers(detect_markers(frame, config.doh), config.kde);
}

}  // namespace dexitac::tactile
