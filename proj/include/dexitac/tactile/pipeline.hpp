#pragma once

#include <optional>

#include "dexitac/tactile/contact.hpp"
#include "dexitac/tactile/density.hpp"
#include "dexitac/tactile/frame.hpp"
#include "dexitac/tactile/markers.hpp"

namespace dexitac::tactile {

struct PerceptionConfig {
  PreprocessConfig preprocess;
  DohConfig doh;
  KdeConfig kde;
};

struct Perception {
  MarkerSet markers;
  std::optional<DensityField> field;  // absent when no marker was found
  std::optional<ContactRegion> contact;
};

// detect -> density -> contact for an already preprocessed frame.
Perception perceive(const TactileFrame& frame, const PerceptionConfig& config);

// Density and contact from a marker set directly (no image).
Perception perceive_markers(const MarkerSet& markers, const KdeConfig& config);

}  // namespace dexitac::tactile
