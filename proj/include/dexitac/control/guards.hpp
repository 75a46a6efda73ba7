#pragma once

#include <string>

#include "dexitac/tactile/contact.hpp"

namespace dexitac::control {

enum class EdgeAction { Continue, StopAndReturn };

std::string to_string(EdgeAction action);

// StopAndReturn once the latest contact centre is closer than `margin` px
// to any frame edge. An empty track has nothing to guard and continues.
EdgeAction edge_guard(const tactile::ContactTrack& track, int frame_width, int frame_height,
                      double margin);

}  // namespace dexitac::control
