#pragma once

#include <filesystem>
#include <string>

#include "dexitac/control/episode.hpp"

namespace dexitac::harness {

// Line-based scenario format:
//
//   # comment
//   name = poke
//   seed = 7
//   duration = 15
//
//   [sensor]      grid, marker and displacement model
//   [plant]       delays, tank setpoints, time constant
//   [thresholds]  t1, t2, stability_window, no_contact_timeout, window_mode
//   [control]     frame rate, perception mode, regrasp timing, release_at
//   [event]       one section per stimulus event: time, finger, kind,
//                 x, y, depth, radius, shear_x, shear_y
//
// Omitted keys keep their defaults. A malformed line, value, unknown
// section or unknown key raises ParseError with the line number; a file
// that parses but breaks an invariant raises ValidationError.
control::Scenario parse_scenario(const std::string& text);
control::Scenario load_scenario(const std::filesystem::path& path);

// Canonical text of a scenario; parse_scenario(format_scenario(s)) == s.
std::string format_scenario(const control::Scenario& scenario);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t config_hash(const control::Scenario& scenario);

}  // namespace dexitac::harness
