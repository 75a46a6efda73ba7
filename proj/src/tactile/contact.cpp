#include "dexitac/tactile/contact.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "dexitac/error.hpp"

namespace dexitac::tactile {

std::optional<ContactRegion> extract_contact_below(const DensityField& field, double threshold,
                                                   Connectivity connectivity) {
  const int cols = field.cols;
  const int rows = field.rows;
  const std::size_t n = field.values.size();
  std::vector<int> label(n, -1);
  std::vector<std::size_t> stack;

  int best_label = -1;
  std::size_t best_size = 0;
  int next_label = 0;

  // Labels are assigned in row-major order of each component's first
  // point, so a strict '>' keeps the earliest component on size ties.
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] >= 0 || !(field.values[seed] < threshold)) continue;
    const int id = next_label++;
    std::size_t size = 0;
    label[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++size;
      const int c = static_cast<int>(i % cols);
      const int r = static_cast<int>(i / cols);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (connectivity == Connectivity::Four && dr != 0 && dc != 0) continue;
          const int nc = c + dc;
          const int nr = r + dr;
          if (nc < 0 || nr < 0 || nc >= cols || nr >= rows) continue;
          const std::size_t j = static_cast<std::size_t>(nr) * cols + nc;
          if (label[j] >= 0 || !(field.values[j] < threshold)) continue;
          label[j] = id;
          stack.push_back(j);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_label = id;
    }
  }
  if (best_label < 0) return std::nullopt;

  ContactRegion region;
  region.threshold = threshold;
  region.points.reserve(best_size);
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != best_label) continue;
    const GridPoint g{static_cast<int>(i % cols), static_cast<int>(i / cols)};
    region.points.push_back(g);
    if (field.values[i] < best_value) {
      best_value = field.values[i];
      region.grid_center = g;
    }
  }
  region.center_density = best_value;
  region.center = field.pixel_of(region.grid_center.col, region.grid_center.row);

  if (field.stride > 1) {
    // Search the full-resolution pixels around the coarse minimum.
    const int s = field.stride;
    const int cx = region.grid_center.col * s;
    const int cy = region.grid_center.row * s;
    for (int y = std::max(0, cy - s + 1); y <= std::min(field.frame_height - 1, cy + s - 1); ++y) {
      for (int x = std::max(0, cx - s + 1); x <= std::min(field.frame_width - 1, cx + s - 1); ++x) {
        const double v = density_at(field.markers, field.kernel_width_h, x, y);
        if (v < region.center_density) {
          region.center_density = v;
          region.center = {static_cast<double>(x), static_cast<double>(y)};
        }
      }
    }
  }
  return region;
}

std::optional<ContactRegion> extract_contact(const DensityField& field, const KdeConfig& config) {
  validate(config);
  if (field.marker_count() == 0) return std::nullopt;
  return extract_contact_below(field, field_threshold(config, field.marker_count()),
                               config.connectivity);
}

ContactTrack track_displacement(ContactTrack track, const Point2& new_center, double timestamp,
                                const KdeConfig& config) {
  if (!track.centers.empty() && !(timestamp > track.centers.back().timestamp)) {
    throw NonMonotonicTime("timestamp " + std::to_string(timestamp) + " does not follow " +
                           std::to_string(track.centers.back().timestamp));
  }
  if (!track.centers.empty()) {
    const double d = config.pixel_scale_s * distance(new_center, track.centers.back().center);
    track.displacements.push_back({timestamp, d});
  }
  track.centers.push_back({timestamp, new_center});
  return track;
}

}  // namespace dexitac::tactile
