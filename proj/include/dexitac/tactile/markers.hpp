#pragma once

#include <vector>

#include "dexitac/geometry.hpp"
#include "dexitac/tactile/frame.hpp"

namespace dexitac::tactile {

struct MarkerSet {
  std::vector<Point2> centroids;
  double frame_timestamp = 0.0;

  std::size_t size() const { return centroids.size(); }
  bool empty() const { return centroids.empty(); }
};

// Determinant-of-Hessian blob detector settings.
struct DohConfig {
  double sigma_min = 2.0;
  double sigma_max = 6.0;
  int num_scales = 4;  // geometric spacing between sigma_min and sigma_max
  // Keep peaks whose scale-normalized response is at least this fraction
  // of the strongest response in the frame...
  double relative_threshold = 0.1;
  // ...and at least this absolute value, so a blank frame yields nothing.
  // A full-contrast 4 px marker peaks near 0.1; pixel noise up to
  // sigma 0.02 stays below 1e-2.
  double absolute_threshold = 1e-2;
  double min_separation = 4.0;  // px
};

void validate(const DohConfig& config);

// Sigma values actually sampled for a config.
std::vector<double> doh_scales(const DohConfig& config);

// Centroids of dark, roughly circular blobs. Peaks are the scale-space
// maxima of sigma^4 * det(H) restricted to positive Laplacian (dark on
// light), suppressed greedily by response with `min_separation`, then
// refined to sub-pixel accuracy with a per-axis parabola fit.
// Output is sorted row-major by the integer peak position.
MarkerSet detect_markers(const TactileFrame& frame, const DohConfig& config = {});

}  // namespace dexitac::tactile
