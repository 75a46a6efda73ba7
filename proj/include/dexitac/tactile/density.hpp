#pragma once

#include <string>
#include <vector>

#include "dexitac/geometry.hpp"
#include "dexitac/tactile/frame.hpp"
#include "dexitac/tactile/markers.hpp"

namespace dexitac::tactile {

enum class Connectivity { Four = 4, Eight = 8 };

struct KdeConfig {
  double kernel_width_h = 15.0;  // px; mean spacing of adjacent markers
  int grid_stride = 1;           // px between evaluated grid points
  // Contact threshold as an areal marker density (markers per mm^2). It is
  // converted to field units per frame, see field_threshold().
  double density_threshold = 0.3;
  double pixel_scale_s = 0.05;  // mm per px
  Connectivity connectivity = Connectivity::Four;
  int frame_width = kFrameWidth;
  int frame_height = kFrameHeight;
};

void validate(const KdeConfig& config);

// Normalization constant of the per-marker kernel, 1 / (sqrt(2 pi) h^2).
double kernel_constant(double h);

// Field-unit (per px^2) threshold equivalent to config.density_threshold
// for a field built from `marker_count` markers.
//
// Each kernel integrates to sqrt(2 pi) over the plane, so M * d / sqrt(2 pi)
// is the local marker count per px^2; dividing by s^2 gives markers per mm^2.
double field_threshold(const KdeConfig& config, std::size_t marker_count);

// Kernel density sampled on the grid (col * stride, row * stride).
struct DensityField {
  int cols = 0;
  int rows = 0;
  int stride = 1;
  int frame_width = kFrameWidth;
  int frame_height = kFrameHeight;
  double kernel_width_h = 15.0;
  std::vector<double> values;    // row-major, rows x cols
  std::vector<Point2> markers;   // markers the field was built from

  std::size_t marker_count() const { return markers.size(); }
  double at(int col, int row) const { return values[static_cast<std::size_t>(row) * cols + col]; }
  Point2 pixel_of(int col, int row) const {
    return {static_cast<double>(col * stride), static_cast<double>(row * stride)};
  }
};

// Builds the field exactly as the per-point sum
//   d(x,y) = 1/M * sum_m exp(-|(x,y)-(x_m,y_m)|^2 / (2 h^2)) / (sqrt(2 pi) h^2).
// The Gaussian factorizes over x and y, so the grid is a single matrix
// product of per-axis kernel tables. Throws EmptyMarkerSet when M = 0.
DensityField estimate_density(const MarkerSet& markers, const KdeConfig& config = {});

// Same density at an arbitrary point, for refinement off the grid.
double density_at(const std::vector<Point2>& markers, double h, double x, double y);

// Linear map of the field's own [min, max] to 0..1; the range is returned
// so it can be written next to the exported image.
struct Heatmap {
  TactileFrame image;
  double min_value = 0.0;
  double max_value = 0.0;
};
Heatmap render_heatmap(const DensityField& field);
void write_heatmap_pgm(const std::string& path, const DensityField& field);

}  // namespace dexitac::tactile
