#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

namespace dexitac::kinematics {

struct ConvexHull {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;  // outward counter-clockwise, indexes `vertices`
  double volume = 0.0;
  bool degenerate = false;  // fewer than 4 affinely independent points
};

// Incremental 3-D convex hull. Degenerate inputs (a point, a segment, a
// planar set) give an empty face list and volume 0. `tolerance` is relative
// to the bounding-box diagonal.
ConvexHull convex_hull(std::span<const Eigen::Vector3d> points, double tolerance = 1e-10);

double convex_hull_volume(std::span<const Eigen::Vector3d> points);

}  // namespace dexitac::kinematics
