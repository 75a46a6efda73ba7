#pragma once

#include <optional>
#include <vector>

#include "dexitac/geometry.hpp"
#include "dexitac/tactile/density.hpp"

namespace dexitac::tactile {

struct GridPoint {
  int col = 0;
  int row = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

// Largest connected below-threshold component of a density field and the
// lowest-density point in it.
struct ContactRegion {
  std::vector<GridPoint> points;  // row-major order
  GridPoint grid_center;          // argmin over `points`
  Point2 center;                  // px; refined on the full-resolution grid when stride > 1
  double center_density = 0.0;
  double threshold = 0.0;         // field units used for this extraction

  std::size_t area() const { return points.size(); }
};

// nullopt means no grid point is below threshold (no contact).
// Ties on component size and on the minimum go to the lowest row-major index.
std::optional<ContactRegion> extract_contact(const DensityField& field, const KdeConfig& config = {});

// Same extraction against an explicit threshold in field units.
std::optional<ContactRegion> extract_contact_below(const DensityField& field, double threshold,
                                                   Connectivity connectivity = Connectivity::Four);

struct TrackSample {
  double timestamp = 0.0;
  Point2 center;
};

struct DisplacementSample {
  double timestamp = 0.0;  // time of the later of the two centers
  double mm = 0.0;
};

// Contact centers of one finger and the frame-to-frame displacement D(t).
struct ContactTrack {
  std::vector<TrackSample> centers;
  std::vector<DisplacementSample> displacements;

  bool empty() const { return centers.empty(); }
  const TrackSample& latest() const { return centers.back(); }
};

// Appends a center; for every center after the first also appends
// D = pixel_scale_s * |new - previous|. Throws NonMonotonicTime unless
// `timestamp` is strictly after the last recorded one.
ContactTrack track_displacement(ContactTrack track, const Point2& new_center, double timestamp,
                                const KdeConfig& config = {});

}  // namespace dexitac::tactile
