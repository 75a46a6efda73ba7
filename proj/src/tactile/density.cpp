#include "dexitac/tactile/density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dexitac/error.hpp"
#include "dexitac/tactile/pgm.hpp"

namespace dexitac::tactile {

void validate(const KdeConfig& c) {
  if (!(c.kernel_width_h > 0.0)) throw ConfigError("kernel_width_h must be > 0");
  if (c.grid_stride < 1) throw ConfigError("grid_stride must be >= 1");
  if (!(c.pixel_scale_s > 0.0)) throw ConfigError("pixel_scale_s must be > 0");
  if (!(c.density_threshold >= 0.0)) throw ConfigError("density_threshold must be >= 0");
  if (c.frame_width < 1 || c.frame_height < 1) throw ConfigError("frame size must be positive");
}

double kernel_constant(double h) { return 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h * h); }

double field_threshold(const KdeConfig& c, std::size_t marker_count) {
  if (marker_count == 0) throw EmptyMarkerSet("threshold needs at least one marker");
  return c.density_threshold * c.pixel_scale_s * c.pixel_scale_s *
         std::sqrt(2.0 * std::numbers::pi) / static_cast<double>(marker_count);
}

namespace {

// Per-axis kernel factor. Factors below e^-300 are set to zero so that the
// matrix product never runs on subnormals (which is an order of magnitude
// slower); such terms are more than 130 decades below the kernel peak.
double far_factor(double exponent) { return exponent > 300.0 ? 0.0 : std::exp(-exponent); }

}  // namespace

DensityField estimate_density(const MarkerSet& markers, const KdeConfig& config) {
  validate(config);
  if (markers.empty()) throw EmptyMarkerSet("density needs at least one marker");

  DensityField f;
  f.stride = config.grid_stride;
  f.frame_width = config.frame_width;
  f.frame_height = config.frame_height;
  f.kernel_width_h = config.kernel_width_h;
  f.cols = (config.frame_width - 1) / f.stride + 1;
  f.rows = (config.frame_height - 1) / f.stride + 1;
  f.markers = markers.centroids;

  const auto m = static_cast<Eigen::Index>(markers.size());
  const double inv_2h2 = 1.0 / (2.0 * config.kernel_width_h * config.kernel_width_h);
  // One kernel table row per grid line, one column per marker.
  Eigen::MatrixXd gx(f.cols, m);
  Eigen::MatrixXd gy(f.rows, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Point2& p = markers.centroids[static_cast<std::size_t>(k)];
    for (int c = 0; c < f.cols; ++c) {
      const double dx = c * f.stride - p.x;
      gx(c, k) = far_factor(dx * dx * inv_2h2);
    }
    for (int r = 0; r < f.rows; ++r) {
      const double dy = r * f.stride - p.y;
      gy(r, k) = far_factor(dy * dy * inv_2h2);
    }
  }

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const double scale = kernel_constant(config.kernel_width_h) / static_cast<double>(m);
  f.values.resize(static_cast<std::size_t>(f.rows) * f.cols);
  Eigen::Map<RowMajor> out(f.values.data(), f.rows, f.cols);
  out.noalias() = gy * gx.transpose();
  out *= scale;
  return f;
}

double density_at(const std::vector<Point2>& markers, double h, double x, double y) {
  if (markers.empty()) throw EmptyMarkerSet("density needs at least one marker");
  const double inv_2h2 = 1.0 / (2.0 * h * h);
  double acc = 0.0;
  for (const Point2& p : markers) {
    const double dx = x - p.x;
    const double dy = y - p.y;
    acc += std::exp(-dx * dx * inv_2h2) * std::exp(-dy * dy * inv_2h2);
  }
  return acc * kernel_constant(h) / static_cast<double>(markers.size());
}

Heatmap render_heatmap(const DensityField& field) {
  Heatmap hm;
  hm.image = TactileFrame(field.cols, field.rows, 0.0);
  if (field.values.empty()) return hm;
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  hm.min_value = *lo;
  hm.max_value = *hi;
  const double span = hm.max_value - hm.min_value;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    hm.image.pixels[i] = span > 0.0 ? (field.values[i] - hm.min_value) / span : 0.0;
  }
  return hm;
}

void write_heatmap_pgm(const std::string& path, const DensityField& field) {
  const Heatmap hm = render_heatmap(field);
  std::ostringstream range;
  range.precision(17);
  range << "density linear map 0-255 from per-frame min=" << hm.min_value << " max=" << hm.max_value
        << " (px^-2), stride=" << field.stride;
  write_pgm(path, hm.image, {range.str()});
}

}  // namespace dexitac::tactile
