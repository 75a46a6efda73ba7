#include "dexitac/sensor/sensor_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "dexitac/error.hpp"

namespace dexitac::sensor {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Point2 grid_origin(const SensorModel& m) {
  return {(m.frame_width - 1 - (m.grid_cols - 1) * m.spacing) / 2.0 + 0.5,
          (m.frame_height - 1 - (m.grid_rows - 1) * m.spacing) / 2.0 + 0.5};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = splitmix64(root);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return splitmix64(s ^ c);
}

void validate(const SensorModel& m) {
  if (m.grid_rows < 1 || m.grid_cols < 1) throw ConfigError("sensor grid must be non-empty");
  if (!(m.marker_radius > 0.0)) throw ConfigError("marker_radius must be > 0");
  if (!(m.spacing > 2.0 * m.marker_radius)) throw ConfigError("spacing must exceed 2 * marker_radius");
  if (m.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (m.jitter < 0.0 || m.jitter >= m.spacing / 2.0) throw ConfigError("jitter out of range");
  if (m.displacement_gain < 0.0) throw ConfigError("displacement_gain must be >= 0");
  const Point2 o = grid_origin(m);
  const double x1 = o.x + (m.grid_cols - 1) * m.spacing;
  const double y1 = o.y + (m.grid_rows - 1) * m.spacing;
  if (o.x - m.jitter < 0.0 || o.y - m.jitter < 0.0 || x1 + m.jitter > m.frame_width - 1 ||
      y1 + m.jitter > m.frame_height - 1) {
    throw ConfigError("nominal marker grid does not fit inside the frame");
  }
}

void validate(const ContactStimulus& s) {
  if (!(s.depth >= 0.0)) throw ConfigError("stimulus depth must be >= 0");
  if (!(s.radius > 0.0)) throw ConfigError("stimulus radius must be > 0");
}

tactile::MarkerSet nominal_markers(const SensorModel& model) {
  validate(model);
  tactile::MarkerSet set;
  set.centroids.reserve(static_cast<std::size_t>(model.grid_rows) * model.grid_cols);
  std::mt19937_64 rng(derive_seed(model.seed, 0x6a6974746572ULL));  // "jitter"
  std::uniform_real_distribution<double> u(-model.jitter, model.jitter);
  const Point2 o = grid_origin(model);
  for (int r = 0; r < model.grid_rows; ++r) {
    for (int c = 0; c < model.grid_cols; ++c) {
      Point2 p{o.x + c * model.spacing, o.y + r * model.spacing};
      if (model.jitter > 0.0) {
        p.x += u(rng);
        p.y += u(rng);
      }
      set.centroids.push_back(p);
    }
  }
  return set;
}

tactile::MarkerSet displace_markers(const SensorModel& model, const ContactStimulus& stimulus) {
  validate(stimulus);
  tactile::MarkerSet set = nominal_markers(model);
  set.frame_timestamp = stimulus.timestamp;
  if (stimulus.depth == 0.0 && stimulus.shear == Point2{}) return set;

  const double amplitude = stimulus.depth * model.displacement_gain;
  const double inv_2r2 = 1.0 / (2.0 * stimulus.radius * stimulus.radius);
  for (Point2& p : set.centroids) {
    const Point2 v = p - stimulus.center;
    const double r = norm(v);
    const double envelope = std::exp(-r * r * inv_2r2);
    const Point2 dir = r > 0.0 ? v * (1.0 / r) : Point2{1.0, 0.0};
    p = p + dir * (amplitude * envelope) + stimulus.shear * envelope;
  }
  return set;
}

tactile::TactileFrame render_frame(const tactile::MarkerSet& markers, const SensorModel& model) {
  constexpr int kSub = 4;
  const int w = model.frame_width;
  const int h = model.frame_height;
  std::vector<double> coverage(static_cast<std::size_t>(w) * h, 0.0);
  const double r = model.marker_radius;
  const double r2 = r * r;

  for (const Point2& m : markers.centroids) {
    const int x0 = std::max(0, static_cast<int>(std::floor(m.x - r - 1)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(m.x + r + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(m.y - r - 1)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(m.y + r + 1)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        int inside = 0;
        for (int sy = 0; sy < kSub; ++sy) {
          const double dy = y + (sy + 0.5) / kSub - 0.5 - m.y;
          for (int sx = 0; sx < kSub; ++sx) {
            const double dx = x + (sx + 0.5) / kSub - 0.5 - m.x;
            inside += dx * dx + dy * dy <= r2;
          }
        }
        coverage[static_cast<std::size_t>(y) * w + x] += static_cast<double>(inside) / (kSub * kSub);
      }
    }
  }

  tactile::TactileFrame frame(w, h, model.background);
  frame.timestamp = markers.frame_timestamp;
  std::mt19937_64 rng(derive_seed(model.seed, 0x6e6f697365ULL));  // "noise"
  std::normal_distribution<double> noise(0.0, model.noise_sigma > 0.0 ? model.noise_sigma : 1.0);
  const double contrast = model.background - model.marker_intensity;
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    double v = model.background - contrast * std::min(1.0, coverage[i]);
    if (model.noise_sigma > 0.0) v += noise(rng);
    frame.pixels[i] = std::clamp(v, 0.0, 1.0);
  }
  return frame;
}

void write_ground_truth_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<long, tactile::MarkerSet>>& frames) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "seq,marker,x,y\n";
  out.precision(17);
  for (const auto& [seq, set] : frames) {
    for (std::size_t i = 0; i < set.centroids.size(); ++i) {
      out << seq << ',' << i << ',' << set.centroids[i].x << ',' << set.centroids[i].y << '\n';
    }
  }
}

}  // namespace dexitac::sensor
