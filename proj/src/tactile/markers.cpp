#include "dexitac/tactile/markers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dexitac/error.hpp"

namespace dexitac::tactile {
namespace {

using Plane = std::vector<float>;

std::vector<float> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<float> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * i * i / (sigma * sigma));
    k[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);
  return k;
}

// Separable blur with edge replication.
Plane blur(const Plane& src, int w, int h, const std::vector<float>& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  Plane tmp(src.size());
  Plane out(src.size());
  std::vector<float> line(static_cast<std::size_t>(std::max(w, h) + 2 * r));

  for (int y = 0; y < h; ++y) {
    const float* row = src.data() + static_cast<std::size_t>(y) * w;
    for (int i = 0; i < w + 2 * r; ++i) line[i] = row[std::clamp(i - r, 0, w - 1)];
    float* dst = tmp.data() + static_cast<std::size_t>(y) * w;
    std::fill(dst, dst + w, 0.0f);
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      const float kv = kernel[k];
      const float* p = line.data() + k;
      for (int x = 0; x < w; ++x) dst[x] += kv * p[x];
    }
  }
  // Vertical pass accumulates whole rows so the inner loop stays contiguous.
  for (int y = 0; y < h; ++y) {
    float* dst = out.data() + static_cast<std::size_t>(y) * w;
    std::fill(dst, dst + w, 0.0f);
    for (int k = -r; k <= r; ++k) {
      const int sy = std::clamp(y + k, 0, h - 1);
      const float kv = kernel[k + r];
      const float* s = tmp.data() + static_cast<std::size_t>(sy) * w;
      for (int x = 0; x < w; ++x) dst[x] += kv * s[x];
    }
  }
  return out;
}

// sigma^4 * det(Hessian), zeroed where the Laplacian is not positive.
Plane dark_doh(const Plane& L, int w, int h, double sigma) {
  Plane resp(L.size(), 0.0f);
  const float norm = static_cast<float>(std::pow(sigma, 4));
  auto at = [&](int x, int y) {
    return L[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float c = at(x, y);
      const float lxx = at(x + 1, y) - 2.0f * c + at(x - 1, y);
      const float lyy = at(x, y + 1) - 2.0f * c + at(x, y - 1);
      if (lxx + lyy <= 0.0f) continue;
      const float lxy =
          0.25f * (at(x + 1, y + 1) - at(x + 1, y - 1) - at(x - 1, y + 1) + at(x - 1, y - 1));
      const float det = lxx * lyy - lxy * lxy;
      if (det > 0.0f) resp[static_cast<std::size_t>(y) * w + x] = norm * det;
    }
  }
  return resp;
}

double parabola_offset(double left, double centre, double right) {
  const double denom = left - 2.0 * centre + right;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

void validate(const DohConfig& c) {
  if (!(c.sigma_min > 0.0) || c.sigma_max < c.sigma_min) throw ConfigError("invalid DoH sigma range");
  if (c.num_scales < 1) throw ConfigError("DoH needs at least one scale");
  if (c.relative_threshold < 0.0 || c.absolute_threshold < 0.0) {
    throw ConfigError("DoH thresholds must be non-negative");
  }
  if (c.min_separation < 0.0) throw ConfigError("min_separation must be non-negative");
}

std::vector<double> doh_scales(const DohConfig& c) {
  validate(c);
  std::vector<double> s;
  if (c.num_scales == 1) return {c.sigma_min};
  const double ratio = std::pow(c.sigma_max / c.sigma_min, 1.0 / (c.num_scales - 1));
  for (int i = 0; i < c.num_scales; ++i) s.push_back(c.sigma_min * std::pow(ratio, i));
  return s;
}

MarkerSet detect_markers(const TactileFrame& frame, const DohConfig& config) {
  const auto scales = doh_scales(config);
  const int w = frame.width;
  const int h = frame.height;
  MarkerSet out;
  out.frame_timestamp = frame.timestamp;
  if (w < 3 || h < 3) return out;

  const Plane image(frame.pixels.begin(), frame.pixels.end());
  std::vector<Plane> responses;
  responses.reserve(scales.size());
  for (double sigma : scales) {
    responses.push_back(dark_doh(blur(image, w, h, gaussian_kernel(sigma)), w, h, sigma));
  }

  const std::size_t n = static_cast<std::size_t>(w) * h;
  Plane best(n, 0.0f);
  std::vector<unsigned char> best_scale(n, 0);
  for (std::size_t s = 0; s < responses.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      if (responses[s][i] > best[i]) {
        best[i] = responses[s][i];
        best_scale[i] = static_cast<unsigned char>(s);
      }
    }
  }

  const float peak = *std::max_element(best.begin(), best.end());
  const double threshold = std::max(config.relative_threshold * peak, config.absolute_threshold);
  if (peak <= 0.0f || peak < threshold) return out;

  // 3x3 local maxima; ties resolved towards the lowest row-major index.
  std::vector<std::size_t> candidates;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const float v = best[i];
      if (v < threshold) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
          if (best[j] > v || (best[j] == v && j < i)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) candidates.push_back(i);
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return best[a] > best[b]; });

  struct Accepted {
    std::size_t index;
    Point2 p;
  };
  std::vector<Accepted> accepted;
  const double sep = config.min_separation;
  // Buckets of side `sep`: a conflicting marker lies in the 3x3 neighbourhood.
  const double cell = sep > 0.0 ? sep : 1.0;
  const int gw = static_cast<int>(std::ceil(w / cell)) + 1;
  const int gh = static_cast<int>(std::ceil(h / cell)) + 1;
  std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(gw) * gh);
  for (std::size_t i : candidates) {
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    const Plane& r = responses[best_scale[i]];
    auto at = [&](int xx, int yy) {
      return static_cast<double>(r[static_cast<std::size_t>(std::clamp(yy, 0, h - 1)) * w +
                                   std::clamp(xx, 0, w - 1)]);
    };
    const double c = at(x, y);
    Point2 p{x + parabola_offset(at(x - 1, y), c, at(x + 1, y)),
             y + parabola_offset(at(x, y - 1), c, at(x, y + 1))};
    p.x = std::clamp(p.x, 0.0, w - 1.0);
    p.y = std::clamp(p.y, 0.0, h - 1.0);
    const int bx = static_cast<int>(p.x / cell);
    const int by = static_cast<int>(p.y / cell);
    bool clear = true;
    if (sep > 0.0) {
      for (int yy = std::max(0, by - 1); yy <= std::min(gh - 1, by + 1) && clear; ++yy) {
        for (int xx = std::max(0, bx - 1); xx <= std::min(gw - 1, bx + 1) && clear; ++xx) {
          for (std::size_t a : buckets[static_cast<std::size_t>(yy) * gw + xx]) {
            const Point2 d = accepted[a].p - p;
            if (d.x * d.x + d.y * d.y < sep * sep) {
              clear = false;
              break;
            }
          }
        }
      }
    }
    if (clear) {
      buckets[static_cast<std::size_t>(by) * gw + bx].push_back(accepted.size());
      accepted.push_back({i, p});
    }
  }

  std::sort(accepted.begin(), accepted.end(),
            [](const Accepted& a, const Accepted& b) { return a.index < b.index; });
  out.centroids.reserve(accepted.size());
  for (const auto& a : accepted) out.centroids.push_back(a.p);
  return out;
}

}  // namespace dexitac::tactile
