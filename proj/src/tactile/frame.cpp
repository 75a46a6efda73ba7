#include "dexitac/tactile/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dexitac/error.hpp"

namespace dexitac::tactile {
namespace {

struct Tap {
  int index;
  double weight;
};

// Area-overlap weights mapping `src_len` source cells starting at
// `src_offset` onto `dst_len` destination cells. Each row sums to 1.
std::vector<std::vector<Tap>> area_taps(int src_offset, int src_len, int dst_len) {
  std::vector<std::vector<Tap>> taps(dst_len);
  const double scale = static_cast<double>(src_len) / dst_len;
  for (int d = 0; d < dst_len; ++d) {
    const double lo = d * scale;
    const double hi = (d + 1) * scale;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(src_len - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int s = first; s <= last; ++s) {
      const double overlap = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
      if (overlap > 0.0) taps[d].push_back({src_offset + s, overlap / scale});
    }
  }
  return taps;
}

}  // namespace

TactileFrame preprocess(const RawImage& raw, const PreprocessConfig& config, double timestamp,
                        int finger_id) {
  if (raw.width <= 0 || raw.height <= 0 || raw.samples.empty()) {
    throw EmptyFrame("raw frame has no pixels");
  }
  if (raw.channels != 1 && raw.channels != 3) {
    throw ImageFormatError("unsupported channel count " + std::to_string(raw.channels));
  }
  if (raw.samples.size() != static_cast<std::size_t>(raw.width) * raw.height * raw.channels) {
    throw ImageFormatError("sample buffer does not match image dimensions");
  }
  if (!(raw.max_value > 0.0)) throw ImageFormatError("max_value must be positive");
  if (config.out_width <= 0 || config.out_height <= 0) {
    throw ConfigError("output dimensions must be positive");
  }

  const PixelRect crop = config.crop.value_or(PixelRect{0, 0, raw.width, raw.height});
  if (crop.width <= 0 || crop.height <= 0 || crop.x < 0 || crop.y < 0 ||
      crop.x + crop.width > raw.width || crop.y + crop.height > raw.height) {
    throw BadCrop("crop rectangle exceeds raw bounds");
  }

  const double inv_max = 1.0 / raw.max_value;
  auto gray = [&](int x, int y) {
    if (raw.channels == 1) return raw.at(x, y) * inv_max;
    return (0.299 * raw.at(x, y, 0) + 0.587 * raw.at(x, y, 1) + 0.114 * raw.at(x, y, 2)) * inv_max;
  };

  const auto xtaps = area_taps(crop.x, crop.width, config.out_width);
  const auto ytaps = area_taps(crop.y, crop.height, config.out_height);

  // Horizontal pass over the cropped rows, then vertical.
  std::vector<double> rows(static_cast<std::size_t>(crop.height) * config.out_width);
  for (int y = 0; y < crop.height; ++y) {
    for (int ox = 0; ox < config.out_width; ++ox) {
      double acc = 0.0;
      for (const Tap& t : xtaps[ox]) acc += t.weight * gray(t.index, crop.y + y);
      rows[static_cast<std::size_t>(y) * config.out_width + ox] = acc;
    }
  }

  TactileFrame frame(config.out_width, config.out_height, 0.0);
  frame.timestamp = timestamp;
  frame.finger_id = finger_id;
  for (int oy = 0; oy < config.out_height; ++oy) {
    for (int ox = 0; ox < config.out_width; ++ox) {
      double acc = 0.0;
      for (const Tap& t : ytaps[oy]) {
        acc += t.weight * rows[static_cast<std::size_t>(t.index - crop.y) * config.out_width + ox];
      }
      frame.at(ox, oy) = std::clamp(acc, 0.0, 1.0);
    }
  }
  return frame;
}

}  // namespace dexitac::tactile
