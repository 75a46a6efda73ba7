#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dexitac/geometry.hpp"

namespace dexitac::tactile {

inline constexpr int kFrameWidth = 640;
inline constexpr int kFrameHeight = 480;

// Camera image before preprocessing. Samples are interleaved per pixel
// (1 channel = gray, 3 channels = RGB) in the range [0, max_value].
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  double max_value = 255.0;
  std::vector<double> samples;

  double at(int x, int y, int c = 0) const {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

// Preprocessed grayscale sensor image: 640x480, intensities in [0, 1].
struct TactileFrame {
  int width = kFrameWidth;
  int height = kFrameHeight;
  double timestamp = 0.0;
  int finger_id = 1;
  std::vector<double> pixels;

  TactileFrame() = default;
  TactileFrame(int w, int h, double fill = 1.0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct PreprocessConfig {
  // Region of the raw image kept before rescaling; empty means the full frame.
  std::optional<PixelRect> crop;
  int out_width = kFrameWidth;
  int out_height = kFrameHeight;
};

// Grayscale (BT.601 luma for RGB), crop, area-averaging rescale to the
// output size, and normalization to [0, 1].
// Throws EmptyFrame for zero-pixel input and BadCrop if the crop leaves the raw bounds.
TactileFrame preprocess(const RawImage& raw, const PreprocessConfig& config = {},
                        double timestamp = 0.0, int finger_id = 1);

}  // namespace dexitac::tactile
