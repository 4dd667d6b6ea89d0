#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xferlab/tensor.hpp"

namespace xferlab::data {

enum class Split : uint8_t { Train, Test };

/// Synthetic image-classification dataset. Images live in [0,1] as a
/// [n, c, h, w] tensor; fully reproducible from the generator arguments.
struct Dataset {
  Tensor images;
  std::vector<uint16_t> labels;
  size_t classes = 0;
  Split split = Split::Train;
  uint64_t seed = 0;

  size_t size() const { return labels.size(); }
  std::array<size_t, 3> example_shape() const {
    return {images.shape[1], images.shape[2], images.shape[3]};
  }
  Tensor example(size_t i) const;
};

/// Class-conditional structured images: a per-class template pattern,
/// circular random shifts, and seeded pixel noise, clipped to [0,1].
/// Labels are interleaved (i mod classes), so counts are exactly balanced.
Dataset gen_dataset(uint64_t seed, size_t n, size_t classes,
                    std::array<size_t, 3> shape, Split split = Split::Train);

/// Snap every pixel to the 8-bit grid: round(255*v)/255, rounding half
/// away from zero. Input must lie in [0,1].
Tensor quantize_8bit(const Tensor& x);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace xferlab::data
