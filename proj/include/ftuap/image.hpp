#pragma once

#include <cstddef>
#include <vector>

namespace ftuap {

// Default 8-bit code value ceiling (M).
inline constexpr double kPixelMax = 255.0;

// Real-valued image samples in planar [channel][row][col] layout. Images fed
// to the block DCT must have height and width that are multiples of 8;
// perturbation deltas reuse the same shape but may hold negative values.
struct ImageTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> values;

  ImageTensor() = default;
  ImageTensor(int h, int w, int c)
      : height(h),
        width(w),
        channels(c),
        values(static_cast<size_t>(h) * w * c, 0.0) {}

  double& at(int c, int y, int x) {
    return values[(static_cast<size_t>(c) * height + y) * width + x];
  }
  double at(int c, int y, int x) const {
    return values[(static_cast<size_t>(c) * height + y) * width + x];
  }

  size_t size() const { return values.size(); }

  bool same_shape(const ImageTensor& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }

  // Structural checks: positive multiple-of-8 extents, 1 or 3 channels,
  // finite samples. Throws std::invalid_argument.
  void validate() const;

  // Additionally require samples in [0, max_value].
  void validate_range(double max_value) const;
};

ImageTensor clamp_image(ImageTensor img, double lo, double hi);

}  // namespace ftuap
