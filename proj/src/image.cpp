#include "ftuap/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ftuap/blockdct.hpp"

namespace ftuap {

void ImageTensor::validate() const {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("image extents must be positive, got " +
                                std::to_string(height) + "x" +
                                std::to_string(width));
  }
  if (height % kBlockSize != 0 || width % kBlockSize != 0) {
    throw std::invalid_argument("image extents must be multiples of 8, got " +
                                std::to_string(height) + "x" +
                                std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("channel count must be 1 or 3, got " +
                                std::to_string(channels));
  }
  if (values.size() != static_cast<size_t>(height) * width * channels) {
    throw std::invalid_argument("image buffer size does not match its shape");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("image contains a non-finite sample");
    }
  }
}

void ImageTensor::validate_range(double max_value) const {
  validate();
  for (double v : values) {
    if (v < 0.0 || v > max_value) {
      throw std::invalid_argument("image sample " + std::to_string(v) +
                                  " outside [0, " + std::to_string(max_value) +
                                  "]");
    }
  }
}

ImageTensor clamp_image(ImageTensor img, double lo, double hi) {
  for (double& v : img.values) {
    v = std::clamp(v, lo, hi);
  }
  return img;
}

}  // namespace ftuap
