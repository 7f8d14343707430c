#pragma once

#include <string>

#include "ftuap/image.hpp"

namespace ftuap {

// Portable pixmap raster I/O. P2/P5 map to one channel, P3/P6 to three.
// Loading rejects images whose extents are not multiples of 8 and maxval
// outside 1..255. Saving rounds and clamps samples to [0, 255] and writes
// the binary variant unless plain is requested; an integer-valued tensor
// round-trips bit-identically.
ImageTensor load_image(const std::string& path);
void save_image(const ImageTensor& img, const std::string& path,
                bool binary = true);

}  // namespace ftuap
