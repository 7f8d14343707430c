#include "ftuap/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ftuap/blockdct.hpp"

namespace ftuap {

namespace {

// Skips whitespace and '#' comments between header tokens.
int next_header_int(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value;
  if (!(in >> value)) {
    throw std::runtime_error("truncated pixmap header");
  }
  return value;
}

}  // namespace

ImageTensor load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open image file: " + path);
  }
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    throw std::runtime_error("unsupported raster format '" + magic + "' in " +
                             path + " (want PGM/PPM)");
  }
  const int channels = (magic == "P3" || magic == "P6") ? 3 : 1;
  const bool binary = magic == "P5" || magic == "P6";

  const int width = next_header_int(in);
  const int height = next_header_int(in);
  const int maxval = next_header_int(in);
  if (width <= 0 || height <= 0 || width % kBlockSize != 0 ||
      height % kBlockSize != 0) {
    throw std::runtime_error("image extents must be positive multiples of 8, " +
                             path + " is " + std::to_string(width) + "x" +
                             std::to_string(height));
  }
  if (maxval < 1 || maxval > 255) {
    throw std::runtime_error("unsupported maxval " + std::to_string(maxval) +
                             " in " + path);
  }

  ImageTensor img(height, width, channels);
  const size_t samples = static_cast<size_t>(height) * width * channels;
  if (binary) {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(samples);
    in.read(reinterpret_cast<char*>(raw.data()), samples);
    if (static_cast<size_t>(in.gcount()) != samples) {
      throw std::runtime_error("truncated pixel data in " + path);
    }
    // interleaved on disk, planar in memory
    size_t i = 0;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        for (int c = 0; c < channels; ++c)
          img.at(c, y, x) = static_cast<double>(raw[i++]);
  } else {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        for (int c = 0; c < channels; ++c) {
          int v;
          if (!(in >> v)) {
            throw std::runtime_error("truncated pixel data in " + path);
          }
          img.at(c, y, x) = static_cast<double>(v);
        }
  }
  for (double v : img.values) {
    if (v < 0.0 || v > maxval) {
      throw std::runtime_error("sample out of range in " + path);
    }
  }
  return img;
}

void save_image(const ImageTensor& img, const std::string& path, bool binary) {
  img.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write image file: " + path);
  }
  const bool color = img.channels == 3;
  out << (binary ? (color ? "P6" : "P5") : (color ? "P3" : "P2")) << '\n'
      << img.width << ' ' << img.height << '\n'
      << 255 << '\n';

  auto quantize = [](double v) {
    return static_cast<unsigned char>(std::clamp(std::round(v), 0.0, 255.0));
  };
  if (binary) {
    std::vector<unsigned char> raw;
    raw.reserve(img.size());
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        for (int c = 0; c < img.channels; ++c)
          raw.push_back(quantize(img.at(c, y, x)));
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
  } else {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        for (int c = 0; c < img.channels; ++c) {
          const bool row_end = x + 1 == img.width && c + 1 == img.channels;
          out << static_cast<int>(quantize(img.at(c, y, x)))
              << (row_end ? '\n' : ' ');
        }
      }
    }
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace ftuap
