#include "ftuap/blockdct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ftuap {

namespace {

double basis_scale(int k) {
  return k == 0 ? std::sqrt(1.0 / kBlockSize) : std::sqrt(2.0 / kBlockSize);
}

// c_i(n, k) = c~(k) cos(pi (2n + 1) k / 16)
double basis_value(int n, int k) {
  return basis_scale(k) *
         std::cos(std::numbers::pi * (2 * n + 1) * k / (2.0 * kBlockSize));
}

}  // namespace

DctCoefficientMatrix build_dct_matrix() {
  DctCoefficientMatrix m;
  for (int n1 = 0; n1 < kBlockSize; ++n1) {
    for (int n2 = 0; n2 < kBlockSize; ++n2) {
      const int s = n1 * kBlockSize + n2;
      for (int k1 = 0; k1 < kBlockSize; ++k1) {
        for (int k2 = 0; k2 < kBlockSize; ++k2) {
          const int b = k1 * kBlockSize + k2;
          m.entries[static_cast<size_t>(s) * kBlockCoeffs + b] =
              basis_value(n1, k1) * basis_value(n2, k2);
        }
      }
    }
  }
  return m;
}

const DctCoefficientMatrix& dct_matrix() {
  static const DctCoefficientMatrix m = build_dct_matrix();
  return m;
}

DctStack DctStack::zeros(int block_rows, int block_cols, int channels) {
  DctStack s;
  s.block_rows = block_rows;
  s.block_cols = block_cols;
  s.channels = channels;
  s.coeffs.assign(static_cast<size_t>(block_rows) * block_cols * channels *
                      kBlockCoeffs,
                  0.0);
  return s;
}

void DctStack::validate() const {
  if (block_rows <= 0 || block_cols <= 0) {
    throw std::invalid_argument("block grid must be positive, got " +
                                std::to_string(block_rows) + "x" +
                                std::to_string(block_cols));
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("channel count must be 1 or 3, got " +
                                std::to_string(channels));
  }
  if (coeffs.size() != static_cast<size_t>(num_blocks()) * channels * kBlockCoeffs) {
    throw std::invalid_argument(
        "coefficient count inconsistent with block grid");
  }
}

DctStack forward_dct(const ImageTensor& img) {
  img.validate();
  const DctCoefficientMatrix& C = dct_matrix();
  const int rows = img.height / kBlockSize;
  const int cols = img.width / kBlockSize;
  DctStack out = DctStack::zeros(rows, cols, img.channels);

  double xv[kBlockCoeffs];
  for (int c = 0; c < img.channels; ++c) {
    for (int br = 0; br < rows; ++br) {
      for (int bc = 0; bc < cols; ++bc) {
        for (int n1 = 0; n1 < kBlockSize; ++n1) {
          for (int n2 = 0; n2 < kBlockSize; ++n2) {
            xv[n1 * kBlockSize + n2] =
                img.at(c, br * kBlockSize + n1, bc * kBlockSize + n2);
          }
        }
        double* Xv = &out.at(c, br * cols + bc, 0);
        for (int s = 0; s < kBlockCoeffs; ++s) {
          const double x = xv[s];
          const double* crow = &C.entries[static_cast<size_t>(s) * kBlockCoeffs];
          for (int b = 0; b < kBlockCoeffs; ++b) {
            Xv[b] += x * crow[b];
          }
        }
      }
    }
  }
  return out;
}

ImageTensor inverse_dct(const DctStack& stack) {
  stack.validate();
  const DctCoefficientMatrix& C = dct_matrix();
  const int rows = stack.block_rows;
  const int cols = stack.block_cols;
  ImageTensor img(rows * kBlockSize, cols * kBlockSize, stack.channels);

  for (int c = 0; c < stack.channels; ++c) {
    for (int br = 0; br < rows; ++br) {
      for (int bc = 0; bc < cols; ++bc) {
        const double* Xv = &stack.at(c, br * cols + bc, 0);
        for (int s = 0; s < kBlockCoeffs; ++s) {
          const double* crow = &C.entries[static_cast<size_t>(s) * kBlockCoeffs];
          double acc = 0.0;
          for (int b = 0; b < kBlockCoeffs; ++b) {
            acc += crow[b] * Xv[b];
          }
          img.at(c, br * kBlockSize + s / kBlockSize,
                 bc * kBlockSize + s % kBlockSize) = acc;
        }
      }
    }
  }
  return img;
}

}  // namespace ftuap
