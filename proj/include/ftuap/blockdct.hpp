#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ftuap/image.hpp"

namespace ftuap {

inline constexpr int kBlockSize = 8;
inline constexpr int kBlockCoeffs = kBlockSize * kBlockSize;

// 64x64 orthonormal Type-II DCT basis. Entry (s, b) pairs the flattened
// spatial index s = 8*n1 + n2 with the flattened frequency index
// b = 8*k1 + k2; both flattenings are row-major.
struct DctCoefficientMatrix {
  std::array<double, kBlockCoeffs * kBlockCoeffs> entries{};

  double at(int s, int b) const {
    return entries[static_cast<size_t>(s) * kBlockCoeffs + b];
  }
};

DctCoefficientMatrix build_dct_matrix();

// Cached shared instance; the matrix is immutable once built.
const DctCoefficientMatrix& dct_matrix();

// Per-block frequency responses of an image: one 64-coefficient row per
// 8x8 block, blocks ordered row-major over the block grid, per channel.
struct DctStack {
  int block_rows = 0;
  int block_cols = 0;
  int channels = 0;
  std::vector<double> coeffs;  // [channel][block][64]

  static DctStack zeros(int block_rows, int block_cols, int channels);

  int num_blocks() const { return block_rows * block_cols; }

  double& at(int c, int block, int b) {
    return coeffs[(static_cast<size_t>(c) * num_blocks() + block) * kBlockCoeffs + b];
  }
  const double& at(int c, int block, int b) const {
    return coeffs[(static_cast<size_t>(c) * num_blocks() + block) * kBlockCoeffs + b];
  }

  bool same_shape(const DctStack& o) const {
    return block_rows == o.block_rows && block_cols == o.block_cols &&
           channels == o.channels;
  }

  void validate() const;
};

// X_v = C^T x_v per vectorized block. Rejects images whose extents are not
// multiples of 8.
DctStack forward_dct(const ImageTensor& img);

// x_v = C X_v per block. Output is not range-clamped; callers clamp.
ImageTensor inverse_dct(const DctStack& stack);

}  // namespace ftuap
