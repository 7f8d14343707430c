#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "ftuap/blockdct.hpp"
#include "ftuap/rng.hpp"

using namespace ftuap;

namespace {

// Brute-force double-summation transform of one 8x8 block, independent of
// the matrix path under test.
void summation_dct_block(const double block[8][8], double out[8][8]) {
  auto scale = [](int k) {
    return k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
  };
  for (int k1 = 0; k1 < 8; ++k1) {
    for (int k2 = 0; k2 < 8; ++k2) {
      double acc = 0.0;
      for (int n1 = 0; n1 < 8; ++n1) {
        for (int n2 = 0; n2 < 8; ++n2) {
          acc += block[n1][n2] *
                 scale(k1) * std::cos(std::numbers::pi * (2 * n1 + 1) * k1 / 16.0) *
                 scale(k2) * std::cos(std::numbers::pi * (2 * n2 + 1) * k2 / 16.0);
        }
      }
      out[k1][k2] = acc;
    }
  }
}

ImageTensor random_image(int h, int w, int c, Rng& rng) {
  ImageTensor img(h, w, c);
  for (double& v : img.values) v = rng.uniform(0.0, 255.0);
  return img;
}

}  // namespace

TEST_SUITE_BEGIN("blockdct");

TEST_CASE("basis matrix entries") {
  const DctCoefficientMatrix C = build_dct_matrix();

  // s=0 (n1=n2=0), b=0 (k1=k2=0): sqrt(1/8)*sqrt(1/8)
  CHECK(C.at(0, 0) == doctest::Approx(0.125).epsilon(1e-14));
  // n1=0,k1=1,n2=0,k2=0 -> s=0, b=8
  CHECK(C.at(0, 8) == doctest::Approx(0.17337998066526844).epsilon(1e-12));
}

TEST_CASE("basis matrix is orthonormal") {
  const DctCoefficientMatrix C = build_dct_matrix();
  for (int i = 0; i < kBlockCoeffs; ++i) {
    for (int j = 0; j < kBlockCoeffs; ++j) {
      double dot = 0.0;
      for (int s = 0; s < kBlockCoeffs; ++s) {
        dot += C.at(s, i) * C.at(s, j);
      }
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("DC column is constant 1/8") {
  const DctCoefficientMatrix C = build_dct_matrix();
  for (int s = 0; s < kBlockCoeffs; ++s) {
    CHECK(C.at(s, 0) == doctest::Approx(0.125).epsilon(1e-14));
  }
}

TEST_CASE("constant block has only DC energy") {
  ImageTensor img(8, 8, 1);
  for (double& v : img.values) v = 1.0;
  const DctStack stack = forward_dct(img);
  CHECK(stack.at(0, 0, 0) == doctest::Approx(8.0).epsilon(1e-13));
  for (int b = 1; b < kBlockCoeffs; ++b) {
    CHECK(std::abs(stack.at(0, 0, b)) < 1e-12);
  }
}

TEST_CASE("zero block transforms to zero") {
  ImageTensor img(8, 8, 1);
  const DctStack stack = forward_dct(img);
  for (int b = 0; b < kBlockCoeffs; ++b) {
    CHECK(stack.at(0, 0, b) == 0.0);
  }
}

TEST_CASE("matrix path equals the summation oracle") {
  Rng rng(101);
  ImageTensor img = random_image(16, 16, 1, rng);
  const DctStack stack = forward_dct(img);

  for (int br = 0; br < 2; ++br) {
    for (int bc = 0; bc < 2; ++bc) {
      double block[8][8], expected[8][8];
      for (int n1 = 0; n1 < 8; ++n1)
        for (int n2 = 0; n2 < 8; ++n2)
          block[n1][n2] = img.at(0, br * 8 + n1, bc * 8 + n2);
      summation_dct_block(block, expected);
      for (int k1 = 0; k1 < 8; ++k1)
        for (int k2 = 0; k2 < 8; ++k2)
          CHECK(std::abs(stack.at(0, br * 2 + bc, k1 * 8 + k2) -
                         expected[k1][k2]) < 1e-10);
    }
  }
}

TEST_CASE("rejects extents that are not multiples of 8") {
  ImageTensor img(32, 32, 1);
  img.height = 30;
  img.width = 30;
  img.values.resize(900);
  CHECK_THROWS_AS(forward_dct(img), std::invalid_argument);
}

TEST_CASE("block ordering is row-major over the grid") {
  ImageTensor img(16, 24, 1);
  img.at(0, 0, 8) = 8.0;  // block (0,1) of a 2x3 grid
  const DctStack stack = forward_dct(img);
  CHECK(stack.block_rows == 2);
  CHECK(stack.block_cols == 3);
  double energy[6] = {};
  for (int block = 0; block < 6; ++block)
    for (int b = 0; b < kBlockCoeffs; ++b)
      energy[block] += stack.at(0, block, b) * stack.at(0, block, b);
  CHECK(energy[1] > 0.0);
  for (int block : {0, 2, 3, 4, 5}) CHECK(energy[block] == 0.0);
}

TEST_CASE("DC-only stack inverts to a constant block") {
  DctStack stack = DctStack::zeros(1, 1, 1);
  stack.at(0, 0, 0) = 8.0;
  const ImageTensor img = inverse_dct(stack);
  for (double v : img.values) {
    CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("zero stack inverts to a zero image") {
  const ImageTensor img = inverse_dct(DctStack::zeros(2, 2, 1));
  for (double v : img.values) CHECK(v == 0.0);
}

TEST_CASE("inverse rejects inconsistent block count") {
  DctStack stack = DctStack::zeros(2, 2, 1);
  stack.coeffs.resize(3 * kBlockCoeffs);
  CHECK_THROWS_AS(inverse_dct(stack), std::invalid_argument);
}

TEST_CASE("round trip reproduces the source") {
  Rng rng(202);
  for (int c : {1, 3}) {
    ImageTensor img = random_image(32, 40, c, rng);
    const ImageTensor back = inverse_dct(forward_dct(img));
    REQUIRE(back.same_shape(img));
    double max_err = 0.0;
    for (size_t i = 0; i < img.size(); ++i) {
      max_err = std::max(max_err, std::abs(back.values[i] - img.values[i]));
    }
    CHECK(max_err < 1e-10);
  }
}

TEST_CASE("transform is linear") {
  Rng rng(303);
  const ImageTensor x = random_image(16, 16, 1, rng);
  const ImageTensor y = random_image(16, 16, 1, rng);
  const double a = 1.7, b = -0.6;

  ImageTensor mix(16, 16, 1);
  for (size_t i = 0; i < mix.size(); ++i) {
    mix.values[i] = a * x.values[i] + b * y.values[i];
  }
  const DctStack lhs = forward_dct(mix);
  const DctStack fx = forward_dct(x);
  const DctStack fy = forward_dct(y);
  for (size_t i = 0; i < lhs.coeffs.size(); ++i) {
    CHECK(std::abs(lhs.coeffs[i] - (a * fx.coeffs[i] + b * fy.coeffs[i])) <
          1e-9);
  }
}

TEST_CASE("energy is preserved per block") {
  Rng rng(404);
  const ImageTensor img = random_image(24, 24, 1, rng);
  const DctStack stack = forward_dct(img);
  for (int br = 0; br < 3; ++br) {
    for (int bc = 0; bc < 3; ++bc) {
      double spatial = 0.0, freq = 0.0;
      for (int n1 = 0; n1 < 8; ++n1)
        for (int n2 = 0; n2 < 8; ++n2) {
          const double v = img.at(0, br * 8 + n1, bc * 8 + n2);
          spatial += v * v;
        }
      for (int b = 0; b < kBlockCoeffs; ++b) {
        const double v = stack.at(0, br * 3 + bc, b);
        freq += v * v;
      }
      CHECK(std::abs(spatial - freq) / spatial < 1e-8);
    }
  }
}

TEST_SUITE_END();
