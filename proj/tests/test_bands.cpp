#include <doctest.h>

#include <stdexcept>

#include "ftuap/attack.hpp"
#include "ftuap/bands.hpp"
#include "ftuap/jnd.hpp"
#include "ftuap/rng.hpp"

using namespace ftuap;

TEST_SUITE_BEGIN("bands");

TEST_CASE("diagonal rule and regions") {
  const BandPartition part = build_partition();
  CHECK(part.band_of(0, 0) == 0);
  CHECK(part.region_of(0, 0) == Region::kLow);
  CHECK(part.band_of(7, 7) == 14);
  CHECK(part.region_of(7, 7) == Region::kHigh);
  CHECK(part.band_of(2, 5) == 7);
  CHECK(part.region_of(2, 5) == Region::kMiddle);
}

TEST_CASE("bands cover the 64 indices exactly once") {
  const BandPartition part = build_partition();
  int total = 0;
  for (int band = 0; band < BandPartition::kNumBands; ++band) {
    // band i holds i+1 indices for i<=7 and 15-i for i>=8
    CHECK(part.band_size(band) == (band <= 7 ? band + 1 : 15 - band));
    total += part.band_size(band);
  }
  CHECK(total == 64);

  int counted[15] = {};
  for (int k1 = 0; k1 < 8; ++k1)
    for (int k2 = 0; k2 < 8; ++k2) ++counted[part.band_of(k1, k2)];
  for (int band = 0; band < 15; ++band) {
    CHECK(counted[band] == part.band_size(band));
  }
}

TEST_CASE("region sizes are 10/44/10") {
  const BandPartition part = build_partition();
  CHECK(part.region_size(Region::kLow) == 10);
  CHECK(part.region_size(Region::kMiddle) == 44);
  CHECK(part.region_size(Region::kHigh) == 10);
}

TEST_CASE("masks from regions") {
  CHECK(mask_from_regions({Region::kLow, Region::kMiddle, Region::kHigh})
            .count() == 64);
  CHECK(mask_from_regions({Region::kLow, Region::kMiddle, Region::kHigh})
            .name == "FF");
  CHECK(mask_from_regions({Region::kMiddle}).count() == 44);
  CHECK(mask_from_regions({Region::kMiddle}).name == "MF");
  CHECK(mask_from_regions({Region::kMiddle, Region::kHigh}).count() == 54);
  CHECK(mask_from_regions({Region::kMiddle, Region::kHigh}).name == "MHF");
  CHECK_THROWS_AS(mask_from_regions({}), std::invalid_argument);
}

TEST_CASE("adding a region never removes indices") {
  const BandMask mf = mask_from_regions({Region::kMiddle});
  const BandMask mhf = mask_from_regions({Region::kMiddle, Region::kHigh});
  for (int b = 0; b < kBlockCoeffs; ++b) {
    if (mf.selected[b]) CHECK(mhf.selected[b]);
  }
}

TEST_CASE("mask parsing") {
  CHECK(parse_band_mask("ff").count() == 64);
  CHECK(parse_band_mask("LF").name == "LF");
  CHECK(parse_band_mask("lhf").count() == 20);
  const BandMask custom = parse_band_mask("custom:0,1,14");
  CHECK(custom.count() == 1 + 2 + 1);
  CHECK(custom.name == "custom:0,1,14");
  CHECK_THROWS_AS(parse_band_mask("xyz"), std::invalid_argument);
  CHECK_THROWS_AS(parse_band_mask("custom:15"), std::invalid_argument);
}

TEST_CASE("masked thresholds zero exactly the complementary coefficients") {
  const BandMask mask = parse_band_mask("lmf");
  const JndThresholdMatrix thr = jnd_matrix(2.0, {}, {}, mask);

  // coefficients small enough that unmasked entries survive the clamp
  Rng rng(55);
  DctStack stack = DctStack::zeros(2, 2, 1);
  for (double& v : stack.coeffs) v = rng.uniform(-6.0, 6.0);
  const DctStack original = stack;
  const DctStack projected = project_dct(stack, thr);

  for (int block = 0; block < 4; ++block) {
    for (int k1 = 0; k1 < 8; ++k1) {
      for (int k2 = 0; k2 < 8; ++k2) {
        const int b = k1 * 8 + k2;
        if (mask.contains(k1, k2)) {
          CHECK(projected.at(0, block, b) == original.at(0, block, b));
        } else {
          CHECK(projected.at(0, block, b) == 0.0);
        }
      }
    }
  }
}

TEST_SUITE_END();
