#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "ftuap/blockdct.hpp"

namespace ftuap {

enum class Region { kLow, kMiddle, kHigh };

// The 15 slanting diagonal bands of the 8x8 frequency grid: band index of
// (k1, k2) is k1 + k2. Bands 0-3 form the low region, 4-10 the middle,
// 11-14 the high region.
struct BandPartition {
  static constexpr int kNumBands = 15;

  int band_of(int k1, int k2) const;
  Region region_of_band(int band) const;
  Region region_of(int k1, int k2) const;

  // Number of (k1, k2) indices in one slanting band.
  int band_size(int band) const;
  // Number of frequency indices covered by a region (10 / 44 / 10).
  int region_size(Region r) const;
};

BandPartition build_partition();

// Set of active frequency indices. Thresholds outside the mask are zeroed,
// which in turn pins the corresponding perturbation coefficients to zero.
struct BandMask {
  std::array<bool, kBlockCoeffs> selected{};
  std::string name;

  int count() const;
  bool contains(int k1, int k2) const;

  static BandMask full();  // FF
};

BandMask mask_from_regions(const std::set<Region>& regions);

// Custom mask from explicit slanting-band indices (0-14).
BandMask mask_from_bands(const std::vector<int>& band_indices);

// Parses lf|mf|hf|lmf|lhf|mhf|ff|custom:<i,j,...> (case-insensitive).
BandMask parse_band_mask(const std::string& spec);

}  // namespace ftuap
