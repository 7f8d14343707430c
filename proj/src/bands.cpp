#include "ftuap/bands.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace ftuap {

int BandPartition::band_of(int k1, int k2) const {
  if (k1 < 0 || k1 >= kBlockSize || k2 < 0 || k2 >= kBlockSize) {
    throw std::invalid_argument("frequency index out of range");
  }
  return k1 + k2;
}

Region BandPartition::region_of_band(int band) const {
  if (band < 0 || band >= kNumBands) {
    throw std::invalid_argument("band index out of range");
  }
  if (band <= 3) return Region::kLow;
  if (band <= 10) return Region::kMiddle;
  return Region::kHigh;
}

Region BandPartition::region_of(int k1, int k2) const {
  return region_of_band(band_of(k1, k2));
}

int BandPartition::band_size(int band) const {
  if (band < 0 || band >= kNumBands) {
    throw std::invalid_argument("band index out of range");
  }
  // band i holds i+1 indices up to the antidiagonal, then 15-i
  return band <= 7 ? band + 1 : kNumBands - band;
}

int BandPartition::region_size(Region r) const {
  int total = 0;
  for (int band = 0; band < kNumBands; ++band) {
    if (region_of_band(band) == r) total += band_size(band);
  }
  return total;
}

BandPartition build_partition() { return BandPartition{}; }

int BandMask::count() const {
  return static_cast<int>(std::count(selected.begin(), selected.end(), true));
}

bool BandMask::contains(int k1, int k2) const {
  return selected[k1 * kBlockSize + k2];
}

BandMask BandMask::full() {
  BandMask m;
  m.selected.fill(true);
  m.name = "FF";
  return m;
}

BandMask mask_from_regions(const std::set<Region>& regions) {
  if (regions.empty()) {
    throw std::invalid_argument("band mask needs at least one region");
  }
  const BandPartition part = build_partition();
  BandMask m;
  for (int k1 = 0; k1 < kBlockSize; ++k1) {
    for (int k2 = 0; k2 < kBlockSize; ++k2) {
      if (regions.count(part.region_of(k1, k2))) {
        m.selected[k1 * kBlockSize + k2] = true;
      }
    }
  }
  std::string letters;
  if (regions.count(Region::kLow)) letters += 'L';
  if (regions.count(Region::kMiddle)) letters += 'M';
  if (regions.count(Region::kHigh)) letters += 'H';
  m.name = letters.size() == 3 ? "FF" : letters + "F";
  return m;
}

BandMask mask_from_bands(const std::vector<int>& band_indices) {
  if (band_indices.empty()) {
    throw std::invalid_argument("band mask needs at least one band");
  }
  const BandPartition part = build_partition();
  BandMask m;
  std::ostringstream name;
  name << "custom:";
  std::vector<int> sorted(band_indices);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    const int band = sorted[i];
    if (band < 0 || band >= BandPartition::kNumBands) {
      throw std::invalid_argument("slanting band index out of range: " +
                                  std::to_string(band));
    }
    name << (i ? "," : "") << band;
    for (int k1 = 0; k1 < kBlockSize; ++k1) {
      for (int k2 = 0; k2 < kBlockSize; ++k2) {
        if (part.band_of(k1, k2) == band) {
          m.selected[k1 * kBlockSize + k2] = true;
        }
      }
    }
  }
  m.name = name.str();
  return m;
}

BandMask parse_band_mask(const std::string& spec) {
  std::string s;
  for (char c : spec) s += static_cast<char>(std::tolower(c));

  if (s == "ff") return BandMask::full();
  if (s == "lf") return mask_from_regions({Region::kLow});
  if (s == "mf") return mask_from_regions({Region::kMiddle});
  if (s == "hf") return mask_from_regions({Region::kHigh});
  if (s == "lmf") return mask_from_regions({Region::kLow, Region::kMiddle});
  if (s == "lhf") return mask_from_regions({Region::kLow, Region::kHigh});
  if (s == "mhf") return mask_from_regions({Region::kMiddle, Region::kHigh});

  const std::string prefix = "custom:";
  if (s.rfind(prefix, 0) == 0) {
    std::vector<int> bands;
    std::stringstream list(s.substr(prefix.size()));
    std::string item;
    while (std::getline(list, item, ',')) {
      if (item.empty()) continue;
      bands.push_back(std::stoi(item));
    }
    return mask_from_bands(bands);
  }
  throw std::invalid_argument("unknown band mask spec: " + spec);
}

}  // namespace ftuap
