#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "ftuap/jnd.hpp"

using namespace ftuap;

namespace {

// Published threshold table for lambda = 2 under the default viewing
// conditions, given to two decimals.
constexpr double kGolden[8][8] = {
    {34.61, 24.48, 8.39, 7.81, 9.52, 12.78, 17.83, 25.20},
    {24.48, 12.47, 6.91, 6.32, 7.45, 9.76, 13.39, 18.71},
    {8.39, 6.91, 7.77, 8.22, 9.50, 11.95, 15.80, 21.44},
    {7.81, 6.32, 8.22, 10.27, 12.49, 15.53, 19.93, 26.20},
    {9.52, 7.45, 9.50, 12.49, 16.03, 20.27, 25.76, 33.16},
    {12.78, 9.76, 11.95, 15.53, 20.27, 26.09, 33.28, 42.44},
    {17.83, 13.39, 15.80, 19.93, 25.76, 33.28, 42.60, 54.19},
    {25.20, 18.71, 21.44, 26.20, 33.16, 42.44, 54.19, 68.78}};

}  // namespace

TEST_SUITE_BEGIN("jnd");

TEST_CASE("spatial frequency of (0,1)") {
  ViewingConditions vc;
  vc.pixel_angle_x = 0.0303;
  vc.pixel_angle_y = 0.0303;
  const SpatialFrequency sf = spatial_frequency(0, 1, vc, {});
  CHECK(sf.cycles_per_degree == doctest::Approx(2.0627).epsilon(1e-4));
  CHECK(sf.orientation == 0.0);
}

TEST_CASE("diagonal bands are oriented at pi/2") {
  // arcsin near 1 turns ulp-level rounding in its argument into ~1e-8
  // deviations, hence the tolerance
  for (int k = 1; k < 8; ++k) {
    const SpatialFrequency sf = spatial_frequency(k, k, {}, {});
    CHECK(std::abs(sf.orientation - std::numbers::pi / 2) < 1e-7);
  }
}

TEST_CASE("axis-aligned bands are oriented at 0") {
  CHECK(spatial_frequency(1, 0, {}, {}).orientation == 0.0);
  CHECK(spatial_frequency(0, 5, {}, {}).orientation == 0.0);
}

TEST_CASE("orientation at DC is signalled") {
  CHECK_THROWS_AS(spatial_frequency(0, 0, {}, {}), std::domain_error);
}

TEST_CASE("median luminance") {
  CHECK(median_luminance({}) == doctest::Approx(87.8431372549).epsilon(1e-10));

  ViewingConditions degenerate;
  degenerate.l_min = 100.0;
  degenerate.l_max = 100.0;
  CHECK_THROWS_AS(median_luminance(degenerate), std::invalid_argument);

  ViewingConditions unit;
  unit.l_min = 0.0;
  unit.l_max = 255.0;
  CHECK(median_luminance(unit) == doctest::Approx(128.0).epsilon(1e-12));
}

TEST_CASE("DC contrast threshold is the min of the first AC thresholds") {
  const double L = median_luminance({});
  const double t00 = contrast_threshold(0, 0, L, {}, {});
  const double t01 = contrast_threshold(0, 1, L, {}, {});
  const double t10 = contrast_threshold(1, 0, L, {}, {});
  CHECK(t00 == std::min(t01, t10));
}

TEST_CASE("contrast threshold rejects non-positive luminance") {
  CHECK_THROWS_AS(contrast_threshold(1, 1, 0.0, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(contrast_threshold(1, 1, -3.0, {}, {}), std::invalid_argument);
}

TEST_CASE("threshold matrix matches the published table") {
  const JndThresholdMatrix m = jnd_matrix(2.0);
  for (int k1 = 0; k1 < 8; ++k1) {
    for (int k2 = 0; k2 < 8; ++k2) {
      CHECK(std::abs(m.at(k1, k2) - kGolden[k1][k2]) <= 0.02);
    }
  }
  // spot anchors
  CHECK(std::abs(m.at(0, 0) - 34.61) <= 0.02);
  CHECK(std::abs(m.at(1, 3) - 6.32) <= 0.02);
  CHECK(std::abs(m.at(7, 7) - 68.78) <= 0.02);
}

TEST_CASE("lambda scaling") {
  const JndThresholdMatrix zero = jnd_matrix(0.0);
  for (double t : zero.thresholds) CHECK(t == 0.0);

  const JndThresholdMatrix one = jnd_matrix(1.0);
  const JndThresholdMatrix two = jnd_matrix(2.0);
  for (int b = 0; b < kBlockCoeffs; ++b) {
    CHECK(2.0 * one.thresholds[b] == two.thresholds[b]);
  }
}

TEST_CASE("lambda is monotone") {
  const JndThresholdMatrix lo = jnd_matrix(0.5);
  const JndThresholdMatrix hi = jnd_matrix(1.5);
  for (int b = 0; b < kBlockCoeffs; ++b) {
    CHECK(hi.thresholds[b] > lo.thresholds[b]);
  }
}

TEST_CASE("matrix is symmetric when pixel angles agree") {
  const JndThresholdMatrix m = jnd_matrix(2.0);
  for (int k1 = 0; k1 < 8; ++k1) {
    for (int k2 = 0; k2 < 8; ++k2) {
      CHECK(std::abs(m.at(k1, k2) - m.at(k2, k1)) < 1e-9);
    }
  }
}

TEST_CASE("masking zeroes exactly the complement") {
  const BandMask mask = parse_band_mask("mhf");
  const JndThresholdMatrix plain = jnd_matrix(2.0);
  const JndThresholdMatrix masked = jnd_matrix(2.0, {}, {}, mask);
  CHECK(masked.any_masked());
  for (int k1 = 0; k1 < 8; ++k1) {
    for (int k2 = 0; k2 < 8; ++k2) {
      if (mask.contains(k1, k2)) {
        CHECK(masked.at(k1, k2) == plain.at(k1, k2));  // bit-for-bit
        CHECK_FALSE(masked.masked(k1, k2));
      } else {
        CHECK(masked.at(k1, k2) == 0.0);
        CHECK(masked.masked(k1, k2));
      }
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(jnd_matrix(-1.0), std::invalid_argument);

  ViewingConditions bad;
  bad.pixel_angle_x = 0.0;
  CHECK_THROWS_AS(jnd_matrix(2.0, bad), std::invalid_argument);

  CsfModelParams badp;
  badp.r = 1.5;
  CHECK_THROWS_AS(jnd_matrix(2.0, {}, badp), std::invalid_argument);
}

TEST_CASE("table renderers cover all 64 entries") {
  const JndThresholdMatrix m = jnd_matrix(2.0);
  const std::string text = jnd_table_text(m);
  CHECK(std::count(text.begin(), text.end(), '\n') == 8);
  const std::string csv = jnd_table_csv(m);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);  // header + 64 rows
}

TEST_SUITE_END();
