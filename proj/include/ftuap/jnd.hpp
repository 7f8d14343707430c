#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>

#include "ftuap/bands.hpp"

namespace ftuap {

// Width of one pixel in degrees of visual angle for a viewing distance of
// 60 cm at 31.5 pixels per cm. The commonly quoted 0.0303 is this value
// rounded for display; the threshold table needs the unrounded one.
inline constexpr double kDefaultPixelAngleDeg =
    180.0 / (std::numbers::pi * 31.5 * 60.0);

struct ViewingConditions {
  double l_min = 0.0;    // minimum display luminance, cd/m^2
  double l_max = 175.0;  // maximum display luminance, cd/m^2
  double pixel_angle_x = kDefaultPixelAngleDeg;  // w_x, degrees per pixel
  double pixel_angle_y = kDefaultPixelAngleDeg;  // w_y, degrees per pixel
  double bit_scale = 255.0;                      // M, max code value

  void validate() const;
};

// Constants of the luminance-adjusted contrast sensitivity model.
struct CsfModelParams {
  double r = 0.7;
  int n_dct = 8;
  double l_t = 13.45;     // cd/m^2
  double s_0 = 94.7;
  double alpha_t = 0.649;
  double f_0 = 6.78;      // cycles/degree
  double alpha_f = 0.182;
  double l_f = 300.0;     // cd/m^2
  double k_0 = 3.125;
  double alpha_k = 0.0706;
  double l_k = 300.0;     // cd/m^2

  void validate() const;
};

struct SpatialFrequency {
  double cycles_per_degree = 0.0;
  double orientation = 0.0;  // radians
};

// Frequency magnitude of band (k1, k2); defined for (0, 0) as well (f = 0).
double band_frequency(int k1, int k2, const ViewingConditions& vc,
                      const CsfModelParams& p);

// Frequency and orientation of band (k1, k2). The orientation is undefined
// at (0, 0); that call throws std::domain_error rather than returning 0.
SpatialFrequency spatial_frequency(int k1, int k2, const ViewingConditions& vc,
                                   const CsfModelParams& p);

// Luminance of the median code value of the display range.
double median_luminance(const ViewingConditions& vc);

// Background-luminance-adjusted contrast sensitivity T(k1, k2). T(0, 0) is
// estimated as min(T(0, 1), T(1, 0)). Rejects non-positive luminance.
double contrast_threshold(int k1, int k2, double luminance,
                          const ViewingConditions& vc,
                          const CsfModelParams& p);

// Per-frequency JND thresholds in code-value units, index 8*k1 + k2.
struct JndThresholdMatrix {
  std::array<double, kBlockCoeffs> thresholds{};
  double lambda = 0.0;
  std::array<bool, kBlockCoeffs> zeroed{};  // true where a mask removed the band

  double at(int k1, int k2) const { return thresholds[k1 * kBlockSize + k2]; }
  bool masked(int k1, int k2) const { return zeroed[k1 * kBlockSize + k2]; }
  bool any_masked() const;
};

// t_DCT(k1,k2) = M T(k1,k2) / (2 c~(k1) c~(k2) (L_max - L_min)), scaled by
// lambda. Indices outside the mask are set to exactly zero.
JndThresholdMatrix jnd_matrix(double lambda,
                              const ViewingConditions& vc = {},
                              const CsfModelParams& p = {},
                              const std::optional<BandMask>& mask = std::nullopt);

// 8x8 table renderers used by the CLI.
std::string jnd_table_text(const JndThresholdMatrix& m);
std::string jnd_table_csv(const JndThresholdMatrix& m);

}  // namespace ftuap
