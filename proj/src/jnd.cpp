#include "ftuap/jnd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace ftuap {

namespace {

void check_band_index(int k1, int k2) {
  if (k1 < 0 || k1 >= kBlockSize || k2 < 0 || k2 >= kBlockSize) {
    throw std::invalid_argument("frequency index out of range: (" +
                                std::to_string(k1) + ", " +
                                std::to_string(k2) + ")");
  }
}

double dct_scale(int k) {
  return k == 0 ? std::sqrt(1.0 / kBlockSize) : std::sqrt(2.0 / kBlockSize);
}

}  // namespace

void ViewingConditions::validate() const {
  if (l_min < 0.0 || l_max <= l_min) {
    throw std::invalid_argument("need l_max > l_min >= 0");
  }
  if (pixel_angle_x <= 0.0 || pixel_angle_y <= 0.0) {
    throw std::invalid_argument("pixel angles must be positive");
  }
  if (bit_scale <= 0.0) {
    throw std::invalid_argument("bit scale must be positive");
  }
}

void CsfModelParams::validate() const {
  const double all[] = {r,       static_cast<double>(n_dct),
                        l_t,     s_0,
                        alpha_t, f_0,
                        alpha_f, l_f,
                        k_0,     alpha_k,
                        l_k};
  for (double v : all) {
    if (v <= 0.0) {
      throw std::invalid_argument("CSF model parameters must be positive");
    }
  }
  if (r > 1.0) {
    throw std::invalid_argument("orientation weight r must satisfy 0 < r <= 1");
  }
}

double band_frequency(int k1, int k2, const ViewingConditions& vc,
                      const CsfModelParams& p) {
  check_band_index(k1, k2);
  const double fx = k1 / vc.pixel_angle_x;
  const double fy = k2 / vc.pixel_angle_y;
  return std::sqrt(fx * fx + fy * fy) / (2.0 * p.n_dct);
}

SpatialFrequency spatial_frequency(int k1, int k2, const ViewingConditions& vc,
                                   const CsfModelParams& p) {
  check_band_index(k1, k2);
  if (k1 == 0 && k2 == 0) {
    throw std::domain_error("orientation is undefined at the DC band (0, 0)");
  }
  SpatialFrequency out;
  out.cycles_per_degree = band_frequency(k1, k2, vc, p);
  const double num = 2.0 * band_frequency(k1, 0, vc, p) *
                     band_frequency(0, k2, vc, p);
  const double den = out.cycles_per_degree * out.cycles_per_degree;
  out.orientation = std::asin(std::clamp(num / den, -1.0, 1.0));
  return out;
}

double median_luminance(const ViewingConditions& vc) {
  vc.validate();
  return vc.l_min + 128.0 * (vc.l_max - vc.l_min) / vc.bit_scale;
}

double contrast_threshold(int k1, int k2, double luminance,
                          const ViewingConditions& vc,
                          const CsfModelParams& p) {
  check_band_index(k1, k2);
  if (luminance <= 0.0) {
    throw std::invalid_argument("luminance must be positive");
  }
  if (k1 == 0 && k2 == 0) {
    // the parametric model holds only for f > 0; the DC threshold is
    // estimated as min(T(0,1), T(1,0))
    return std::min(contrast_threshold(0, 1, luminance, vc, p),
                    contrast_threshold(1, 0, luminance, vc, p));
  }

  const double t_min = luminance <= p.l_t
                           ? std::pow(luminance / p.l_t, p.alpha_t) * p.l_t / p.s_0
                           : luminance / p.s_0;
  const double f_min = luminance <= p.l_f
                           ? p.f_0 * std::pow(luminance / p.l_f, p.alpha_f)
                           : p.f_0;
  const double k = luminance <= p.l_k
                       ? p.k_0 * std::pow(luminance / p.l_k, p.alpha_k)
                       : p.k_0;

  const SpatialFrequency sf = spatial_frequency(k1, k2, vc, p);
  const double cos_theta = std::cos(sf.orientation);
  const double orientation_term = p.r + (1.0 - p.r) * cos_theta * cos_theta;
  const double log_f = std::log10(sf.cycles_per_degree) - std::log10(f_min);
  const double log_t = std::log10(t_min / orientation_term) + k * log_f * log_f;
  return std::pow(10.0, log_t);
}

bool JndThresholdMatrix::any_masked() const {
  return std::any_of(zeroed.begin(), zeroed.end(), [](bool z) { return z; });
}

JndThresholdMatrix jnd_matrix(double lambda, const ViewingConditions& vc,
                              const CsfModelParams& p,
                              const std::optional<BandMask>& mask) {
  if (lambda < 0.0) {
    throw std::invalid_argument("threshold coefficient lambda must be >= 0");
  }
  vc.validate();
  p.validate();

  const double luminance = median_luminance(vc);
  JndThresholdMatrix m;
  m.lambda = lambda;
  for (int k1 = 0; k1 < kBlockSize; ++k1) {
    for (int k2 = 0; k2 < kBlockSize; ++k2) {
      const int b = k1 * kBlockSize + k2;
      if (mask && !mask->contains(k1, k2)) {
        m.thresholds[b] = 0.0;
        m.zeroed[b] = true;
        continue;
      }
      const double t = contrast_threshold(k1, k2, luminance, vc, p);
      m.thresholds[b] = lambda * vc.bit_scale * t /
                        (2.0 * dct_scale(k1) * dct_scale(k2) *
                         (vc.l_max - vc.l_min));
    }
  }
  return m;
}

std::string jnd_table_text(const JndThresholdMatrix& m) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  for (int k1 = 0; k1 < kBlockSize; ++k1) {
    for (int k2 = 0; k2 < kBlockSize; ++k2) {
      out << std::setw(8) << m.at(k1, k2);
    }
    out << '\n';
  }
  return out.str();
}

std::string jnd_table_csv(const JndThresholdMatrix& m) {
  std::ostringstream out;
  out << "k1,k2,threshold\n";
  out << std::setprecision(17);
  for (int k1 = 0; k1 < kBlockSize; ++k1) {
    for (int k2 = 0; k2 < kBlockSize; ++k2) {
      out << k1 << ',' << k2 << ',' << m.at(k1, k2) << '\n';
    }
  }
  return out.str();
}

}  // namespace ftuap
