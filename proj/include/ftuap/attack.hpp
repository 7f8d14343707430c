#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftuap/bands.hpp"
#include "ftuap/blockdct.hpp"
#include "ftuap/jnd.hpp"
#include "ftuap/tinynet.hpp"

namespace ftuap {

enum class AttackMethod : uint8_t { kUap = 0, kFtuap = 1 };

// The per-image update inside the universal loop. The sign step is an
// ablation knob; the default matches the accumulate-and-project pipeline.
enum class InnerStep : uint8_t { kDeepfool = 0, kGradientSign = 1 };

struct AttackConfig {
  AttackMethod method = AttackMethod::kFtuap;
  BandMask bands = BandMask::full();  // ftuap only
  double epsilon = 10.0;              // uap l_inf budget, code values
  double lambda = 2.0;                // ftuap threshold coefficient
  int epochs = 5;
  double overshoot = 0.02;
  int max_inner_iters = 50;
  InnerStep inner = InnerStep::kDeepfool;
  double sign_step = 1.0;  // gradient-sign step size, code values
  uint64_t seed = 0;
  ViewingConditions viewing;
  CsfModelParams csf;

  void validate() const;
  // Stable fingerprint of every field, recorded in the artifact.
  std::string fingerprint() const;
};

// A universal perturbation tagged with its native domain and budget.
struct Perturbation {
  enum class Domain : uint8_t { kSpatial = 0, kDct = 1 };

  Domain domain = Domain::kSpatial;
  ImageTensor spatial;             // domain == kSpatial
  DctStack dct;                    // domain == kDct
  double epsilon = 0.0;            // spatial budget
  JndThresholdMatrix thresholds;   // dct budget
  std::string provenance;

  static Perturbation zero_spatial(int h, int w, int c, double epsilon);
  static Perturbation zero_dct(int block_rows, int block_cols, int channels,
                               const JndThresholdMatrix& thresholds);
};

struct DeepfoolResult {
  ImageTensor delta;
  bool flipped = false;
  int iterations = 0;
};

// Iterated linearized closest-boundary step. Returns the accumulated step
// scaled by (1 + overshoot); if the label never flips within max_iters the
// result is flagged as non-flipping. Throws when every class shares the
// top class's gradient (nothing to move along).
DeepfoolResult deepfool_step(const Classifier& c, const ImageTensor& img,
                             double overshoot = 0.02, int max_iters = 50);

// Elementwise clamp to [-epsilon, +epsilon].
ImageTensor project_spatial(ImageTensor delta, double epsilon);

// Per block, per frequency clamp to [-t(k1,k2), +t(k1,k2)]; masked
// frequencies become exactly zero.
DctStack project_dct(DctStack stack, const JndThresholdMatrix& thresholds);

struct TrainedPerturbation {
  Perturbation perturbation;
  std::vector<double> epoch_fooling_rates;  // training-set FR after each epoch
};

// Accumulate-and-project universal training loop (per-image inner update,
// projection after every accumulation).
TrainedPerturbation train_universal(const Classifier& c,
                                    const LabeledDataset& data,
                                    const AttackConfig& cfg);

// x + delta (spatial) or x + idct(delta) (dct), clamped to [0, 255].
ImageTensor apply(const Perturbation& p, const ImageTensor& img);

// Baseline: every unmasked coefficient saturated to +-t(k1,k2) with a random
// sign per block, frequency and channel.
Perturbation random_sign_dct_perturbation(const JndThresholdMatrix& thresholds,
                                          int block_rows, int block_cols,
                                          int channels, uint64_t seed);

}  // namespace ftuap
