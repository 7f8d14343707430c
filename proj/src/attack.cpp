#include "ftuap/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ftuap/rng.hpp"

namespace ftuap {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int argmax(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

void AttackConfig::validate() const {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (overshoot < 0.0) throw std::invalid_argument("overshoot must be >= 0");
  if (max_inner_iters < 1) {
    throw std::invalid_argument("max_inner_iters must be >= 1");
  }
  if (sign_step <= 0.0 && inner == InnerStep::kGradientSign) {
    throw std::invalid_argument("sign_step must be positive");
  }
  if (method == AttackMethod::kFtuap && bands.count() == 0) {
    throw std::invalid_argument("ftuap needs a non-empty band mask");
  }
  viewing.validate();
  csf.validate();
}

std::string AttackConfig::fingerprint() const {
  std::ostringstream s;
  s.precision(17);
  s << (method == AttackMethod::kUap ? "uap" : "ftuap") << '|' << bands.name
    << '|';
  for (bool b : bands.selected) s << (b ? '1' : '0');
  s << '|' << epsilon << '|' << lambda << '|' << epochs << '|' << overshoot
    << '|' << max_inner_iters << '|'
    << (inner == InnerStep::kDeepfool ? "deepfool" : "gradsign") << '|'
    << sign_step << '|' << seed << '|' << viewing.l_min << '|' << viewing.l_max
    << '|' << viewing.pixel_angle_x << '|' << viewing.pixel_angle_y << '|'
    << viewing.bit_scale;
  std::ostringstream hex;
  hex << std::hex << fnv1a(s.str());
  return hex.str();
}

Perturbation Perturbation::zero_spatial(int h, int w, int c, double epsilon) {
  Perturbation p;
  p.domain = Domain::kSpatial;
  p.spatial = ImageTensor(h, w, c);
  p.epsilon = epsilon;
  return p;
}

Perturbation Perturbation::zero_dct(int block_rows, int block_cols,
                                    int channels,
                                    const JndThresholdMatrix& thresholds) {
  Perturbation p;
  p.domain = Domain::kDct;
  p.dct = DctStack::zeros(block_rows, block_cols, channels);
  p.thresholds = thresholds;
  return p;
}

DeepfoolResult deepfool_step(const Classifier& c, const ImageTensor& img,
                             double overshoot, int max_iters) {
  c.check_input(img);
  const int classes = c.num_classes();
  if (classes < 2) {
    throw std::invalid_argument("deepfool needs at least two classes");
  }

  const int source = argmax(c.logits(img));
  ImageTensor accumulated(img.height, img.width, img.channels);
  DeepfoolResult result;
  result.delta = accumulated;

  ImageTensor current = img;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Classifier::Trace trace = c.forward(current);
    if (argmax(trace.logits) != source) {
      result.flipped = true;
      break;
    }
    ++result.iterations;

    // gradient of every logit difference f_l - f_source at the current point
    std::vector<ImageTensor> diff_grads(classes);
    for (int l = 0; l < classes; ++l) {
      if (l == source) continue;
      std::vector<double> cot(classes, 0.0);
      cot[l] = 1.0;
      cot[source] = -1.0;
      diff_grads[l] = c.input_gradient_from_trace(trace, cot);
    }

    int best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_norm_sq = 0.0;
    for (int l = 0; l < classes; ++l) {
      if (l == source) continue;
      double norm_sq = 0.0;
      for (double g : diff_grads[l].values) norm_sq += g * g;
      if (norm_sq < 1e-24) continue;  // boundary gradient vanished
      const double gap = std::abs(trace.logits[l] - trace.logits[source]);
      const double ratio = gap / std::sqrt(norm_sq);
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = l;
        best_norm_sq = norm_sq;
      }
    }
    if (best < 0) {
      throw std::runtime_error(
          "deepfool: all boundary gradients are degenerate");
    }

    const double gap =
        std::abs(trace.logits[best] - trace.logits[source]);
    const double scale = gap / best_norm_sq;
    for (size_t i = 0; i < accumulated.size(); ++i) {
      accumulated.values[i] += scale * diff_grads[best].values[i];
    }
    // keep the search point a valid image so relu layers cannot go
    // globally dead and kill every gradient
    for (size_t i = 0; i < current.size(); ++i) {
      current.values[i] =
          std::clamp(img.values[i] + (1.0 + overshoot) * accumulated.values[i],
                     0.0, kPixelMax);
    }
  }

  if (!result.flipped) {
    // hit the cap; re-check the final point
    result.flipped = argmax(c.logits(current)) != source;
  }
  for (size_t i = 0; i < accumulated.size(); ++i) {
    result.delta.values[i] = (1.0 + overshoot) * accumulated.values[i];
  }
  return result;
}

ImageTensor project_spatial(ImageTensor delta, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  for (double& v : delta.values) {
    v = std::clamp(v, -epsilon, epsilon);
  }
  return delta;
}

DctStack project_dct(DctStack stack, const JndThresholdMatrix& thresholds) {
  stack.validate();
  const int blocks = stack.num_blocks();
  for (int c = 0; c < stack.channels; ++c) {
    for (int block = 0; block < blocks; ++block) {
      double* row = &stack.at(c, block, 0);
      for (int b = 0; b < kBlockCoeffs; ++b) {
        const double t = thresholds.thresholds[b];
        row[b] = t == 0.0 ? 0.0 : std::clamp(row[b], -t, t);
      }
    }
  }
  return stack;
}

ImageTensor apply(const Perturbation& p, const ImageTensor& img) {
  ImageTensor out = img;
  if (p.domain == Perturbation::Domain::kSpatial) {
    if (!p.spatial.same_shape(img)) {
      throw std::invalid_argument("perturbation shape does not match image");
    }
    for (size_t i = 0; i < out.size(); ++i) {
      out.values[i] += p.spatial.values[i];
    }
  } else {
    if (p.dct.block_rows * kBlockSize != img.height ||
        p.dct.block_cols * kBlockSize != img.width ||
        p.dct.channels != img.channels) {
      throw std::invalid_argument("perturbation grid does not match image");
    }
    const ImageTensor spatialized = inverse_dct(p.dct);
    for (size_t i = 0; i < out.size(); ++i) {
      out.values[i] += spatialized.values[i];
    }
  }
  return clamp_image(std::move(out), 0.0, kPixelMax);
}

namespace {

// Training-set fooling rate of delta against cached clean labels.
double fooling_fraction(const Classifier& c, const LabeledDataset& data,
                        const Perturbation& p, const std::vector<int>& clean) {
  size_t flipped = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (c.predict(apply(p, data.images[i])).label != clean[i]) ++flipped;
  }
  return static_cast<double>(flipped) / static_cast<double>(data.size());
}

// Per-image update; an image whose boundary gradients degenerate at the
// current point contributes nothing this pass instead of aborting the run.
ImageTensor inner_update(const Classifier& c, const ImageTensor& perturbed,
                         int clean_label, const AttackConfig& cfg) {
  if (cfg.inner == InnerStep::kDeepfool) {
    try {
      return deepfool_step(c, perturbed, cfg.overshoot, cfg.max_inner_iters)
          .delta;
    } catch (const std::runtime_error&) {
      return ImageTensor(perturbed.height, perturbed.width, perturbed.channels);
    }
  }
  // ablation: one ascent step on the cross-entropy of the clean label
  ImageTensor grad =
      c.input_gradient(perturbed, LossSpec::cross_entropy(clean_label));
  for (double& v : grad.values) {
    v = v > 0.0 ? cfg.sign_step : (v < 0.0 ? -cfg.sign_step : 0.0);
  }
  return grad;
}

}  // namespace

TrainedPerturbation train_universal(const Classifier& c,
                                    const LabeledDataset& data,
                                    const AttackConfig& cfg) {
  cfg.validate();
  data.validate();
  c.check_input(data.images[0]);

  const ImageTensor& shape = data.images[0];
  const int block_rows = shape.height / kBlockSize;
  const int block_cols = shape.width / kBlockSize;

  TrainedPerturbation out;
  if (cfg.method == AttackMethod::kUap) {
    out.perturbation = Perturbation::zero_spatial(shape.height, shape.width,
                                                  shape.channels, cfg.epsilon);
  } else {
    const JndThresholdMatrix thresholds =
        jnd_matrix(cfg.lambda, cfg.viewing, cfg.csf, cfg.bands);
    out.perturbation = Perturbation::zero_dct(block_rows, block_cols,
                                              shape.channels, thresholds);
  }
  out.perturbation.provenance = cfg.fingerprint();
  Perturbation& p = out.perturbation;

  std::vector<int> clean(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    clean[i] = c.predict(data.images[i]).label;
  }

  Rng rng(cfg.seed);
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (int idx : order) {
      const ImageTensor& x = data.images[idx];
      const ImageTensor perturbed = apply(p, x);
      if (c.predict(perturbed).label != clean[idx]) {
        continue;  // already fooled
      }
      const ImageTensor step = inner_update(c, perturbed, clean[idx], cfg);
      for (double v : step.values) {
        if (!std::isfinite(v)) {
          throw std::runtime_error("non-finite update at epoch " +
                                   std::to_string(epoch) + ", image " +
                                   std::to_string(idx));
        }
      }
      if (cfg.method == AttackMethod::kUap) {
        for (size_t i = 0; i < p.spatial.size(); ++i) {
          p.spatial.values[i] += step.values[i];
        }
        p.spatial = project_spatial(std::move(p.spatial), cfg.epsilon);
      } else {
        const DctStack step_dct = forward_dct(step);
        for (size_t i = 0; i < p.dct.coeffs.size(); ++i) {
          p.dct.coeffs[i] += step_dct.coeffs[i];
        }
        p.dct = project_dct(std::move(p.dct), p.thresholds);
      }
    }
    out.epoch_fooling_rates.push_back(fooling_fraction(c, data, p, clean));
  }
  return out;
}

Perturbation random_sign_dct_perturbation(const JndThresholdMatrix& thresholds,
                                          int block_rows, int block_cols,
                                          int channels, uint64_t seed) {
  Perturbation p =
      Perturbation::zero_dct(block_rows, block_cols, channels, thresholds);
  Rng rng(seed);
  const int blocks = p.dct.num_blocks();
  for (int c = 0; c < channels; ++c) {
    for (int block = 0; block < blocks; ++block) {
      for (int b = 0; b < kBlockCoeffs; ++b) {
        const double t = thresholds.thresholds[b];
        p.dct.at(c, block, b) =
            t == 0.0 ? 0.0 : (rng.uniform() < 0.5 ? -t : t);
      }
    }
  }
  p.provenance = "random-sign";
  return p;
}

}  // namespace ftuap
