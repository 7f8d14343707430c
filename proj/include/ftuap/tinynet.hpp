#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftuap/image.hpp"

namespace ftuap {

struct LabeledDataset {
  std::vector<ImageTensor> images;
  std::vector<int> labels;
  int num_classes = 0;
  std::string split;  // "train" or "validation"

  size_t size() const { return images.size(); }
  void validate() const;
};

// Architecture A is conv-relu-pool-conv-relu-pool-fc, architecture B is
// fc-relu-fc; both take raw [0, 255] samples and scale by 1/255 internally.
enum class Arch : uint8_t { kConvNet = 0, kMlp = 1 };

Arch parse_arch(const std::string& name);  // "a" / "b"
std::string arch_name(Arch arch);

struct LossSpec {
  enum class Kind { kCrossEntropy, kLogitDiff };
  Kind kind = Kind::kCrossEntropy;
  int class_a = 0;  // cross-entropy target, or the positive logit
  int class_b = 0;  // the subtracted logit (kLogitDiff only)

  static LossSpec cross_entropy(int target) {
    return {Kind::kCrossEntropy, target, 0};
  }
  static LossSpec logit_diff(int a, int b) { return {Kind::kLogitDiff, a, b}; }
};

struct Prediction {
  int label = 0;
  double confidence = 0.0;  // softmax probability at label
};

class Classifier {
 public:
  // Intermediate activations of one forward pass; feeds the backward passes.
  struct Trace {
    std::vector<double> input;    // scaled input
    std::vector<double> conv1;    // pre-relu (arch a)
    std::vector<double> pool1;    // post pool (arch a)
    std::vector<double> conv2;    // pre-relu (arch a)
    std::vector<double> pool2;    // post pool, fc input (arch a)
    std::vector<double> hidden;   // pre-relu (arch b)
    std::vector<double> logits;
  };

  static constexpr int kConv1Filters = 6;
  static constexpr int kConv2Filters = 12;
  static constexpr int kKernel = 3;
  static constexpr int kHidden = 256;

  Classifier() = default;
  Classifier(Arch arch, int in_h, int in_w, int in_c, int num_classes,
             uint64_t init_seed);

  Arch arch() const { return arch_; }
  int num_classes() const { return num_classes_; }
  int input_height() const { return in_h_; }
  int input_width() const { return in_w_; }
  int input_channels() const { return in_c_; }

  // Flat parameter vector (all tensors concatenated); exposed for the
  // optimizer and the checkpoint container.
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::vector<double> logits(const ImageTensor& img) const;
  Prediction predict(const ImageTensor& img) const;

  Trace forward(const ImageTensor& img) const;

  // Gradient of sum(logit_cotangent . logits) w.r.t. raw input pixels.
  ImageTensor input_gradient_from_trace(
      const Trace& trace, const std::vector<double>& logit_cotangent) const;

  ImageTensor input_gradient(const ImageTensor& img, const LossSpec& loss) const;

  // Gradient of mean cross-entropy w.r.t. params, accumulated into grad
  // (same length as params()); returns the sample loss.
  double accumulate_param_gradient(const ImageTensor& img, int label,
                                   std::vector<double>& grad) const;

  void check_input(const ImageTensor& img) const;

  // Parameter tensor layout, for serialization.
  struct TensorInfo {
    std::string name;
    std::vector<int> dims;
    size_t offset;
    size_t count;
  };
  const std::vector<TensorInfo>& tensor_layout() const { return layout_; }

 private:
  void build_layout();
  std::vector<double> softmax_of(const std::vector<double>& logits) const;

  Arch arch_ = Arch::kConvNet;
  int in_h_ = 0, in_w_ = 0, in_c_ = 0;
  int num_classes_ = 0;
  std::vector<double> params_;
  std::vector<TensorInfo> layout_;
};

struct TrainConfig {
  int epochs = 40;
  double learning_rate = 3e-3;  // Adam step size
  int batch_size = 32;
  uint64_t seed = 42;
};

Classifier train_classifier(Arch arch, const LabeledDataset& data,
                            const TrainConfig& config);

double top1_accuracy(const Classifier& c, const LabeledDataset& data);

// Fraction of images on which the two classifiers disagree.
double disagreement(const Classifier& a, const Classifier& b,
                    const LabeledDataset& data);

}  // namespace ftuap
