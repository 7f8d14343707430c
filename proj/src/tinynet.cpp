#include "ftuap/tinynet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ftuap/blockdct.hpp"
#include "ftuap/rng.hpp"

namespace ftuap {

namespace {

constexpr double kInputScale = 1.0 / 255.0;

// out[f][y][x] = bias[f] + sum_{c,ky,kx} w[f][c][ky][kx] in[c][y+ky-1][x+kx-1]
// with zero padding of 1.
void conv3x3(const double* in, int c_in, int h, int w, const double* weights,
             const double* bias, int c_out, double* out) {
  const size_t plane = static_cast<size_t>(h) * w;
  for (int f = 0; f < c_out; ++f) {
    double* dst = out + f * plane;
    std::fill(dst, dst + plane, bias[f]);
    for (int c = 0; c < c_in; ++c) {
      const double* src = in + c * plane;
      const double* wf = weights + ((f * c_in + c) * 3) * 3;
      for (int ky = 0; ky < 3; ++ky) {
        const int y0 = std::max(0, 1 - ky);
        const int y1 = std::min(h, h + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = wf[ky * 3 + kx];
          const int x0 = std::max(0, 1 - kx);
          const int x1 = std::min(w, w + 1 - kx);
          for (int y = y0; y < y1; ++y) {
            const double* srow = src + (y + ky - 1) * w + (x0 + kx - 1);
            double* drow = dst + y * w + x0;
            for (int x = 0; x < x1 - x0; ++x) {
              drow[x] += wv * srow[x];
            }
          }
        }
      }
    }
  }
}

// d_in[c] += sum_f w[f][c] (*) d_out[f], the transpose of conv3x3.
void conv3x3_backward_input(const double* d_out, int c_in, int h, int w,
                            const double* weights, int c_out, double* d_in) {
  const size_t plane = static_cast<size_t>(h) * w;
  for (int f = 0; f < c_out; ++f) {
    const double* dsrc = d_out + f * plane;
    for (int c = 0; c < c_in; ++c) {
      double* ddst = d_in + c * plane;
      const double* wf = weights + ((f * c_in + c) * 3) * 3;
      for (int ky = 0; ky < 3; ++ky) {
        const int y0 = std::max(0, 1 - ky);
        const int y1 = std::min(h, h + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = wf[ky * 3 + kx];
          const int x0 = std::max(0, 1 - kx);
          const int x1 = std::min(w, w + 1 - kx);
          for (int y = y0; y < y1; ++y) {
            double* drow = ddst + (y + ky - 1) * w + (x0 + kx - 1);
            const double* srow = dsrc + y * w + x0;
            for (int x = 0; x < x1 - x0; ++x) {
              drow[x] += wv * srow[x];
            }
          }
        }
      }
    }
  }
}

void conv3x3_backward_weights(const double* in, const double* d_out, int c_in,
                              int h, int w, int c_out, double* d_weights,
                              double* d_bias) {
  const size_t plane = static_cast<size_t>(h) * w;
  for (int f = 0; f < c_out; ++f) {
    const double* dsrc = d_out + f * plane;
    d_bias[f] += std::accumulate(dsrc, dsrc + plane, 0.0);
    for (int c = 0; c < c_in; ++c) {
      const double* src = in + c * plane;
      double* wf = d_weights + ((f * c_in + c) * 3) * 3;
      for (int ky = 0; ky < 3; ++ky) {
        const int y0 = std::max(0, 1 - ky);
        const int y1 = std::min(h, h + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const int x0 = std::max(0, 1 - kx);
          const int x1 = std::min(w, w + 1 - kx);
          double acc = 0.0;
          for (int y = y0; y < y1; ++y) {
            const double* srow = src + (y + ky - 1) * w + (x0 + kx - 1);
            const double* drow = dsrc + y * w + x0;
            for (int x = 0; x < x1 - x0; ++x) {
              acc += srow[x] * drow[x];
            }
          }
          wf[ky * 3 + kx] += acc;
        }
      }
    }
  }
}

void relu_forward(std::vector<double>& v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

// gradient flows only through positive pre-activations
void relu_backward(const std::vector<double>& pre, std::vector<double>& grad) {
  for (size_t i = 0; i < grad.size(); ++i) {
    if (pre[i] <= 0.0) grad[i] = 0.0;
  }
}

void maxpool2(const double* in, int channels, int h, int w, double* out) {
  const int oh = h / 2, ow = w / 2;
  for (int c = 0; c < channels; ++c) {
    const double* src = in + static_cast<size_t>(c) * h * w;
    double* dst = out + static_cast<size_t>(c) * oh * ow;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const double* p = src + (2 * y) * w + 2 * x;
        dst[y * ow + x] = std::max(std::max(p[0], p[1]), std::max(p[w], p[w + 1]));
      }
    }
  }
}

// routes each output gradient to the first maximal entry of its window,
// matching the forward tie order
void maxpool2_backward(const double* in, const double* d_out, int channels,
                       int h, int w, double* d_in) {
  const int oh = h / 2, ow = w / 2;
  for (int c = 0; c < channels; ++c) {
    const double* src = in + static_cast<size_t>(c) * h * w;
    const double* gsrc = d_out + static_cast<size_t>(c) * oh * ow;
    double* dst = d_in + static_cast<size_t>(c) * h * w;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const size_t base = static_cast<size_t>(2 * y) * w + 2 * x;
        const size_t offs[4] = {base, base + 1, base + w, base + w + 1};
        size_t best = offs[0];
        for (int i = 1; i < 4; ++i) {
          if (src[offs[i]] > src[best]) best = offs[i];
        }
        dst[best] += gsrc[y * ow + x];
      }
    }
  }
}

void dense(const double* in, int n_in, const double* weights,
           const double* bias, int n_out, double* out) {
  for (int k = 0; k < n_out; ++k) {
    const double* wk = weights + static_cast<size_t>(k) * n_in;
    double acc = bias[k];
    for (int i = 0; i < n_in; ++i) acc += wk[i] * in[i];
    out[k] = acc;
  }
}

void dense_backward_input(const double* d_out, int n_in, const double* weights,
                          int n_out, double* d_in) {
  for (int k = 0; k < n_out; ++k) {
    const double g = d_out[k];
    if (g == 0.0) continue;
    const double* wk = weights + static_cast<size_t>(k) * n_in;
    for (int i = 0; i < n_in; ++i) d_in[i] += g * wk[i];
  }
}

void dense_backward_weights(const double* in, const double* d_out, int n_in,
                            int n_out, double* d_weights, double* d_bias) {
  for (int k = 0; k < n_out; ++k) {
    const double g = d_out[k];
    d_bias[k] += g;
    if (g == 0.0) continue;
    double* wk = d_weights + static_cast<size_t>(k) * n_in;
    for (int i = 0; i < n_in; ++i) wk[i] += g * in[i];
  }
}

}  // namespace

void LabeledDataset::validate() const {
  if (images.empty()) {
    throw std::invalid_argument("dataset is empty");
  }
  if (images.size() != labels.size()) {
    throw std::invalid_argument("image/label count mismatch");
  }
  if (num_classes <= 0) {
    throw std::invalid_argument("dataset needs a positive class count");
  }
  for (size_t i = 0; i < images.size(); ++i) {
    if (!images[i].same_shape(images[0])) {
      throw std::invalid_argument("dataset images must share one shape");
    }
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw std::invalid_argument("label out of range at index " +
                                  std::to_string(i));
    }
  }
  images[0].validate();
}

Arch parse_arch(const std::string& name) {
  if (name == "a" || name == "A") return Arch::kConvNet;
  if (name == "b" || name == "B") return Arch::kMlp;
  throw std::invalid_argument("unknown architecture: " + name);
}

std::string arch_name(Arch arch) {
  return arch == Arch::kConvNet ? "a" : "b";
}

Classifier::Classifier(Arch arch, int in_h, int in_w, int in_c,
                       int num_classes, uint64_t init_seed)
    : arch_(arch), in_h_(in_h), in_w_(in_w), in_c_(in_c),
      num_classes_(num_classes) {
  if (in_h <= 0 || in_w <= 0 || in_h % kBlockSize != 0 ||
      in_w % kBlockSize != 0) {
    throw std::invalid_argument("input extents must be positive multiples of 8");
  }
  if (in_c != 1 && in_c != 3) {
    throw std::invalid_argument("input channels must be 1 or 3");
  }
  if (num_classes < 1) {
    throw std::invalid_argument("need at least one class");
  }
  build_layout();

  Rng rng(init_seed);
  params_.assign(layout_.back().offset + layout_.back().count, 0.0);
  for (const TensorInfo& t : layout_) {
    if (t.name.rfind("b", 0) == 0) continue;  // biases start at zero
    // He initialization: fan-in is the product of all dims but the first
    size_t fan_in = 1;
    for (size_t d = 1; d < t.dims.size(); ++d) fan_in *= t.dims[d];
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (size_t i = 0; i < t.count; ++i) {
      params_[t.offset + i] = scale * rng.normal();
    }
  }
}

void Classifier::build_layout() {
  layout_.clear();
  size_t offset = 0;
  auto add = [&](const std::string& name, std::vector<int> dims) {
    size_t count = 1;
    for (int d : dims) count *= d;
    layout_.push_back({name, std::move(dims), offset, count});
    offset += count;
  };
  if (arch_ == Arch::kConvNet) {
    const int ph = in_h_ / 4, pw = in_w_ / 4;
    add("w1", {kConv1Filters, in_c_, kKernel, kKernel});
    add("b1", {kConv1Filters});
    add("w2", {kConv2Filters, kConv1Filters, kKernel, kKernel});
    add("b2", {kConv2Filters});
    add("wf", {num_classes_, kConv2Filters * ph * pw});
    add("bf", {num_classes_});
  } else {
    add("w1", {kHidden, in_h_ * in_w_ * in_c_});
    add("b1", {kHidden});
    add("w2", {num_classes_, kHidden});
    add("b2", {num_classes_});
  }
}

void Classifier::check_input(const ImageTensor& img) const {
  if (img.height != in_h_ || img.width != in_w_ || img.channels != in_c_) {
    throw std::invalid_argument(
        "input shape " + std::to_string(img.height) + "x" +
        std::to_string(img.width) + "x" + std::to_string(img.channels) +
        " does not match classifier input " + std::to_string(in_h_) + "x" +
        std::to_string(in_w_) + "x" + std::to_string(in_c_));
  }
}

Classifier::Trace Classifier::forward(const ImageTensor& img) const {
  check_input(img);
  Trace t;
  t.input.resize(img.size());
  for (size_t i = 0; i < img.size(); ++i) {
    t.input[i] = img.values[i] * kInputScale;
  }

  const double* p = params_.data();
  if (arch_ == Arch::kConvNet) {
    const TensorInfo& w1 = layout_[0];
    const TensorInfo& b1 = layout_[1];
    const TensorInfo& w2 = layout_[2];
    const TensorInfo& b2 = layout_[3];
    const TensorInfo& wf = layout_[4];
    const TensorInfo& bf = layout_[5];

    t.conv1.assign(static_cast<size_t>(kConv1Filters) * in_h_ * in_w_, 0.0);
    conv3x3(t.input.data(), in_c_, in_h_, in_w_, p + w1.offset, p + b1.offset,
            kConv1Filters, t.conv1.data());

    std::vector<double> r1 = t.conv1;
    relu_forward(r1);
    const int h2 = in_h_ / 2, w2d = in_w_ / 2;
    t.pool1.assign(static_cast<size_t>(kConv1Filters) * h2 * w2d, 0.0);
    maxpool2(r1.data(), kConv1Filters, in_h_, in_w_, t.pool1.data());

    t.conv2.assign(static_cast<size_t>(kConv2Filters) * h2 * w2d, 0.0);
    conv3x3(t.pool1.data(), kConv1Filters, h2, w2d, p + w2.offset,
            p + b2.offset, kConv2Filters, t.conv2.data());

    std::vector<double> r2 = t.conv2;
    relu_forward(r2);
    const int h4 = h2 / 2, w4 = w2d / 2;
    t.pool2.assign(static_cast<size_t>(kConv2Filters) * h4 * w4, 0.0);
    maxpool2(r2.data(), kConv2Filters, h2, w2d, t.pool2.data());

    t.logits.assign(num_classes_, 0.0);
    dense(t.pool2.data(), static_cast<int>(t.pool2.size()), p + wf.offset,
          p + bf.offset, num_classes_, t.logits.data());
  } else {
    const TensorInfo& w1 = layout_[0];
    const TensorInfo& b1 = layout_[1];
    const TensorInfo& w2 = layout_[2];
    const TensorInfo& b2 = layout_[3];

    t.hidden.assign(kHidden, 0.0);
    dense(t.input.data(), static_cast<int>(t.input.size()), p + w1.offset,
          p + b1.offset, kHidden, t.hidden.data());

    std::vector<double> h = t.hidden;
    relu_forward(h);
    t.logits.assign(num_classes_, 0.0);
    dense(h.data(), kHidden, p + w2.offset, p + b2.offset, num_classes_,
          t.logits.data());
  }

  for (double v : t.logits) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("classifier produced non-finite logits");
    }
  }
  return t;
}

std::vector<double> Classifier::logits(const ImageTensor& img) const {
  return forward(img).logits;
}

std::vector<double> Classifier::softmax_of(const std::vector<double>& logits) const {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> e(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    e[i] = std::exp(logits[i] - m);
    sum += e[i];
  }
  for (double& v : e) v /= sum;
  return e;
}

Prediction Classifier::predict(const ImageTensor& img) const {
  const std::vector<double> l = logits(img);
  // strict > keeps the lowest index on ties
  int best = 0;
  for (int k = 1; k < num_classes_; ++k) {
    if (l[k] > l[best]) best = k;
  }
  return {best, softmax_of(l)[best]};
}

ImageTensor Classifier::input_gradient_from_trace(
    const Trace& trace, const std::vector<double>& logit_cotangent) const {
  if (logit_cotangent.size() != static_cast<size_t>(num_classes_)) {
    throw std::invalid_argument("cotangent length must equal the class count");
  }
  const double* p = params_.data();
  std::vector<double> d_input(trace.input.size(), 0.0);

  if (arch_ == Arch::kConvNet) {
    const TensorInfo& w1 = layout_[0];
    const TensorInfo& w2 = layout_[2];
    const TensorInfo& wf = layout_[4];
    const int h2 = in_h_ / 2, w2d = in_w_ / 2;

    std::vector<double> d_pool2(trace.pool2.size(), 0.0);
    dense_backward_input(logit_cotangent.data(),
                         static_cast<int>(trace.pool2.size()), p + wf.offset,
                         num_classes_, d_pool2.data());

    std::vector<double> r2 = trace.conv2;
    relu_forward(r2);
    std::vector<double> d_relu2(trace.conv2.size(), 0.0);
    maxpool2_backward(r2.data(), d_pool2.data(), kConv2Filters, h2, w2d,
                      d_relu2.data());
    relu_backward(trace.conv2, d_relu2);

    std::vector<double> d_pool1(trace.pool1.size(), 0.0);
    conv3x3_backward_input(d_relu2.data(), kConv1Filters, h2, w2d,
                           p + w2.offset, kConv2Filters, d_pool1.data());

    std::vector<double> r1 = trace.conv1;
    relu_forward(r1);
    std::vector<double> d_relu1(trace.conv1.size(), 0.0);
    maxpool2_backward(r1.data(), d_pool1.data(), kConv1Filters, in_h_, in_w_,
                      d_relu1.data());
    relu_backward(trace.conv1, d_relu1);

    conv3x3_backward_input(d_relu1.data(), in_c_, in_h_, in_w_, p + w1.offset,
                           kConv1Filters, d_input.data());
  } else {
    const TensorInfo& w1 = layout_[0];
    const TensorInfo& w2 = layout_[2];

    std::vector<double> d_hidden(kHidden, 0.0);
    dense_backward_input(logit_cotangent.data(), kHidden, p + w2.offset,
                         num_classes_, d_hidden.data());
    relu_backward(trace.hidden, d_hidden);

    dense_backward_input(d_hidden.data(), static_cast<int>(trace.input.size()),
                         p + w1.offset, kHidden, d_input.data());
  }

  ImageTensor grad(in_h_, in_w_, in_c_);
  for (size_t i = 0; i < d_input.size(); ++i) {
    grad.values[i] = d_input[i] * kInputScale;  // chain through x/255
  }
  return grad;
}

ImageTensor Classifier::input_gradient(const ImageTensor& img,
                                       const LossSpec& loss) const {
  const Trace trace = forward(img);
  std::vector<double> cot(num_classes_, 0.0);
  if (loss.kind == LossSpec::Kind::kCrossEntropy) {
    if (loss.class_a < 0 || loss.class_a >= num_classes_) {
      throw std::invalid_argument("loss class out of range");
    }
    cot = softmax_of(trace.logits);
    cot[loss.class_a] -= 1.0;
  } else {
    if (loss.class_a < 0 || loss.class_a >= num_classes_ || loss.class_b < 0 ||
        loss.class_b >= num_classes_) {
      throw std::invalid_argument("loss class out of range");
    }
    cot[loss.class_a] += 1.0;
    cot[loss.class_b] -= 1.0;
  }
  return input_gradient_from_trace(trace, cot);
}

double Classifier::accumulate_param_gradient(const ImageTensor& img, int label,
                                             std::vector<double>& grad) const {
  if (grad.size() != params_.size()) {
    throw std::invalid_argument("gradient buffer size mismatch");
  }
  const Trace t = forward(img);
  const std::vector<double> prob = softmax_of(t.logits);
  std::vector<double> d_logits = prob;
  d_logits[label] -= 1.0;

  const double* p = params_.data();
  double* g = grad.data();
  if (arch_ == Arch::kConvNet) {
    const TensorInfo& w1 = layout_[0];
    const TensorInfo& b1 = layout_[1];
    const TensorInfo& w2 = layout_[2];
    const TensorInfo& b2 = layout_[3];
    const TensorInfo& wf = layout_[4];
    const TensorInfo& bf = layout_[5];
    const int h2 = in_h_ / 2, w2d = in_w_ / 2;

    dense_backward_weights(t.pool2.data(), d_logits.data(),
                           static_cast<int>(t.pool2.size()), num_classes_,
                           g + wf.offset, g + bf.offset);
    std::vector<double> d_pool2(t.pool2.size(), 0.0);
    dense_backward_input(d_logits.data(), static_cast<int>(t.pool2.size()),
                         p + wf.offset, num_classes_, d_pool2.data());

    std::vector<double> r2 = t.conv2;
    relu_forward(r2);
    std::vector<double> d_relu2(t.conv2.size(), 0.0);
    maxpool2_backward(r2.data(), d_pool2.data(), kConv2Filters, h2, w2d,
                      d_relu2.data());
    relu_backward(t.conv2, d_relu2);

    conv3x3_backward_weights(t.pool1.data(), d_relu2.data(), kConv1Filters, h2,
                             w2d, kConv2Filters, g + w2.offset, g + b2.offset);
    std::vector<double> d_pool1(t.pool1.size(), 0.0);
    conv3x3_backward_input(d_relu2.data(), kConv1Filters, h2, w2d,
                           p + w2.offset, kConv2Filters, d_pool1.data());

    std::vector<double> r1 = t.conv1;
    relu_forward(r1);
    std::vector<double> d_relu1(t.conv1.size(), 0.0);
    maxpool2_backward(r1.data(), d_pool1.data(), kConv1Filters, in_h_, in_w_,
                      d_relu1.data());
    relu_backward(t.conv1, d_relu1);

    conv3x3_backward_weights(t.input.data(), d_relu1.data(), in_c_, in_h_,
                             in_w_, kConv1Filters, g + w1.offset,
                             g + b1.offset);
  } else {
    const TensorInfo& w1 = layout_[0];
    const TensorInfo& b1 = layout_[1];
    const TensorInfo& w2 = layout_[2];
    const TensorInfo& b2 = layout_[3];

    std::vector<double> h = t.hidden;
    relu_forward(h);
    dense_backward_weights(h.data(), d_logits.data(), kHidden, num_classes_,
                           g + w2.offset, g + b2.offset);

    std::vector<double> d_hidden(kHidden, 0.0);
    dense_backward_input(d_logits.data(), kHidden, p + w2.offset, num_classes_,
                         d_hidden.data());
    relu_backward(t.hidden, d_hidden);

    dense_backward_weights(t.input.data(), d_hidden.data(),
                           static_cast<int>(t.input.size()), kHidden,
                           g + w1.offset, g + b1.offset);
  }

  // underflow to exactly zero probability is the divergence signal the
  // train loop reports, so no clamp here
  return -std::log(prob[label]);
}

Classifier train_classifier(Arch arch, const LabeledDataset& data,
                            const TrainConfig& config) {
  data.validate();
  if (config.epochs < 0 || config.learning_rate <= 0.0 ||
      config.batch_size <= 0) {
    throw std::invalid_argument("bad training config");
  }

  const ImageTensor& probe = data.images[0];
  Rng rng(config.seed);
  Classifier net(arch, probe.height, probe.width, probe.channels,
                 data.num_classes, rng.next_u64());

  const size_t n_params = net.params().size();
  std::vector<double> grad(n_params, 0.0);
  std::vector<double> m(n_params, 0.0), v(n_params, 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;

  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = 0.0;
      try {
        for (size_t i = start; i < end; ++i) {
          loss += net.accumulate_param_gradient(data.images[order[i]],
                                                data.labels[order[i]], grad);
        }
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("training diverged at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(start / config.batch_size) +
                                 ": " + e.what());
      }
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      loss *= inv_batch;
      if (!std::isfinite(loss)) {
        throw std::runtime_error("training diverged at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(start / config.batch_size) +
                                 ": loss is not finite");
      }
      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      std::vector<double>& p = net.params();
      for (size_t i = 0; i < n_params; ++i) {
        const double gi = grad[i] * inv_batch;
        m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
        v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
        p[i] -= config.learning_rate * (m[i] / bc1) /
                (std::sqrt(v[i] / bc2) + eps);
      }
    }
  }
  return net;
}

double top1_accuracy(const Classifier& c, const LabeledDataset& data) {
  data.validate();
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (c.predict(data.images[i]).label == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double disagreement(const Classifier& a, const Classifier& b,
                    const LabeledDataset& data) {
  data.validate();
  size_t differ = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (a.predict(data.images[i]).label != b.predict(data.images[i]).label) {
      ++differ;
    }
  }
  return static_cast<double>(differ) / static_cast<double>(data.size());
}

}  // namespace ftuap
