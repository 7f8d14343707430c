#include "ftuap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ftuap {

FoolingReport fooling_rate(const Classifier& c, const Perturbation& p,
                           const LabeledDataset& data) {
  data.validate();
  FoolingReport report;
  report.n = static_cast<int>(data.size());
  report.pairs.reserve(data.size());

  int flipped = 0, correct = 0, clean_correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const Prediction clean = c.predict(data.images[i]);
    const Prediction perturbed = c.predict(apply(p, data.images[i]));
    report.pairs.push_back({clean.label, perturbed.label, clean.confidence,
                            perturbed.confidence});
    if (clean.label != perturbed.label) ++flipped;
    if (perturbed.label == data.labels[i]) ++correct;
    if (clean.label == data.labels[i]) ++clean_correct;
  }
  report.fooling_rate = static_cast<double>(flipped) / report.n;
  report.top1_accuracy = static_cast<double>(correct) / report.n;
  report.clean_top1_accuracy = static_cast<double>(clean_correct) / report.n;
  return report;
}

std::vector<std::vector<double>> transfer_matrix(
    const std::vector<const Classifier*>& models,
    const std::vector<const Perturbation*>& perturbations,
    const LabeledDataset& data) {
  if (models.empty() || models.size() != perturbations.size()) {
    throw std::invalid_argument(
        "transfer matrix needs one perturbation per model");
  }
  std::vector<std::vector<double>> matrix(
      models.size(), std::vector<double>(models.size(), 0.0));
  for (size_t i = 0; i < perturbations.size(); ++i) {
    for (size_t j = 0; j < models.size(); ++j) {
      matrix[i][j] =
          fooling_rate(*models[j], *perturbations[i], data).fooling_rate;
    }
  }
  return matrix;
}

uint64_t HistogramSpec::total() const {
  return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

namespace {

HistogramSpec histogram_of(const std::vector<double>& values, int bins,
                           const std::string& domain) {
  if (bins < 1) throw std::invalid_argument("need at least one bin");
  if (values.empty()) throw std::invalid_argument("no values to bin");

  HistogramSpec h;
  h.domain = domain;

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  h.std_dev = std::sqrt(var / static_cast<double>(values.size()));

  // symmetric range about zero so saturation shows up at the edge bins
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  if (m == 0.0) m = 0.5;
  const double lo = -m, hi = m;

  h.bin_edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) {
    h.bin_edges[i] = lo + (hi - lo) * i / bins;
  }
  h.counts.assign(bins, 0);
  for (double v : values) {
    int bin = static_cast<int>((v - lo) / (hi - lo) * bins);
    bin = std::clamp(bin, 0, bins - 1);
    ++h.counts[bin];
  }
  return h;
}

std::vector<double> spatial_values(const Perturbation& p) {
  if (p.domain == Perturbation::Domain::kSpatial) {
    return p.spatial.values;
  }
  return inverse_dct(p.dct).values;
}

}  // namespace

HistogramSpec spatial_histogram(const Perturbation& p, int bins) {
  std::vector<double> values = spatial_values(p);
  for (double& v : values) v /= kPixelMax;
  return histogram_of(values, bins, "spatial");
}

HistogramSpec band_histogram(const Perturbation& p, int k1, int k2, int bins) {
  if (k1 < 0 || k1 >= kBlockSize || k2 < 0 || k2 >= kBlockSize) {
    throw std::invalid_argument("frequency index out of range");
  }
  DctStack stack;
  if (p.domain == Perturbation::Domain::kDct) {
    stack = p.dct;
  } else {
    stack = forward_dct(p.spatial);
  }
  const int b = k1 * kBlockSize + k2;
  std::vector<double> values;
  values.reserve(static_cast<size_t>(stack.num_blocks()) * stack.channels);
  for (int c = 0; c < stack.channels; ++c) {
    for (int block = 0; block < stack.num_blocks(); ++block) {
      values.push_back(stack.at(c, block, b));
    }
  }
  std::ostringstream domain;
  domain << "band:" << k1 << ',' << k2;
  return histogram_of(values, bins, domain.str());
}

void write_histogram_csv(const HistogramSpec& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "bin_low,bin_high,count\n";
  out.precision(17);
  for (size_t i = 0; i < h.counts.size(); ++i) {
    out << h.bin_edges[i] << ',' << h.bin_edges[i + 1] << ',' << h.counts[i]
        << '\n';
  }
  std::ofstream meta(path + ".meta.txt");
  if (!meta) throw std::runtime_error("cannot write " + path + ".meta.txt");
  meta.precision(17);
  meta << "domain: " << h.domain << '\n'
       << "values: " << h.total() << '\n'
       << "std: " << h.std_dev << '\n';
}

std::string report_summary(const FoolingReport& r) {
  std::ostringstream out;
  out.precision(4);
  out << "n=" << r.n << " fooling_rate=" << r.fooling_rate
      << " top1_accuracy=" << r.top1_accuracy
      << " clean_top1_accuracy=" << r.clean_top1_accuracy;
  return out.str();
}

void write_report_csv(const FoolingReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "index,clean_label,perturbed_label,clean_confidence,perturbed_confidence\n";
  out.precision(17);
  for (size_t i = 0; i < r.pairs.size(); ++i) {
    const PredictionPair& p = r.pairs[i];
    out << i << ',' << p.clean_label << ',' << p.perturbed_label << ','
        << p.clean_confidence << ',' << p.perturbed_confidence << '\n';
  }
}

void write_report_jsonl(const FoolingReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (size_t i = 0; i < r.pairs.size(); ++i) {
    nlohmann::json line;
    line["index"] = i;
    line["clean_label"] = r.pairs[i].clean_label;
    line["perturbed_label"] = r.pairs[i].perturbed_label;
    line["clean_confidence"] = r.pairs[i].clean_confidence;
    line["perturbed_confidence"] = r.pairs[i].perturbed_confidence;
    out << line.dump() << '\n';
  }
  nlohmann::json summary;
  summary["summary"] = true;
  summary["n"] = r.n;
  summary["fooling_rate"] = r.fooling_rate;
  summary["top1_accuracy"] = r.top1_accuracy;
  summary["clean_top1_accuracy"] = r.clean_top1_accuracy;
  out << summary.dump() << '\n';
}

}  // namespace ftuap
