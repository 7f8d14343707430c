#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftuap/attack.hpp"
#include "ftuap/tinynet.hpp"

namespace ftuap {

struct PredictionPair {
  int clean_label = 0;
  int perturbed_label = 0;
  double clean_confidence = 0.0;
  double perturbed_confidence = 0.0;
};

// FR counts label changes against the model's own clean predictions;
// top1_accuracy is the ground-truth accuracy of the perturbed predictions.
struct FoolingReport {
  double fooling_rate = 0.0;
  double top1_accuracy = 0.0;
  double clean_top1_accuracy = 0.0;
  int n = 0;
  std::vector<PredictionPair> pairs;
};

FoolingReport fooling_rate(const Classifier& c, const Perturbation& p,
                           const LabeledDataset& data);

// Entry (i, j): fooling rate of the perturbation computed for model i,
// evaluated on model j. The diagonal is the white-box rate.
std::vector<std::vector<double>> transfer_matrix(
    const std::vector<const Classifier*>& models,
    const std::vector<const Perturbation*>& perturbations,
    const LabeledDataset& data);

struct HistogramSpec {
  std::string domain;  // "spatial" or "band:k1,k2"
  std::vector<double> bin_edges;  // counts.size() + 1, strictly increasing
  std::vector<uint64_t> counts;
  double std_dev = 0.0;

  uint64_t total() const;
};

// Histogram of perturbation values on the normalized [0, 1] image scale
// (code values divided by 255); DCT perturbations are spatialized first.
HistogramSpec spatial_histogram(const Perturbation& p, int bins);

// Histogram of coefficient (k1, k2) across all blocks and channels;
// spatial perturbations are forward-transformed first.
HistogramSpec band_histogram(const Perturbation& p, int k1, int k2, int bins);

// CSV rows bin_low,bin_high,count plus a ".meta.txt" sidecar with the std
// and domain metadata.
void write_histogram_csv(const HistogramSpec& h, const std::string& path);

std::string report_summary(const FoolingReport& r);
void write_report_csv(const FoolingReport& r, const std::string& path);
void write_report_jsonl(const FoolingReport& r, const std::string& path);

}  // namespace ftuap
