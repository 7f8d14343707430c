#pragma once

#include <cstdint>
#include <string>

#include "ftuap/tinynet.hpp"

namespace ftuap {

// Procedurally generated texture classification task: each class is a
// sinusoidal grating at a class-specific orientation (centers 18 degrees
// apart), with random period, phase, amplitude, background level,
// orientation jitter and additive Gaussian noise, rounded to integer code
// values.
struct ToyDatasetConfig {
  int train_count = 640;
  int val_count = 320;
  int height = 32;
  int width = 32;
  int channels = 1;
  int num_classes = 10;
  double noise_sigma = 8.0;
  double band_noise_fraction = 0.8;  // JND-shaped augmentation strength
  uint64_t seed = 7;
};

struct ToyDataset {
  LabeledDataset train;
  LabeledDataset validation;
  ToyDatasetConfig config;
};

ToyDataset generate_toy_dataset(const ToyDatasetConfig& config = {});

// Directory layout: dataset.json with the generation parameters, index.csv
// with one "filename,label,split" row per image, and PGM/PPM rasters.
void save_dataset(const ToyDataset& data, const std::string& dir);
ToyDataset load_dataset(const std::string& dir);

}  // namespace ftuap
