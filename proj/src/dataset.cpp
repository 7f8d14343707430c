#include "ftuap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ftuap/image_io.hpp"
#include "ftuap/jnd.hpp"
#include "ftuap/rng.hpp"

namespace ftuap {

namespace {

// One class per grating orientation: centers spaced 18 degrees apart over a
// half turn, so neighbouring classes sit close enough for perturbations to
// push samples across the boundary. Amplitude rides on a mid-gray background
// at a scale the JND budget can compete with.
struct GratingParams {
  double orientation;  // radians
  double period;       // pixels
  double phase;
  double amplitude;
  double background;
};

GratingParams draw_grating(int label, Rng& rng) {
  GratingParams g;
  g.orientation =
      (18.0 * label + rng.uniform(-9.5, 9.5)) * std::numbers::pi / 180.0;
  g.period = rng.uniform(6.0, 8.0);
  // narrow phase jitter keeps class means distinct, which both
  // architectures can pick up from this much data
  g.phase = rng.uniform(0.0, 0.6);
  g.amplitude = rng.uniform(16.0, 28.0);
  g.background = rng.uniform(115.0, 140.0);
  return g;
}

void paint_class(int label, int h, int w, Rng& rng, std::vector<double>& plane) {
  const GratingParams g = draw_grating(label, rng);
  const double kx = std::cos(g.orientation) * 2.0 * std::numbers::pi / g.period;
  const double ky = std::sin(g.orientation) * 2.0 * std::numbers::pi / g.period;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      plane[y * w + x] =
          g.background + g.amplitude * std::sin(kx * x + ky * y + g.phase);
    }
  }
}

// Sub-threshold structured noise on the upper slanting bands (k1+k2 >= 6),
// scaled to a fraction of the JND threshold per coefficient. The grating
// signal lives in the lower bands, so this teaches classifiers to ignore
// perceptually-bounded high-frequency energy without touching the class
// content.
void add_band_noise(ImageTensor& img, double fraction, Rng& rng) {
  static const JndThresholdMatrix thresholds = jnd_matrix(2.0);
  DctStack noise = DctStack::zeros(img.height / kBlockSize,
                                   img.width / kBlockSize, img.channels);
  for (int c = 0; c < noise.channels; ++c) {
    for (int block = 0; block < noise.num_blocks(); ++block) {
      for (int k1 = 0; k1 < kBlockSize; ++k1) {
        for (int k2 = 0; k2 < kBlockSize; ++k2) {
          if (k1 + k2 < 6) continue;
          const int b = k1 * kBlockSize + k2;
          noise.at(c, block, b) =
              fraction * thresholds.thresholds[b] * rng.uniform(-1.0, 1.0);
        }
      }
    }
  }
  const ImageTensor spatial = inverse_dct(noise);
  for (size_t i = 0; i < img.size(); ++i) {
    img.values[i] += spatial.values[i];
  }
}

ImageTensor make_example(int label, const ToyDatasetConfig& cfg, Rng& rng) {
  ImageTensor img(cfg.height, cfg.width, cfg.channels);
  std::vector<double> plane(static_cast<size_t>(cfg.height) * cfg.width, 0.0);
  paint_class(label, cfg.height, cfg.width, rng, plane);

  for (int c = 0; c < cfg.channels; ++c) {
    // channels share the geometry, with a small per-channel tint
    const double tint = cfg.channels == 1 ? 0.0 : rng.uniform(-12.0, 12.0);
    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        img.at(c, y, x) = plane[y * cfg.width + x] + tint +
                          rng.normal(0.0, cfg.noise_sigma);
      }
    }
  }
  add_band_noise(img, cfg.band_noise_fraction, rng);
  for (double& v : img.values) {
    v = std::clamp(std::round(v), 0.0, 255.0);
  }
  return img;
}

LabeledDataset make_split(const std::string& split, int count,
                          const ToyDatasetConfig& cfg, Rng& rng) {
  LabeledDataset d;
  d.split = split;
  d.num_classes = cfg.num_classes;
  std::vector<int> labels(count);
  for (int i = 0; i < count; ++i) labels[i] = i % cfg.num_classes;
  rng.shuffle(labels);
  for (int i = 0; i < count; ++i) {
    d.labels.push_back(labels[i]);
    d.images.push_back(make_example(labels[i], cfg, rng));
  }
  return d;
}

}  // namespace

ToyDataset generate_toy_dataset(const ToyDatasetConfig& config) {
  if (config.train_count <= 0 || config.val_count <= 0) {
    throw std::invalid_argument("dataset split sizes must be positive");
  }
  if (config.num_classes < 1 || config.num_classes > 10) {
    throw std::invalid_argument("toy dataset supports 1 to 10 classes");
  }
  ToyDataset data;
  data.config = config;
  Rng train_rng = Rng(config.seed).fork(1);
  Rng val_rng = Rng(config.seed).fork(2);
  data.train = make_split("train", config.train_count, config, train_rng);
  data.validation = make_split("validation", config.val_count, config, val_rng);
  return data;
}

void save_dataset(const ToyDataset& data, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  nlohmann::json meta;
  meta["train_count"] = data.config.train_count;
  meta["val_count"] = data.config.val_count;
  meta["height"] = data.config.height;
  meta["width"] = data.config.width;
  meta["channels"] = data.config.channels;
  meta["num_classes"] = data.config.num_classes;
  meta["noise_sigma"] = data.config.noise_sigma;
  meta["band_noise_fraction"] = data.config.band_noise_fraction;
  meta["seed"] = data.config.seed;
  std::ofstream mf(fs::path(dir) / "dataset.json");
  mf << meta.dump(2) << '\n';

  std::ofstream index(fs::path(dir) / "index.csv");
  index << "filename,label,split\n";
  const char* ext = data.config.channels == 3 ? ".ppm" : ".pgm";
  auto dump_split = [&](const LabeledDataset& split) {
    for (size_t i = 0; i < split.size(); ++i) {
      std::ostringstream name;
      name << split.split << '_' << std::setw(5) << std::setfill('0') << i
           << ext;
      save_image(split.images[i], (fs::path(dir) / name.str()).string());
      index << name.str() << ',' << split.labels[i] << ',' << split.split
            << '\n';
    }
  };
  dump_split(data.train);
  dump_split(data.validation);
}

ToyDataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream mf(fs::path(dir) / "dataset.json");
  if (!mf) {
    throw std::runtime_error("cannot open " + dir + "/dataset.json");
  }
  nlohmann::json meta = nlohmann::json::parse(mf);
  ToyDataset data;
  data.config.train_count = meta.at("train_count").get<int>();
  data.config.val_count = meta.at("val_count").get<int>();
  data.config.height = meta.at("height").get<int>();
  data.config.width = meta.at("width").get<int>();
  data.config.channels = meta.at("channels").get<int>();
  data.config.num_classes = meta.at("num_classes").get<int>();
  data.config.noise_sigma = meta.at("noise_sigma").get<double>();
  data.config.band_noise_fraction = meta.at("band_noise_fraction").get<double>();
  data.config.seed = meta.at("seed").get<uint64_t>();
  data.train.split = "train";
  data.validation.split = "validation";
  data.train.num_classes = data.config.num_classes;
  data.validation.num_classes = data.config.num_classes;

  std::ifstream index(fs::path(dir) / "index.csv");
  if (!index) {
    throw std::runtime_error("cannot open " + dir + "/index.csv");
  }
  std::string line;
  std::getline(index, line);  // header
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string filename, label, split;
    std::getline(row, filename, ',');
    std::getline(row, label, ',');
    std::getline(row, split, ',');
    LabeledDataset& target = split == "train" ? data.train : data.validation;
    target.images.push_back(load_image((fs::path(dir) / filename).string()));
    target.labels.push_back(std::stoi(label));
  }
  data.train.validate();
  data.validation.validate();
  return data;
}

}  // namespace ftuap
