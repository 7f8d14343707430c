#include "ftuap/serialize.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ftuap {

namespace {

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("truncated container");
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 |
         uint32_t(b[3]) << 24;
}

void put_f64(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("truncated container");
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_f64_block(std::ostream& out, const std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * 8));
  } else {
    for (double d : v) put_f64(out, d);
  }
}

void get_f64_block(std::istream& in, std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * 8));
    if (!in) throw std::runtime_error("truncated payload");
  } else {
    for (double& d : v) d = get_f64(in);
  }
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const uint32_t n = get_u32(in);
  if (n > (1u << 20)) throw std::runtime_error("string field too long");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw std::runtime_error("truncated container");
  return s;
}

void expect_magic(std::istream& in, const char* magic) {
  char got[4];
  in.read(got, 4);
  if (!in || std::memcmp(got, magic, 4) != 0) {
    throw std::runtime_error(std::string("bad container magic, expected ") +
                             magic);
  }
}

constexpr uint32_t kModelVersion = 1;
constexpr uint32_t kPerturbationVersion = 1;

}  // namespace

void save_classifier(const Classifier& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write("FTNT", 4);
  put_u32(out, kModelVersion);
  put_u32(out, static_cast<uint32_t>(c.arch()));
  put_u32(out, static_cast<uint32_t>(c.input_height()));
  put_u32(out, static_cast<uint32_t>(c.input_width()));
  put_u32(out, static_cast<uint32_t>(c.input_channels()));
  put_u32(out, static_cast<uint32_t>(c.num_classes()));

  const auto& layout = c.tensor_layout();
  put_u32(out, static_cast<uint32_t>(layout.size()));
  for (const auto& t : layout) {
    put_string(out, t.name);
    put_u32(out, static_cast<uint32_t>(t.dims.size()));
    for (int d : t.dims) put_u32(out, static_cast<uint32_t>(d));
  }
  put_f64_block(out, c.params());
  if (!out) throw std::runtime_error("write failed: " + path);
}

Classifier load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  expect_magic(in, "FTNT");
  const uint32_t version = get_u32(in);
  if (version != kModelVersion) {
    throw std::runtime_error("unsupported model version " +
                             std::to_string(version));
  }
  const uint32_t arch = get_u32(in);
  if (arch > 1) throw std::runtime_error("unknown architecture id");
  const int h = static_cast<int>(get_u32(in));
  const int w = static_cast<int>(get_u32(in));
  const int ch = static_cast<int>(get_u32(in));
  const int classes = static_cast<int>(get_u32(in));

  Classifier c(static_cast<Arch>(arch), h, w, ch, classes, 0);

  const uint32_t n_tensors = get_u32(in);
  const auto& layout = c.tensor_layout();
  if (n_tensors != layout.size()) {
    throw std::runtime_error("tensor count mismatch in " + path);
  }
  for (size_t i = 0; i < layout.size(); ++i) {
    const std::string name = get_string(in);
    const uint32_t ndim = get_u32(in);
    std::vector<int> dims(ndim);
    for (auto& d : dims) d = static_cast<int>(get_u32(in));
    if (name != layout[i].name || dims != layout[i].dims) {
      throw std::runtime_error("tensor layout mismatch at '" + name + "' in " +
                               path);
    }
  }
  get_f64_block(in, c.params());
  return c;
}

void save_perturbation(const Perturbation& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write("FTUP", 4);
  put_u32(out, kPerturbationVersion);
  put_u32(out, static_cast<uint32_t>(p.domain));
  put_string(out, p.provenance);
  if (p.domain == Perturbation::Domain::kSpatial) {
    put_u32(out, static_cast<uint32_t>(p.spatial.height));
    put_u32(out, static_cast<uint32_t>(p.spatial.width));
    put_u32(out, static_cast<uint32_t>(p.spatial.channels));
    put_f64(out, p.epsilon);
    put_f64_block(out, p.spatial.values);
  } else {
    put_u32(out, static_cast<uint32_t>(p.dct.block_rows));
    put_u32(out, static_cast<uint32_t>(p.dct.block_cols));
    put_u32(out, static_cast<uint32_t>(p.dct.channels));
    put_f64(out, p.thresholds.lambda);
    for (double t : p.thresholds.thresholds) put_f64(out, t);
    for (bool z : p.thresholds.zeroed) {
      out.put(z ? '\1' : '\0');
    }
    put_f64_block(out, p.dct.coeffs);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Perturbation load_perturbation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  expect_magic(in, "FTUP");
  const uint32_t version = get_u32(in);
  if (version != kPerturbationVersion) {
    throw std::runtime_error("unsupported perturbation version " +
                             std::to_string(version));
  }
  const uint32_t domain = get_u32(in);
  if (domain > 1) throw std::runtime_error("unknown perturbation domain");

  Perturbation p;
  p.domain = static_cast<Perturbation::Domain>(domain);
  p.provenance = get_string(in);
  if (p.domain == Perturbation::Domain::kSpatial) {
    const int h = static_cast<int>(get_u32(in));
    const int w = static_cast<int>(get_u32(in));
    const int c = static_cast<int>(get_u32(in));
    p.epsilon = get_f64(in);
    p.spatial = ImageTensor(h, w, c);
    get_f64_block(in, p.spatial.values);
  } else {
    const int rows = static_cast<int>(get_u32(in));
    const int cols = static_cast<int>(get_u32(in));
    const int c = static_cast<int>(get_u32(in));
    p.thresholds.lambda = get_f64(in);
    for (double& t : p.thresholds.thresholds) t = get_f64(in);
    for (bool& z : p.thresholds.zeroed) {
      const int byte = in.get();
      if (byte == EOF) throw std::runtime_error("truncated container");
      z = byte != 0;
    }
    p.dct = DctStack::zeros(rows, cols, c);
    get_f64_block(in, p.dct.coeffs);
  }
  return p;
}

BudgetCheck check_perturbation_budget(const std::string& path) {
  const Perturbation p = load_perturbation(path);
  BudgetCheck check;
  check.ok = true;

  if (p.domain == Perturbation::Domain::kSpatial) {
    for (double v : p.spatial.values) {
      check.max_abs_value = std::max(check.max_abs_value, std::abs(v));
      if (std::abs(v) > p.epsilon) {
        check.ok = false;
      }
    }
    std::ostringstream d;
    d.precision(17);
    d << "spatial max|delta| = " << check.max_abs_value
      << (check.ok ? " <= " : " > ") << "epsilon = " << p.epsilon;
    check.detail = d.str();
  } else {
    int violations = 0, masked_nonzero = 0;
    for (int c = 0; c < p.dct.channels; ++c) {
      for (int block = 0; block < p.dct.num_blocks(); ++block) {
        for (int b = 0; b < kBlockCoeffs; ++b) {
          const double v = p.dct.at(c, block, b);
          const double bound = p.thresholds.thresholds[b];
          check.max_abs_value = std::max(check.max_abs_value, std::abs(v));
          if (p.thresholds.zeroed[b] && v != 0.0) {
            ++masked_nonzero;
          } else if (std::abs(v) > bound) {
            ++violations;
          }
        }
      }
    }
    check.ok = violations == 0 && masked_nonzero == 0;
    std::ostringstream d;
    d << "dct coefficients: " << violations << " over threshold, "
      << masked_nonzero << " nonzero on masked bands";
    check.detail = d.str();
  }
  return check;
}

}  // namespace ftuap
