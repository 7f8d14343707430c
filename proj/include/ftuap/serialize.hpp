#pragma once

#include <string>

#include "ftuap/attack.hpp"
#include "ftuap/tinynet.hpp"

namespace ftuap {

// Versioned binary containers with little-endian 64-bit float payloads.
// Model files start with "FTNT", perturbation files with "FTUP".
void save_classifier(const Classifier& c, const std::string& path);
Classifier load_classifier(const std::string& path);

void save_perturbation(const Perturbation& p, const std::string& path);
Perturbation load_perturbation(const std::string& path);

struct BudgetCheck {
  bool ok = false;
  std::string detail;
  double max_abs_value = 0.0;  // worst |value| relative to its bound
};

// Re-reads a serialized perturbation and verifies its budget directly
// against the stored bound: |delta| <= epsilon everywhere for spatial
// artifacts, |coefficient| <= threshold per frequency with masked bands
// exactly zero for DCT artifacts. Does not touch the projection code.
BudgetCheck check_perturbation_budget(const std::string& path);

}  // namespace ftuap
