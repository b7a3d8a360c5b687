#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmsteg/features.hpp"

namespace rmsteg {

/// Wrapper feature selection: individuals are bit masks over the feature
/// dimensions, fitness is cross-validated classifier accuracy.
struct GaConfig {
  size_t population = 200;  // must be even
  size_t generations = 10;
  double mutation_rate = 1.0 / kFeatureDim;
  double c_reg = 8.0;
  double gamma = 0.125;
  int folds = 3;
  uint64_t seed = 0;
};

/// Tournament selection (size 2), two-point crossover, per-bit mutation,
/// elitism of one. Returns the best mask seen. All-zero masks score 0.
std::vector<uint8_t> ga_select(std::span<const FeatureVector> data, const GaConfig& cfg);

}  // namespace rmsteg
