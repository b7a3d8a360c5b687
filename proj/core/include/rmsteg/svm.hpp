#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmsteg/features.hpp"

namespace rmsteg {

/// exp(-gamma * ||a - b||^2), gamma > 0. Result in (0, 1].
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// Per-dimension affine map of training data onto [-1, 1]. Constant
/// dimensions map to 0. Test values may land outside [-1, 1].
struct Scaler {
  std::vector<double> lo, hi;

  static Scaler fit(const std::vector<std::vector<double>>& rows);
  std::vector<double> apply(std::span<const double> row) const;
};

/// Result of the dual solver on an already-scaled dataset.
struct SmoResult {
  std::vector<double> alpha;   // box-constrained dual variables, one per row
  double bias = 0.0;
  double dual_objective = 0.0;
  bool converged = true;
  size_t pair_updates = 0;
};

/// Soft-margin dual solved by pairwise working-set updates (maximal
/// violating pair with a second-order tie break), KKT tolerance `tol`.
/// Labels are -1/+1. Returns whatever it has when the update cap is hit,
/// with converged = false.
SmoResult smo_solve(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    double c_reg, double gamma, double tol = 1e-3,
                    size_t max_pair_updates = 1'000'000);

struct SvmModel {
  std::vector<std::vector<double>> support_vectors;  // masked, scaled space
  std::vector<double> alphas;                        // alpha_i * y_i, |.| <= c_reg
  double bias = 0.0;
  double gamma = 1.0;
  double c_reg = 1.0;
  std::vector<uint8_t> feature_mask;                 // kFeatureDim entries of 0/1
  Scaler scaler;                                     // over the masked dimensions
  FeatureKind kind = FeatureKind::plain;
  bool converged = true;
  std::optional<EmbedConfig> calibration;
};

/// Trains on labeled features (cover = -1, stego = +1). An empty mask means
/// all dimensions. The scaler is fit on the training data.
SvmModel train_svm(std::span<const FeatureVector> data, double c_reg, double gamma,
                   std::vector<uint8_t> mask = {});

/// Decision value and label; positive decisions are Stego, ties go to Cover.
std::pair<Label, double> predict(const SvmModel& model, const FeatureVector& x);

/// Same on a bare value row (no feature-kind check).
std::pair<Label, double> predict_values(const SvmModel& model,
                                        std::span<const double> values);

/// Pooled k-fold cross-validated accuracy of an SVM restricted to `mask`.
/// Folds are stratified by class and seeded. An all-zero mask scores 0.
double masked_cv_accuracy(std::span<const FeatureVector> data,
                          const std::vector<uint8_t>& mask, double c_reg, double gamma,
                          int folds, uint64_t seed);

/// Exhaustive (C, gamma) search by cross-validated accuracy; ties prefer
/// smaller C, then smaller gamma.
std::pair<double, double> grid_search(std::span<const FeatureVector> data,
                                      std::span<const double> c_grid,
                                      std::span<const double> gamma_grid, int folds,
                                      uint64_t seed);

std::vector<double> default_c_grid();
std::vector<double> default_gamma_grid();

std::string model_to_json(const SvmModel& model);
SvmModel model_from_json(const std::string& json);
void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace rmsteg
