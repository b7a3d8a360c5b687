#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmsteg/features.hpp"
#include "rmsteg/svm.hpp"

namespace rmsteg {

struct TrialResult {
  double sensitivity = 0.0;  // percent of stego flagged
  double specificity = 0.0;  // percent of covers cleared
  double accuracy = 0.0;
  double auc = 0.0;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  uint64_t trial_seed = 0;
  double c_used = 0.0, gamma_used = 0.0;
};

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
  std::vector<double> thresholds;                 // +inf at (0,0)
  double auc = 0.0;
};

/// Threshold sweep over the unique decision values; tied scores move the
/// point diagonally. Trapezoidal area. Labels are +1 stego / -1 cover.
RocCurve roc_and_auc(std::vector<std::pair<double, int>> scores);

struct HyperSpec {
  double c_reg = 8.0;
  double gamma = 0.03125;
  bool grid = false;  // grid-search per trial on the training split
  std::vector<double> c_grid = default_c_grid();
  std::vector<double> gamma_grid = default_gamma_grid();
  int folds = 5;
};

struct EvalReport {
  std::vector<TrialResult> trials;
  double mean_se = 0.0, mean_sp = 0.0, mean_ac = 0.0;
  double std_se = 0.0, std_sp = 0.0, std_ac = 0.0;
  RocCurve roc;  // pooled test decision values across trials
  std::string manifest_ref;
  FeatureKind kind = FeatureKind::plain;
  std::optional<EmbedConfig> embedder;
  HyperSpec hyper;
  int repetitions = 0;
};

struct ManifestRow {
  std::string path;  // relative to the manifest's directory
  Label label = Label::cover;
  std::string algorithm;
  double capacity_bpb = 0.0;
  uint64_t seed = 0;
  double snr_db = 0.0;
};

struct SynthSpec {
  size_t count = 20;
  double duration_s = 1.0;
  int sample_rate = 44100;
  uint64_t seed = 0;
};

/// Writes cover/stego WAV pairs plus manifest.csv into out_dir. Covers come
/// either from files or from the synthetic generator. Stego i carries a
/// payload seeded with derive_seed(cfg.seed, 2i+1).
std::vector<ManifestRow> build_corpus(const std::vector<std::filesystem::path>& covers,
                                      const EmbedConfig& cfg,
                                      const std::filesystem::path& out_dir);
std::vector<ManifestRow> build_corpus(const SynthSpec& spec, const EmbedConfig& cfg,
                                      const std::filesystem::path& out_dir);

std::string manifest_to_csv(std::span<const ManifestRow> rows);
std::vector<ManifestRow> manifest_from_csv(const std::string& text);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestRow> rows);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

/// Pair id of a corpus file: stem with a trailing "_cover"/"_stego" dropped,
/// so the two halves of a pair share one id.
std::string source_id_from_path(const std::filesystem::path& path);

/// Stratified split that keeps all rows of one source id on the same side.
std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>> split_train_test(
    std::span<const FeatureVector> features, double train_frac, uint64_t seed);

/// The evaluation protocol: `repetitions` random 70/30 splits, an SVM per
/// split (optionally grid-searched on the training side), confusion counts
/// on the test side, pooled ROC at the end.
EvalReport run_trials(std::span<const FeatureVector> features, int repetitions,
                      const HyperSpec& hyper, uint64_t seed, double train_frac = 0.70);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& json);
void write_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report(const std::filesystem::path& path);

std::string roc_to_csv(const RocCurve& roc);

/// Feature extraction over a corpus manifest.
struct ExtractOptions {
  FeatureKind kind = FeatureKind::plain;
  std::optional<EmbedConfig> calibration;  // required for calibrated features
  unsigned jobs = 1;
  bool keep_going = false;
};

struct ExtractOutcome {
  std::vector<FeatureVector> features;         // input order
  std::vector<std::string> failures;           // paths that could not be read
};

ExtractOutcome extract_features(const std::filesystem::path& manifest_path,
                                const RMelFilterbank& bank, const ExtractOptions& options);

/// Per-dimension class separation (two-sample t statistic), best first.
std::vector<size_t> rank_dims_by_tstat(std::span<const FeatureVector> features);

/// CSV of the 3 best-separating dimensions plus the label column.
std::string scatter_csv(std::span<const FeatureVector> features,
                        std::span<const size_t> dims3);

struct CompareResult {
  EvalReport plain;
  EvalReport calibrated;
  double auc_delta = 0.0;  // calibrated minus plain
  std::vector<size_t> top_dims_plain;
  std::vector<size_t> top_dims_calibrated;
  std::string scatter_plain;
  std::string scatter_calibrated;
};

/// Runs the whole protocol twice, plain vs calibrated, with shared split
/// seeds so both feature kinds see identical train/test partitions.
CompareResult compare_feature_kinds(const std::filesystem::path& manifest_path,
                                    const EmbedConfig& cal_cfg, const RMelFilterbank& bank,
                                    const HyperSpec& hyper, int repetitions, uint64_t seed,
                                    unsigned jobs = 1);

}  // namespace rmsteg
