#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmsteg/embed.hpp"
#include "rmsteg/rmel.hpp"

namespace rmsteg {

inline constexpr size_t kFeatureDim = 4 * kNumCoeffs;  // 116

enum class Label { cover, stego, unknown };
enum class FeatureKind { plain, calibrated };

const char* to_string(Label l);
Label label_from_string(const std::string& s);
const char* to_string(FeatureKind k);
FeatureKind kind_from_string(const std::string& s);

/// One signal's steganalysis features: mean[1..29], std[1..29],
/// skewness[1..29], kurtosis[1..29] in that order.
struct FeatureVector {
  std::array<double, kFeatureDim> values{};
  Label label = Label::unknown;
  FeatureKind kind = FeatureKind::plain;
  std::string source_id;
  std::optional<EmbedConfig> calibration;  // present iff kind == calibrated
};

/// Name of feature dimension d, e.g. "mean_1", "kurt_29".
std::string feature_name(size_t dim);

std::array<double, kFeatureDim> flatten(const HosStats& stats);

/// Re-embeds the signal under scrutiny: fills the embedder's capacity with a
/// payload generated from cal_cfg.seed and applies it.
AudioSignal calibrate(const AudioSignal& x, const EmbedConfig& cal_cfg);

/// Calibrated features: statistics of the difference between the cepstral
/// matrices of the re-embedded signal and the original. A signal that is
/// already stego barely moves under re-embedding; a cover moves a lot.
FeatureVector feature_vector_calibrated(const AudioSignal& x, const EmbedConfig& cal_cfg,
                                        const RMelFilterbank& bank,
                                        const std::string& source_id = "");

/// Non-calibrated baseline: statistics of the signal's own cepstral matrix.
FeatureVector feature_vector_plain(const AudioSignal& x, const RMelFilterbank& bank,
                                   const std::string& source_id = "");

/// CSV with columns: source_id, label, kind, then the 116 value columns.
void write_features_csv(const std::filesystem::path& path,
                        std::span<const FeatureVector> features);
std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path);

std::string features_to_csv(std::span<const FeatureVector> features);
std::vector<FeatureVector> features_from_csv(const std::string& text);

}  // namespace rmsteg
