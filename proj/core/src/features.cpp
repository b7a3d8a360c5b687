#include "rmsteg/features.hpp"

#include "rmsteg/csv.hpp"
#include "rmsteg/error.hpp"

namespace rmsteg {

const char* to_string(Label l) {
  switch (l) {
    case Label::cover: return "cover";
    case Label::stego: return "stego";
    case Label::unknown: return "unknown";
  }
  return "unknown";
}

Label label_from_string(const std::string& s) {
  if (s == "cover") return Label::cover;
  if (s == "stego") return Label::stego;
  if (s == "unknown") return Label::unknown;
  raise(Errc::bad_config, "unknown label '" + s + "'");
}

const char* to_string(FeatureKind k) {
  return k == FeatureKind::plain ? "plain" : "calibrated";
}

FeatureKind kind_from_string(const std::string& s) {
  if (s == "plain") return FeatureKind::plain;
  if (s == "calibrated") return FeatureKind::calibrated;
  raise(Errc::bad_config, "unknown feature kind '" + s + "'");
}

std::string feature_name(size_t dim) {
  static const char* block[4] = {"mean", "std", "skew", "kurt"};
  return std::string(block[dim / kNumCoeffs]) + "_" + std::to_string(dim % kNumCoeffs + 1);
}

std::array<double, kFeatureDim> flatten(const HosStats& stats) {
  std::array<double, kFeatureDim> out{};
  for (size_t j = 0; j < kNumCoeffs; ++j) {
    out[j] = stats.mean[j];
    out[kNumCoeffs + j] = stats.std_dev[j];
    out[2 * kNumCoeffs + j] = stats.skewness[j];
    out[3 * kNumCoeffs + j] = stats.kurtosis[j];
  }
  return out;
}

AudioSignal calibrate(const AudioSignal& x, const EmbedConfig& cal_cfg) {
  const size_t n_bits = capacity_bits(cal_cfg, x);
  const Payload payload = gen_payload(n_bits, cal_cfg.seed);
  return embed(x, payload, cal_cfg);
}

FeatureVector feature_vector_calibrated(const AudioSignal& x, const EmbedConfig& cal_cfg,
                                        const RMelFilterbank& bank,
                                        const std::string& source_id) {
  const RmfccMatrix original = rmfcc_signal(x, bank);
  const AudioSignal re_embedded = calibrate(x, cal_cfg);
  RmfccMatrix diff = rmfcc_signal(re_embedded, bank);
  // Embedders preserve length, so the frame grids line up exactly.
  for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= original.values[i];

  FeatureVector fv;
  fv.values = flatten(hos_stats(diff));
  fv.kind = FeatureKind::calibrated;
  fv.source_id = source_id;
  fv.calibration = cal_cfg;
  return fv;
}

FeatureVector feature_vector_plain(const AudioSignal& x, const RMelFilterbank& bank,
                                   const std::string& source_id) {
  FeatureVector fv;
  fv.values = flatten(hos_stats(rmfcc_signal(x, bank)));
  fv.kind = FeatureKind::plain;
  fv.source_id = source_id;
  return fv;
}

std::string features_to_csv(std::span<const FeatureVector> features) {
  std::string out = "source_id,label,kind";
  for (size_t d = 0; d < kFeatureDim; ++d) out += "," + feature_name(d);
  out += '\n';
  for (const FeatureVector& fv : features) {
    out += fv.source_id;
    out += ',';
    out += to_string(fv.label);
    out += ',';
    out += to_string(fv.kind);
    for (size_t d = 0; d < kFeatureDim; ++d) out += "," + format_double(fv.values[d]);
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> features_from_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) raise(Errc::bad_config, "empty feature CSV");
  std::vector<FeatureVector> out;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != 3 + kFeatureDim)
      raise(Errc::bad_config, "feature CSV row has " + std::to_string(f.size()) +
                                  " fields, expected " + std::to_string(3 + kFeatureDim));
    FeatureVector fv;
    fv.source_id = f[0];
    fv.label = label_from_string(f[1]);
    fv.kind = kind_from_string(f[2]);
    for (size_t d = 0; d < kFeatureDim; ++d) fv.values[d] = parse_double(f[3 + d]);
    out.push_back(std::move(fv));
  }
  return out;
}

void write_features_csv(const std::filesystem::path& path,
                        std::span<const FeatureVector> features) {
  write_text_file(path, features_to_csv(features));
}

std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path) {
  return features_from_csv(read_text_file(path));
}

}  // namespace rmsteg
