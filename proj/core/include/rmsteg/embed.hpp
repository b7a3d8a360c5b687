#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmsteg/audio.hpp"

namespace rmsteg {

enum class EmbedAlgo { lsb_replace, lsb_match, dsss, cox_dct };

const char* to_string(EmbedAlgo a);
EmbedAlgo algo_from_string(const std::string& s);

/// Parameters of a data-hiding algorithm. `capacity_bpb` drives the LSB
/// family; `strength` / `target_snr_db` drive the watermarkers. `seed` fixes
/// all pseudo-randomness (payload selection, chips, coefficients).
struct EmbedConfig {
  EmbedAlgo algorithm = EmbedAlgo::lsb_replace;
  double capacity_bpb = 6.25;
  double strength = 0.0;
  std::optional<double> target_snr_db;
  uint64_t seed = 0;
};

/// JSON object with fields exactly: algorithm, capacity_bpb, strength,
/// target_snr_db, seed.
std::string to_json_string(const EmbedConfig& cfg);
EmbedConfig embed_config_from_json(const std::string& json);

struct Payload {
  std::vector<uint8_t> bits;  // values 0/1

  size_t size() const { return bits.size(); }
};

/// Deterministic random payload: bit i is the least-significant bit of the
/// i-th output of std::mt19937_64 seeded with `seed`.
Payload gen_payload(size_t n_bits, uint64_t seed);

/// Geometry of LSB embedding derived from the capacity ladder:
/// capacities >= one bit per sample map to k LSBs in every sample,
/// fractional rates map to one LSB in every stride-th sample.
struct LsbLayout {
  int bits_per_sample = 1;
  size_t stride = 1;
};

LsbLayout lsb_layout(double capacity_bpb, int bit_depth);

/// Number of samples carrying payload under `layout` for an n-sample signal.
size_t lsb_selected_count(const LsbLayout& layout, size_t n_samples);

/// Payload size (bits) the configured embedder uses on this cover. Corpus
/// generation and calibration fill exactly this budget.
size_t capacity_bits(const EmbedConfig& cfg, const AudioSignal& cover);

/// Side data from the additive/multiplicative embedders.
struct EmbedStats {
  double alpha = 0.0;
  double pre_clip_snr_db = 0.0;
  size_t clipped_samples = 0;
};

AudioSignal lsb_replace_embed(const AudioSignal& cover, const Payload& payload,
                              const EmbedConfig& cfg);
Payload lsb_replace_extract(const AudioSignal& stego, size_t n_bits, const EmbedConfig& cfg);

AudioSignal lsb_match_embed(const AudioSignal& cover, const Payload& payload,
                            const EmbedConfig& cfg);

AudioSignal dsss_embed(const AudioSignal& cover, const Payload& payload, const EmbedConfig& cfg,
                       EmbedStats* stats = nullptr);

AudioSignal cox_embed(const AudioSignal& cover, const Payload& payload, const EmbedConfig& cfg,
                      EmbedStats* stats = nullptr);

/// Indices of the DCT coefficients the Cox embedder would modify: the
/// n_coeffs largest-magnitude AC coefficients, ascending.
std::vector<size_t> cox_selected_indices(const AudioSignal& cover, size_t n_coeffs);

/// Dispatch on cfg.algorithm.
AudioSignal embed(const AudioSignal& cover, const Payload& payload, const EmbedConfig& cfg,
                  EmbedStats* stats = nullptr);

inline constexpr size_t kDsssBlockLen = 1024;  // samples per payload bit in corpus use
inline constexpr size_t kDsssMinBlock = 64;
inline constexpr size_t kCoxCoeffs = 1000;
inline constexpr size_t kCoxPayloadBits = 128;
inline constexpr double kDsssDefaultTargetSnrDb = 27.7;
inline constexpr double kCoxDefaultStrength = 0.1;

}  // namespace rmsteg
