#include "rmsteg/embed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rmsteg/error.hpp"
#include "rmsteg/fft.hpp"
#include "rmsteg/rng.hpp"

namespace rmsteg {
namespace {

int32_t sign_extend(uint32_t pattern, int bit_depth) {
  const uint32_t half = 1u << (bit_depth - 1);
  return pattern >= half ? static_cast<int32_t>(pattern) - (1 << bit_depth)
                         : static_cast<int32_t>(pattern);
}

double sum_squares(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

const char* to_string(EmbedAlgo a) {
  switch (a) {
    case EmbedAlgo::lsb_replace: return "lsb-replace";
    case EmbedAlgo::lsb_match: return "lsb-match";
    case EmbedAlgo::dsss: return "dsss";
    case EmbedAlgo::cox_dct: return "cox";
  }
  return "unknown";
}

EmbedAlgo algo_from_string(const std::string& s) {
  if (s == "lsb-replace") return EmbedAlgo::lsb_replace;
  if (s == "lsb-match") return EmbedAlgo::lsb_match;
  if (s == "dsss") return EmbedAlgo::dsss;
  if (s == "cox") return EmbedAlgo::cox_dct;
  raise(Errc::bad_config, "unknown embedding algorithm '" + s + "'");
}

std::string to_json_string(const EmbedConfig& cfg) {
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(cfg.algorithm);
  j["capacity_bpb"] = cfg.capacity_bpb;
  j["strength"] = cfg.strength;
  if (cfg.target_snr_db)
    j["target_snr_db"] = *cfg.target_snr_db;
  else
    j["target_snr_db"] = nullptr;
  j["seed"] = cfg.seed;
  return j.dump();
}

EmbedConfig embed_config_from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) raise(Errc::bad_config, "malformed embed config JSON");
  EmbedConfig cfg;
  cfg.algorithm = algo_from_string(j.at("algorithm").get<std::string>());
  cfg.capacity_bpb = j.at("capacity_bpb").get<double>();
  cfg.strength = j.at("strength").get<double>();
  if (j.contains("target_snr_db") && !j.at("target_snr_db").is_null())
    cfg.target_snr_db = j.at("target_snr_db").get<double>();
  cfg.seed = j.at("seed").get<uint64_t>();
  return cfg;
}

Payload gen_payload(size_t n_bits, uint64_t seed) {
  Payload p;
  p.bits.resize(n_bits);
  Rng rng(seed);
  for (size_t i = 0; i < n_bits; ++i) p.bits[i] = static_cast<uint8_t>(rng.bit());
  return p;
}

LsbLayout lsb_layout(double capacity_bpb, int bit_depth) {
  if (capacity_bpb <= 0.0 || capacity_bpb > 100.0)
    raise(Errc::bad_config, "capacity_bpb must be in (0, 100]");
  const double rate = capacity_bpb * bit_depth / 100.0;  // payload bits per sample
  LsbLayout layout;
  if (rate >= 1.0) {
    layout.bits_per_sample =
        std::clamp(static_cast<int>(std::lround(rate)), 1, bit_depth);
    layout.stride = 1;
  } else {
    layout.bits_per_sample = 1;
    layout.stride = static_cast<size_t>(std::max(1l, std::lround(1.0 / rate)));
  }
  return layout;
}

size_t lsb_selected_count(const LsbLayout& layout, size_t n_samples) {
  if (n_samples == 0) return 0;
  return (n_samples - 1) / layout.stride + 1;
}

size_t capacity_bits(const EmbedConfig& cfg, const AudioSignal& cover) {
  const size_t n = cover.size();
  switch (cfg.algorithm) {
    case EmbedAlgo::lsb_replace:
    case EmbedAlgo::lsb_match: {
      const LsbLayout layout = lsb_layout(cfg.capacity_bpb, cover.bit_depth);
      return static_cast<size_t>(layout.bits_per_sample) * lsb_selected_count(layout, n);
    }
    case EmbedAlgo::dsss:
      if (n < kDsssMinBlock) return 0;
      return std::max<size_t>(1, n / kDsssBlockLen);
    case EmbedAlgo::cox_dct:
      return n >= 2 * kCoxCoeffs ? kCoxPayloadBits : 0;
  }
  return 0;
}

AudioSignal lsb_replace_embed(const AudioSignal& cover, const Payload& payload,
                              const EmbedConfig& cfg) {
  const LsbLayout layout = lsb_layout(cfg.capacity_bpb, cover.bit_depth);
  const size_t k = static_cast<size_t>(layout.bits_per_sample);
  if (payload.size() > k * cover.size())
    raise(Errc::payload_too_large, "payload exceeds k * sample count");

  std::vector<int32_t> raw = cover.raw;
  const uint32_t mask_all = (1u << cover.bit_depth) - 1;
  for (size_t i = 0; i * k < payload.size(); ++i) {
    uint32_t pattern = static_cast<uint32_t>(raw[i]) & mask_all;
    for (size_t b = 0; b < k && i * k + b < payload.size(); ++b) {
      const uint32_t bit_mask = 1u << b;
      if (payload.bits[i * k + b])
        pattern |= bit_mask;
      else
        pattern &= ~bit_mask;
    }
    raw[i] = sign_extend(pattern, cover.bit_depth);
  }
  return AudioSignal::from_raw(std::move(raw), cover.sample_rate, cover.bit_depth);
}

Payload lsb_replace_extract(const AudioSignal& stego, size_t n_bits, const EmbedConfig& cfg) {
  const LsbLayout layout = lsb_layout(cfg.capacity_bpb, stego.bit_depth);
  const size_t k = static_cast<size_t>(layout.bits_per_sample);
  if (n_bits > k * stego.size())
    raise(Errc::payload_too_large, "requested more bits than the capacity holds");

  Payload out;
  out.bits.resize(n_bits);
  const uint32_t mask_all = (1u << stego.bit_depth) - 1;
  for (size_t i = 0; i * k < n_bits; ++i) {
    const uint32_t pattern = static_cast<uint32_t>(stego.raw[i]) & mask_all;
    for (size_t b = 0; b < k && i * k + b < n_bits; ++b)
      out.bits[i * k + b] = static_cast<uint8_t>((pattern >> b) & 1u);
  }
  return out;
}

AudioSignal lsb_match_embed(const AudioSignal& cover, const Payload& payload,
                            const EmbedConfig& cfg) {
  const size_t budget = capacity_bits(cfg, cover);
  if (payload.size() > budget || payload.size() > cover.size())
    raise(Errc::payload_too_large, "payload exceeds matching capacity");

  const double scale = static_cast<double>(1 << (cover.bit_depth - 1));
  const int32_t lo = -static_cast<int32_t>(scale);
  const int32_t hi = static_cast<int32_t>(scale) - 1;

  std::vector<int32_t> raw = cover.raw;
  Rng rng(cfg.seed);
  const std::vector<size_t> perm = random_permutation(cover.size(), rng);
  for (size_t j = 0; j < payload.size(); ++j) {
    const size_t idx = perm[j];
    const int bit = payload.bits[j];
    if ((raw[idx] & 1) == bit) continue;
    int dir;
    if (raw[idx] >= hi)
      dir = -1;
    else if (raw[idx] <= lo)
      dir = +1;
    else
      dir = rng.bit() ? +1 : -1;
    raw[idx] += dir;
  }
  return AudioSignal::from_raw(std::move(raw), cover.sample_rate, cover.bit_depth);
}

AudioSignal dsss_embed(const AudioSignal& cover, const Payload& payload, const EmbedConfig& cfg,
                       EmbedStats* stats) {
  if (payload.size() == 0) raise(Errc::payload_too_large, "DSSS payload must be nonempty");
  const size_t n = cover.size();
  const size_t block = n / payload.size();
  if (block < kDsssMinBlock)
    raise(Errc::payload_too_large, "fewer than 64 chips per payload bit");
  const size_t used = block * payload.size();

  // PN sequence: one +/-1 chip per covered sample, drawn block-major.
  Rng rng(cfg.seed);
  std::vector<double> watermark(used);
  for (size_t j = 0; j < payload.size(); ++j) {
    const double b = payload.bits[j] ? 1.0 : -1.0;
    for (size_t t = 0; t < block; ++t)
      watermark[j * block + t] = b * (rng.bit() ? 1.0 : -1.0);
  }

  const double cover_energy = sum_squares(cover.samples);
  double alpha;
  if (cfg.target_snr_db) {
    // Chips are unit magnitude, so noise power is alpha^2 per covered sample.
    alpha = std::sqrt(cover_energy /
                      (static_cast<double>(used) * std::pow(10.0, *cfg.target_snr_db / 10.0)));
  } else if (cfg.strength > 0.0) {
    alpha = cfg.strength;
  } else {
    raise(Errc::no_target, "DSSS needs target_snr_db or strength > 0");
  }

  AudioSignal stego = cover;
  size_t clipped = 0;
  for (size_t i = 0; i < used; ++i) {
    const double v = stego.samples[i] + alpha * watermark[i];
    if (v > 1.0 || v < -1.0) ++clipped;
    stego.samples[i] = v;
  }
  stego.requantize();

  if (stats) {
    stats->alpha = alpha;
    stats->clipped_samples = clipped;
    stats->pre_clip_snr_db =
        alpha > 0.0 ? 10.0 * std::log10(cover_energy / (alpha * alpha * used))
                    : std::numeric_limits<double>::infinity();
  }
  return stego;
}

std::vector<size_t> cox_selected_indices(const AudioSignal& cover, size_t n_coeffs) {
  if (cover.size() < 2 * n_coeffs)
    raise(Errc::signal_too_short, "cover shorter than 2 * n_coeffs");
  const std::vector<double> coeffs = dct2(cover.samples);
  std::vector<size_t> idx(coeffs.size() - 1);
  std::iota(idx.begin(), idx.end(), 1);  // AC only, DC never modified
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return std::abs(coeffs[a]) > std::abs(coeffs[b]);
  });
  idx.resize(n_coeffs);
  std::sort(idx.begin(), idx.end());
  return idx;
}

AudioSignal cox_embed(const AudioSignal& cover, const Payload& payload, const EmbedConfig& cfg,
                      EmbedStats* stats) {
  if (cfg.strength < 0.0) raise(Errc::bad_config, "cox strength must be nonnegative");
  const std::vector<size_t> selected = cox_selected_indices(cover, kCoxCoeffs);

  std::vector<double> coeffs = dct2(cover.samples);
  Rng rng(cfg.seed);
  const double alpha = cfg.strength;
  for (size_t i = 0; i < selected.size(); ++i) {
    const double mag = std::abs(rng.normal());
    const int bit = payload.size() ? payload.bits[i % payload.size()] : 1;
    const double x = bit ? mag : -mag;
    coeffs[selected[i]] *= 1.0 + alpha * x;
  }

  AudioSignal stego = cover;
  stego.samples = idct2(coeffs);
  size_t clipped = 0;
  for (double v : stego.samples)
    if (v > 1.0 || v < -1.0) ++clipped;
  stego.requantize();

  if (stats) {
    stats->alpha = alpha;
    stats->clipped_samples = clipped;
    stats->pre_clip_snr_db = snr_db(cover, stego);
  }
  return stego;
}

AudioSignal embed(const AudioSignal& cover, const Payload& payload, const EmbedConfig& cfg,
                  EmbedStats* stats) {
  switch (cfg.algorithm) {
    case EmbedAlgo::lsb_replace: return lsb_replace_embed(cover, payload, cfg);
    case EmbedAlgo::lsb_match: return lsb_match_embed(cover, payload, cfg);
    case EmbedAlgo::dsss: return dsss_embed(cover, payload, cfg, stats);
    case EmbedAlgo::cox_dct: return cox_embed(cover, payload, cfg, stats);
  }
  raise(Errc::bad_config, "unknown embedding algorithm");
}

}  // namespace rmsteg
