#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rmsteg {

/// Mono PCM signal. `raw` holds the integer samples exactly as stored on
/// disk; `samples` is the same data normalized by 2^(bit_depth-1). Both views
/// are kept in sync so bit-level embedding and float DSP share one object.
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = 44100;
  int bit_depth = 16;
  std::vector<int32_t> raw;

  size_t size() const { return raw.size(); }

  /// Builds the normalized view from raw integers.
  static AudioSignal from_raw(std::vector<int32_t> raw, int sample_rate, int bit_depth);

  /// Clamps `samples` to [-1, 1], rounds to the integer grid and rebuilds
  /// both views. Used by embedders that work in the float domain.
  void requantize();
};

struct Frame {
  std::vector<double> values;
  size_t start_index = 0;
};

/// Central second difference y[n] = x[n+2] - 2 x[n+1] + x[n]; output is two
/// samples shorter than the input.
std::vector<double> second_derivative(std::span<const double> x);

/// Scales to unit peak; all-zero input passes through unchanged.
std::vector<double> peak_normalize(std::span<const double> x);

/// Splits into full frames starting at 0, hop, 2*hop, ...; a trailing
/// remainder shorter than frame_len is dropped.
std::vector<Frame> frame_signal(std::span<const double> x, size_t frame_len = 1024,
                                size_t hop = 512);

/// 10*log10(sum cover^2 / sum (cover-stego)^2); +infinity when identical.
double snr_db(const AudioSignal& cover, const AudioSignal& stego);

/// Payload size as a percentage of the cover size in bits.
double bpb_percent(long long payload_bits, const AudioSignal& cover);

}  // namespace rmsteg
