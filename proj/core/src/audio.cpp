#include "rmsteg/audio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmsteg/error.hpp"

namespace rmsteg {

AudioSignal AudioSignal::from_raw(std::vector<int32_t> raw, int sample_rate, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) raise(Errc::bad_config, "bit depth must be 8 or 16");
  if (sample_rate <= 0) raise(Errc::bad_config, "sample rate must be positive");
  AudioSignal s;
  s.sample_rate = sample_rate;
  s.bit_depth = bit_depth;
  s.raw = std::move(raw);
  const double scale = static_cast<double>(1 << (bit_depth - 1));
  s.samples.resize(s.raw.size());
  for (size_t i = 0; i < s.raw.size(); ++i) s.samples[i] = s.raw[i] / scale;
  return s;
}

void AudioSignal::requantize() {
  const double scale = static_cast<double>(1 << (bit_depth - 1));
  const int32_t lo = -static_cast<int32_t>(scale);
  const int32_t hi = static_cast<int32_t>(scale) - 1;
  raw.resize(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    double v = std::clamp(samples[i], -1.0, 1.0);
    raw[i] = std::clamp(static_cast<int32_t>(std::llround(v * scale)), lo, hi);
    samples[i] = raw[i] / scale;
  }
}

std::vector<double> second_derivative(std::span<const double> x) {
  if (x.size() < 3) raise(Errc::too_short, "second derivative needs at least 3 samples");
  std::vector<double> y(x.size() - 2);
  for (size_t n = 0; n + 2 < x.size(); ++n) y[n] = x[n + 2] - 2.0 * x[n + 1] + x[n];
  return y;
}

std::vector<double> peak_normalize(std::span<const double> x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  std::vector<double> y(x.begin(), x.end());
  if (peak == 0.0) return y;
  for (double& v : y) v /= peak;
  return y;
}

std::vector<Frame> frame_signal(std::span<const double> x, size_t frame_len, size_t hop) {
  if (frame_len == 0 || hop == 0 || hop > frame_len)
    raise(Errc::bad_config, "need frame_len > 0 and 0 < hop <= frame_len");
  std::vector<Frame> frames;
  if (x.size() < frame_len) return frames;
  frames.reserve((x.size() - frame_len) / hop + 1);
  for (size_t start = 0; start + frame_len <= x.size(); start += hop) {
    Frame f;
    f.start_index = start;
    f.values.assign(x.begin() + start, x.begin() + start + frame_len);
    frames.push_back(std::move(f));
  }
  return frames;
}

double snr_db(const AudioSignal& cover, const AudioSignal& stego) {
  if (cover.size() != stego.size() || cover.sample_rate != stego.sample_rate)
    raise(Errc::length_mismatch, "cover and stego must have equal length and rate");
  double sig = 0.0, noise = 0.0;
  for (size_t i = 0; i < cover.samples.size(); ++i) {
    sig += cover.samples[i] * cover.samples[i];
    const double d = cover.samples[i] - stego.samples[i];
    noise += d * d;
  }
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(sig / noise);
}

double bpb_percent(long long payload_bits, const AudioSignal& cover) {
  if (payload_bits < 0) raise(Errc::bad_config, "payload size must be nonnegative");
  const double cover_bits = static_cast<double>(cover.raw.size()) * cover.bit_depth;
  return 100.0 * static_cast<double>(payload_bits) / cover_bits;
}

}  // namespace rmsteg
