#include "rmsteg/synth.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "rmsteg/error.hpp"
#include "rmsteg/rng.hpp"

namespace rmsteg {

AudioSignal synth_cover(double duration_s, int sample_rate, uint64_t seed) {
  if (duration_s <= 0.0 || sample_rate <= 0) raise(Errc::bad_config, "bad synthesis spec");
  const size_t n = static_cast<size_t>(std::llround(duration_s * sample_rate));
  const double fs = static_cast<double>(sample_rate);
  Rng rng(seed);

  const size_t n_tones = 2 + rng.below(4);
  std::vector<double> freq(n_tones), amp(n_tones), phase(n_tones);
  for (size_t t = 0; t < n_tones; ++t) {
    freq[t] = std::exp(rng.uniform(std::log(60.0), std::log(0.45 * fs)));
    amp[t] = rng.uniform(0.05, 1.0);
    phase[t] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  std::vector<double> x(n, 0.0);
  for (size_t t = 0; t < n_tones; ++t) {
    const double w = 2.0 * std::numbers::pi * freq[t] / fs;
    for (size_t i = 0; i < n; ++i) x[i] += amp[t] * std::sin(w * i + phase[t]);
  }
  double tone_peak = 0.0;
  for (double v : x) tone_peak = std::max(tone_peak, std::abs(v));

  // Low-pass filtered noise, level log-uniform over several decades relative
  // to the tone peak.
  const double cutoff = std::exp(rng.uniform(std::log(200.0), std::log(0.15 * fs)));
  const double a = 1.0 - std::exp(-2.0 * std::numbers::pi * cutoff / fs);
  const double gain = std::exp(rng.uniform(std::log(1e-5), std::log(3e-2)));
  double y1 = 0.0, y2 = 0.0;
  std::vector<double> noise(n);
  double noise_peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    y1 += a * (rng.normal() - y1);
    y2 += a * (y1 - y2);
    noise[i] = y2;
    noise_peak = std::max(noise_peak, std::abs(y2));
  }
  if (noise_peak > 0.0)
    for (size_t i = 0; i < n; ++i) x[i] += gain * tone_peak * noise[i] / noise_peak;

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double scale = peak > 0.0 ? 0.9 / peak : 0.0;

  std::vector<int32_t> raw(n);
  for (size_t i = 0; i < n; ++i) {
    const int32_t q = static_cast<int32_t>(std::llround(x[i] * scale * 32768.0));
    raw[i] = std::clamp(q, -32768, 32767);
  }
  return AudioSignal::from_raw(std::move(raw), sample_rate, 16);
}

}  // namespace rmsteg
