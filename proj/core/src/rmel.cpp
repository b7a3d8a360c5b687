#include "rmsteg/rmel.hpp"

#include <cmath>
#include <numbers>

#include "rmsteg/csv.hpp"
#include "rmsteg/error.hpp"
#include "rmsteg/fft.hpp"

namespace rmsteg {
namespace {

constexpr double kLogFloor = 1e-10;

std::vector<double> hamming_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  return w;
}

}  // namespace

double rmel_of_hz(double f_hz, double fs_hz) {
  if (f_hz < 0.0 || f_hz > fs_hz / 2.0)
    raise(Errc::out_of_band, "frequency outside [0, fs/2]");
  return 1127.0 * std::log(1.0 + (0.5 * fs_hz - f_hz) / 700.0);
}

double hz_of_rmel(double rmel, double fs_hz) {
  if (rmel < 0.0 || rmel > rmel_of_hz(0.0, fs_hz))
    raise(Errc::out_of_band, "reversed-Mel value outside [0, rmel(0)]");
  return 0.5 * fs_hz - 700.0 * (std::exp(rmel / 1127.0) - 1.0);
}

RMelFilterbank build_filterbank(int sample_rate, size_t n_fft, size_t n_filters) {
  if (n_filters < 2) raise(Errc::bad_config, "need at least 2 filters");
  if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0) raise(Errc::bad_config, "n_fft must be a power of two");
  if (sample_rate <= 0) raise(Errc::bad_config, "sample rate must be positive");

  RMelFilterbank bank;
  bank.sample_rate = sample_rate;
  bank.n_fft = n_fft;
  bank.n_filters = n_filters;

  const double fs = static_cast<double>(sample_rate);
  const double rmel_max = rmel_of_hz(0.0, fs);

  // n_filters + 2 boundary points, equally spaced on the reversed-Mel axis.
  // Mapped back to Hz they descend from Nyquist to 0; filter m peaks at
  // boundary m and spans its two neighbours.
  std::vector<double> bounds_hz(n_filters + 2);
  for (size_t i = 0; i < bounds_hz.size(); ++i)
    bounds_hz[i] = hz_of_rmel(rmel_max * static_cast<double>(i) / (n_filters + 1), fs);

  const size_t n_bins = n_fft / 2 + 1;
  bank.centers_hz.resize(n_filters);
  bank.weights.assign(n_filters, std::vector<double>(n_bins, 0.0));
  for (size_t m = 1; m <= n_filters; ++m) {
    const double lo = bounds_hz[m + 1];   // lower Hz edge
    const double center = bounds_hz[m];
    const double hi = bounds_hz[m - 1];   // upper Hz edge
    bank.centers_hz[m - 1] = center;
    for (size_t b = 0; b < n_bins; ++b) {
      const double f = fs * static_cast<double>(b) / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lo && f <= center)
        w = (f - lo) / (center - lo);
      else if (f > center && f < hi)
        w = (hi - f) / (hi - center);
      bank.weights[m - 1][b] = w;
    }
  }
  return bank;
}

std::array<double, kNumCoeffs> rmfcc_frame(const Frame& frame, const RMelFilterbank& bank) {
  const size_t n = bank.n_fft;
  if (frame.values.size() != n)
    raise(Errc::bank_mismatch, "frame length does not match filterbank n_fft");

  static thread_local std::vector<double> windowed;
  static thread_local std::vector<double> power;
  static thread_local std::vector<double> window;
  windowed.resize(n);
  power.resize(n / 2 + 1);
  if (window.size() != n) window = hamming_window(n);

  for (size_t i = 0; i < n; ++i) windowed[i] = frame.values[i] * window[i];

  thread_local RealDft dft(kFrameLen);
  if (dft.size() != n) dft = RealDft(n);
  dft.power_spectrum(windowed, power);

  std::vector<double> log_energy(bank.n_filters);
  for (size_t m = 0; m < bank.n_filters; ++m) {
    double e = 0.0;
    const std::vector<double>& w = bank.weights[m];
    for (size_t b = 0; b < power.size(); ++b) e += w[b] * power[b];
    log_energy[m] = std::log(e + kLogFloor);
  }

  // Orthonormal DCT-II, keeping coefficients 1..kNumCoeffs.
  const size_t nf = bank.n_filters;
  std::array<double, kNumCoeffs> out{};
  const double norm = std::sqrt(2.0 / static_cast<double>(nf));
  for (size_t k = 1; k <= kNumCoeffs && k < nf + 1; ++k) {
    double acc = 0.0;
    for (size_t m = 0; m < nf; ++m)
      acc += log_energy[m] *
             std::cos(std::numbers::pi * static_cast<double>(k) * (2.0 * m + 1.0) /
                      (2.0 * static_cast<double>(nf)));
    out[k - 1] = norm * acc;
  }
  return out;
}

RmfccMatrix rmfcc_signal(const AudioSignal& x, const RMelFilterbank& bank) {
  const std::vector<double> normalized = peak_normalize(x.samples);
  if (normalized.size() < kFrameLen + 2)
    raise(Errc::signal_too_short, "signal yields no full frame after preprocessing");
  const std::vector<double> diff = second_derivative(normalized);
  const std::vector<Frame> frames = frame_signal(diff, bank.n_fft, kFrameHop);
  if (frames.empty()) raise(Errc::signal_too_short, "signal yields no full frame");

  RmfccMatrix m;
  m.n_frames = frames.size();
  m.values.resize(frames.size() * kNumCoeffs);
  for (size_t f = 0; f < frames.size(); ++f) {
    const std::array<double, kNumCoeffs> c = rmfcc_frame(frames[f], bank);
    for (size_t j = 0; j < kNumCoeffs; ++j) m.values[f * kNumCoeffs + j] = c[j];
  }
  return m;
}

HosStats hos_stats(const RmfccMatrix& m) {
  if (m.n_frames < 2) raise(Errc::too_few_frames, "need at least 2 frames for statistics");
  HosStats s;
  const double n = static_cast<double>(m.n_frames);
  for (size_t j = 0; j < kNumCoeffs; ++j) {
    double mu = 0.0;
    for (size_t f = 0; f < m.n_frames; ++f) mu += m.at(f, j);
    mu /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (size_t f = 0; f < m.n_frames; ++f) {
      const double d = m.at(f, j) - mu;
      const double d2 = d * d;
      m2 += d2;
      m3 += d2 * d;
      m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.mean[j] = mu;
    s.std_dev[j] = std::sqrt(m2);
    if (m2 < 1e-12) {
      s.skewness[j] = 0.0;
      s.kurtosis[j] = 0.0;
    } else {
      s.skewness[j] = m3 / std::pow(m2, 1.5);
      s.kurtosis[j] = m4 / (m2 * m2);
    }
  }
  return s;
}

std::string rmfcc_matrix_csv(const RmfccMatrix& m) {
  std::string out;
  for (size_t j = 1; j <= kNumCoeffs; ++j) {
    if (j > 1) out += ',';
    out += "c" + std::to_string(j);
  }
  out += '\n';
  for (size_t f = 0; f < m.n_frames; ++f) {
    for (size_t j = 0; j < kNumCoeffs; ++j) {
      if (j) out += ',';
      out += format_double(m.at(f, j));
    }
    out += '\n';
  }
  return out;
}

std::string hos_stats_csv(const HosStats& s) {
  std::string out = "statistic";
  for (size_t j = 1; j <= kNumCoeffs; ++j) out += ",c" + std::to_string(j);
  out += '\n';
  const std::array<std::pair<const char*, const std::array<double, kNumCoeffs>*>, 4> rows = {
      std::make_pair("mean", &s.mean), std::make_pair("std", &s.std_dev),
      std::make_pair("skewness", &s.skewness), std::make_pair("kurtosis", &s.kurtosis)};
  for (const auto& [name, vals] : rows) {
    out += name;
    for (size_t j = 0; j < kNumCoeffs; ++j) out += "," + format_double((*vals)[j]);
    out += '\n';
  }
  return out;
}

}  // namespace rmsteg
