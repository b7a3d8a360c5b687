#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rmsteg/audio.hpp"

namespace rmsteg {

inline constexpr size_t kNumCoeffs = 29;      // cepstral coefficients kept per frame
inline constexpr size_t kNumFilters = 30;     // filterbank size (coefficient 0 is dropped)
inline constexpr size_t kFrameLen = 1024;
inline constexpr size_t kFrameHop = 512;

/// Reversed-Mel value of a frequency: 1127 * ln(1 + (fs/2 - f) / 700).
/// Strictly decreasing in f; zero at Nyquist.
double rmel_of_hz(double f_hz, double fs_hz);

/// Inverse map: f = fs/2 - 700 * (exp(r / 1127) - 1).
double hz_of_rmel(double rmel, double fs_hz);

/// Triangular filterbank with centers equally spaced on the reversed-Mel
/// axis, so frequency resolution is finest near Nyquist.
struct RMelFilterbank {
  int sample_rate = 44100;
  size_t n_fft = kFrameLen;
  size_t n_filters = kNumFilters;
  std::vector<double> centers_hz;             // n_filters entries, descending
  std::vector<std::vector<double>> weights;   // n_filters x (n_fft/2 + 1)
};

RMelFilterbank build_filterbank(int sample_rate, size_t n_fft = kFrameLen,
                                size_t n_filters = kNumFilters);

/// Cepstral coefficients 1..29 of one frame: Hamming window, power spectrum,
/// filterbank energies, log with floor 1e-10, orthonormal DCT-II. The 0th
/// coefficient (overall energy) is excluded, which makes the result invariant
/// to positive scaling of the frame.
std::array<double, kNumCoeffs> rmfcc_frame(const Frame& frame, const RMelFilterbank& bank);

struct RmfccMatrix {
  size_t n_frames = 0;
  std::vector<double> values;  // row-major, n_frames x kNumCoeffs
  std::string source_id;

  double& at(size_t frame, size_t coeff) { return values[frame * kNumCoeffs + coeff]; }
  double at(size_t frame, size_t coeff) const { return values[frame * kNumCoeffs + coeff]; }
};

/// Full per-signal pipeline: peak-normalize, second derivative, 1024/512
/// framing, per-frame coefficients.
RmfccMatrix rmfcc_signal(const AudioSignal& x, const RMelFilterbank& bank);

/// Per-column mean, standard deviation, skewness and kurtosis (population
/// moments, non-excess kurtosis). Columns with second moment below 1e-12 get
/// skewness and kurtosis 0.
struct HosStats {
  std::array<double, kNumCoeffs> mean{};
  std::array<double, kNumCoeffs> std_dev{};
  std::array<double, kNumCoeffs> skewness{};
  std::array<double, kNumCoeffs> kurtosis{};
};

HosStats hos_stats(const RmfccMatrix& m);

/// CSV export: one headered row per frame (matrix) / per statistic (stats).
std::string rmfcc_matrix_csv(const RmfccMatrix& m);
std::string hos_stats_csv(const HosStats& s);

}  // namespace rmsteg
