#pragma once

#include <memory>
#include <span>
#include <vector>

namespace rmsteg {

/// Real-input DFT of fixed size n. Instances are cheap to build and reusable
/// across many frames, but not safe to share between threads; give each
/// worker its own.
class RealDft {
 public:
  explicit RealDft(size_t n);
  ~RealDft();
  RealDft(RealDft&&) noexcept;
  RealDft& operator=(RealDft&&) noexcept;
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  size_t size() const;

  /// One-sided power spectrum |X_b|^2, b in [0, n/2]. `power` must have
  /// n/2 + 1 entries.
  void power_spectrum(std::span<const double> frame, std::span<double> power);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// DCT-II of arbitrary length, X_k = 2 sum_n x_n cos(pi k (2n+1) / (2N)).
std::vector<double> dct2(std::span<const double> x);

/// Inverse of dct2 (DCT-III with 1/(2N) scaling).
std::vector<double> idct2(std::span<const double> coeffs);

}  // namespace rmsteg
