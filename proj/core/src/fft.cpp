#include "rmsteg/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "rmsteg/error.hpp"

namespace rmsteg {
namespace {

// FFTW planning is not thread safe; execution of distinct plans is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealDft::Impl {
  size_t n = 0;
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  explicit Impl(size_t size) : n(size) {
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }

  ~Impl() {
    {
      std::lock_guard<std::mutex> lock(plan_mutex());
      if (plan) fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
  }
};

RealDft::RealDft(size_t n) : impl_(std::make_unique<Impl>(n)) {
  if (n < 2) raise(Errc::bad_config, "DFT size must be at least 2");
}
RealDft::~RealDft() = default;
RealDft::RealDft(RealDft&&) noexcept = default;
RealDft& RealDft::operator=(RealDft&&) noexcept = default;

size_t RealDft::size() const { return impl_->n; }

void RealDft::power_spectrum(std::span<const double> frame, std::span<double> power) {
  const size_t n = impl_->n;
  if (frame.size() != n || power.size() != n / 2 + 1)
    raise(Errc::bank_mismatch, "frame/power size does not match DFT size");
  std::memcpy(impl_->in, frame.data(), n * sizeof(double));
  fftw_execute(impl_->plan);
  for (size_t b = 0; b <= n / 2; ++b) {
    const double re = impl_->out[b][0];
    const double im = impl_->out[b][1];
    power[b] = re * re + im * im;
  }
}

std::vector<double> dct2(std::span<const double> x) {
  const size_t n = x.size();
  if (n == 0) raise(Errc::bad_config, "empty DCT input");
  std::vector<double> out(n);
  std::vector<double> in(x.begin(), x.end());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(), FFTW_REDFT10,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> idct2(std::span<const double> coeffs) {
  const size_t n = coeffs.size();
  if (n == 0) raise(Errc::bad_config, "empty DCT input");
  std::vector<double> out(n);
  std::vector<double> in(coeffs.begin(), coeffs.end());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(), FFTW_REDFT01,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace rmsteg
