#ifndef MUSKAT_FFT_HPP
#define MUSKAT_FFT_HPP

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace muskat::fft {

namespace detail {

template <class T>
struct FftwFree {
  void operator()(T* p) const { fftw_free(p); }
};

template <class T>
using AlignedBuffer = std::unique_ptr<T[], FftwFree<T>>;

template <class T>
AlignedBuffer<T> aligned(std::size_t n) {
  return AlignedBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

enum class Kind { RealToComplex, ComplexToReal, Forward, Backward };

/// Process-wide plan cache. FFTW planning is not thread safe, so creation
/// happens under a lock; plans are executed through the new-array interface
/// on freshly allocated (and therefore equally aligned) buffers.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, int n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(static_cast<int>(kind), n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto re = aligned<double>(static_cast<std::size_t>(n));
    auto cx = aligned<fftw_complex>(static_cast<std::size_t>(n));
    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::RealToComplex:
        plan = fftw_plan_dft_r2c_1d(n, re.get(), cx.get(), FFTW_ESTIMATE);
        break;
      case Kind::ComplexToReal:
        plan = fftw_plan_dft_c2r_1d(n, cx.get(), re.get(), FFTW_ESTIMATE);
        break;
      case Kind::Forward:
      case Kind::Backward: {
        auto cx2 = aligned<fftw_complex>(static_cast<std::size_t>(n));
        plan = fftw_plan_dft_1d(n, cx.get(), cx2.get(), kind == Kind::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
        break;
      }
    }
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace detail

/// Unnormalized real-to-complex transform; returns the n/2+1 non-negative
/// frequency bins of sum_j x_j exp(-2 pi i k j / n).
inline std::vector<std::complex<double>> r2c(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  auto in = detail::aligned<double>(x.size());
  auto out = detail::aligned<fftw_complex>(x.size() / 2 + 1);
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute_dft_r2c(detail::PlanCache::instance().get(detail::Kind::RealToComplex, n), in.get(), out.get());
  std::vector<std::complex<double>> result(x.size() / 2 + 1);
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

/// Unnormalized complex-to-real inverse of r2c for a length-n signal.
inline std::vector<double> c2r(std::span<const std::complex<double>> half, std::size_t n) {
  auto in = detail::aligned<fftw_complex>(n / 2 + 1);
  auto out = detail::aligned<double>(n);
  for (std::size_t k = 0; k < n / 2 + 1; ++k) {
    in[k][0] = half[k].real();
    in[k][1] = half[k].imag();
  }
  fftw_execute_dft_c2r(detail::PlanCache::instance().get(detail::Kind::ComplexToReal, static_cast<int>(n)), in.get(),
                       out.get());
  return std::vector<double>(out.get(), out.get() + n);
}

/// Unnormalized complex transform, sign -1 (forward) or +1 (backward).
inline std::vector<std::complex<double>> c2c(std::span<const std::complex<double>> x, bool forward) {
  const std::size_t n = x.size();
  auto in = detail::aligned<fftw_complex>(n);
  auto out = detail::aligned<fftw_complex>(n);
  for (std::size_t k = 0; k < n; ++k) {
    in[k][0] = x[k].real();
    in[k][1] = x[k].imag();
  }
  auto kind = forward ? detail::Kind::Forward : detail::Kind::Backward;
  fftw_execute_dft(detail::PlanCache::instance().get(kind, static_cast<int>(n)), in.get(), out.get());
  std::vector<std::complex<double>> result(n);
  for (std::size_t k = 0; k < n; ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

}  // namespace muskat::fft

#endif  // MUSKAT_FFT_HPP
