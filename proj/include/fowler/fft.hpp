#pragma once

// Thin FFTW wrapper: unnormalized complex DFTs of arbitrary length with a
// process-wide plan cache. Plans are created under a mutex (FFTW planning is
// not reentrant); executing a plan on new arrays is thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fowler::fft {

enum class Direction { forward, backward };

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, Direction dir) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, dir);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // Planning with FFTW_ESTIMATE never touches the arrays, so scratch
    // buffers are only needed to satisfy the interface.
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
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
  std::map<std::pair<std::size_t, Direction>, fftw_plan> plans_;
};

}  // namespace detail

/// out[k] = sum_j in[j] exp(-+2 pi i j k / n), no normalization.
inline void transform(std::span<const std::complex<double>> in,
                      std::span<std::complex<double>> out, Direction dir) {
  if (in.size() != out.size()) throw std::invalid_argument("fft: size mismatch");
  if (in.empty()) return;
  fftw_plan plan = detail::PlanCache::instance().get(in.size(), dir);
  if (in.data() == out.data()) {
    // Cached plans are out-of-place; new-array execution must match that.
    std::vector<std::complex<double>> copy(in.begin(), in.end());
    transform(copy, out, dir);
    return;
  }
  // new-array execute does not modify the input for out-of-place plans.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, src, dst);
}

inline const char* backend_version() { return fftw_version; }

}  // namespace fowler::fft
