#include "valence/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "valence/error.hpp"

namespace valence {

namespace {

// The FFTW planner is not re-entrant; execution on distinct arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(n); it != plans_.end()) return it->second;
    std::vector<double> in(static_cast<size_t>(n));
    std::vector<fftw_complex> out(static_cast<size_t>(n / 2 + 1));
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) fail(ErrorCode::kNumerical, "FFT planning failed");
    plans_.emplace(n, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::vector<std::complex<double>> real_fft(std::span<const double> x) {
  require(!x.empty(), "FFT of empty sequence");
  const int n = static_cast<int>(x.size());
  fftw_plan plan = plan_cache().get(n);
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(static_cast<size_t>(n / 2 + 1));
  fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace valence
