#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

namespace mla::detail {
namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const int nh = n / 2 + 1;
  double* real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
  fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(n) * nh);
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c_2d(n, n, real, spec, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.c2r = fftw_plan_dft_c2r_2d(n, n, spec, real, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(real);
  fftw_free(spec);
  return cache.emplace(n, p).first->second;
}

}  // namespace

void fft_forward(int n, std::span<const double> physical, std::span<std::complex<double>> full) {
  const int nh = n / 2 + 1;
  const auto& p = plans_for(n);
  std::vector<double> in(physical.begin(), physical.end());
  std::vector<std::complex<double>> half(static_cast<std::size_t>(n) * nh);
  fftw_execute_dft_r2c(p.r2c, in.data(), reinterpret_cast<fftw_complex*>(half.data()));
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int i1 = 0; i1 < n; ++i1) {
    const int j1 = (n - i1) % n;
    for (int i2 = 0; i2 < nh; ++i2) {
      const auto c = half[static_cast<std::size_t>(i1) * nh + i2] * scale;
      full[static_cast<std::size_t>(i1) * n + i2] = c;
      const int j2 = (n - i2) % n;
      full[static_cast<std::size_t>(j1) * n + j2] = std::conj(c);
    }
  }
  // Self-conjugate entries (k = -k mod n) must be real.
  for (int i1 : {0, n / 2}) {
    for (int i2 : {0, n / 2}) {
      auto& c = full[static_cast<std::size_t>(i1) * n + i2];
      c = {c.real(), 0.0};
    }
  }
}

void fft_inverse(int n, std::span<const std::complex<double>> full, std::span<double> physical) {
  const int nh = n / 2 + 1;
  const auto& p = plans_for(n);
  std::vector<std::complex<double>> half(static_cast<std::size_t>(n) * nh);
  for (int i1 = 0; i1 < n; ++i1) {
    std::copy_n(full.begin() + static_cast<std::ptrdiff_t>(i1) * n, nh,
                half.begin() + static_cast<std::ptrdiff_t>(i1) * nh);
  }
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(half.data()), physical.data());
}

}  // namespace mla::detail
