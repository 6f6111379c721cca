#pragma once

#include <complex>
#include <span>

namespace mla::detail {

/// 2-D real transforms on an n x n grid, backed by FFTW. Plans are cached per n
/// and created under a lock; execution is re-entrant.
///
/// forward: full[k] = (1/n^2) sum_x f(x) exp(-i k.x), written to the full n x n
/// spectral array with exact Hermitian symmetry.
/// inverse: f(x) = sum_k full[k] exp(i k.x); only the k2 >= 0 half is read.
void fft_forward(int n, std::span<const double> physical, std::span<std::complex<double>> full);
void fft_inverse(int n, std::span<const std::complex<double>> full, std::span<double> physical);

}  // namespace mla::detail
