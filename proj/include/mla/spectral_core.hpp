#pragma once

// Truncated Fourier representation of real, zero-mean scalar fields on the
// 2*pi-periodic square torus, together with the Fourier-multiplier operators
// and the dealiased pseudospectral Jacobian.
//
// A field is stored as f(x) = sum_k c_k exp(i k.x) over the full n x n
// spectral index set. Coefficients obey c_{-k} = conj(c_k), c_0 = 0, and the
// Nyquist row/column is always zero.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace mla {

using Complex = std::complex<double>;

/// Least nonzero eigenvalue of -Laplacian on the 2*pi square torus.
inline constexpr double kLambda1Torus = 1.0;

struct WaveVector {
  int k1 = 0;
  int k2 = 0;

  [[nodiscard]] int norm_sq() const { return k1 * k1 + k2 * k2; }
  friend bool operator==(const WaveVector&, const WaveVector&) = default;
};

class SpectralGrid {
 public:
  /// n_modes must be even and >= 8; dealias_fraction in (0, 1].
  explicit SpectralGrid(int n_modes, double dealias_fraction = 2.0 / 3.0);

  [[nodiscard]] int n_modes() const { return n_; }
  [[nodiscard]] double dealias_fraction() const { return dealias_fraction_; }
  /// Largest |k_i| kept by the dealiased product: strictly below fraction * n / 2.
  [[nodiscard]] int cutoff() const { return cutoff_; }
  /// Largest representable |k_i| (Nyquist excluded).
  [[nodiscard]] int kmax() const { return n_ / 2 - 1; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  [[nodiscard]] bool representable(int k1, int k2) const;
  /// Flat index of wavevector (k1, k2); requires representable(k1, k2).
  [[nodiscard]] std::size_t index(int k1, int k2) const;
  /// Signed wavenumber stored at array position i (0 <= i < n).
  [[nodiscard]] int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }

  friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) {
    return a.n_ == b.n_ && a.dealias_fraction_ == b.dealias_fraction_;
  }

 private:
  int n_;
  double dealias_fraction_;
  int cutoff_;
};

class ScalarField {
 public:
  explicit ScalarField(const SpectralGrid& grid);

  /// Samples on the n x n physical grid, x_j = 2*pi*j/n, row-major in (x1, x2).
  /// The mean and the Nyquist content are dropped.
  static ScalarField from_physical(const SpectralGrid& grid, std::span<const double> values);

  /// a*cos(k.x) and a*sin(k.x).
  static ScalarField cos_mode(const SpectralGrid& grid, int k1, int k2, double amplitude = 1.0);
  static ScalarField sin_mode(const SpectralGrid& grid, int k1, int k2, double amplitude = 1.0);

  /// Random Hermitian field with independent Gaussian coefficients for 1 <= |k|_inf <= kmax,
  /// scaled by (1 + |k|^2)^(-decay/2).
  static ScalarField random(const SpectralGrid& grid, std::uint64_t seed, int kmax,
                            double amplitude = 1.0, double decay = 2.0);

  [[nodiscard]] const SpectralGrid& grid() const { return grid_; }

  /// Zero for wavevectors outside the representable range.
  [[nodiscard]] Complex coeff(int k1, int k2) const;
  /// Sets c_k and c_{-k} = conj(value). Setting (0,0) or a Nyquist entry to nonzero throws.
  void set_coeff(int k1, int k2, Complex value);

  [[nodiscard]] std::span<const Complex> coeffs() const { return coeffs_; }
  /// Raw access for kernels that preserve Hermitian symmetry themselves.
  [[nodiscard]] std::span<Complex> mutable_coeffs() { return coeffs_; }

  /// Physical values on an n_phys x n_phys grid (n_phys >= n_modes, even): spectral interpolation.
  [[nodiscard]] std::vector<double> to_physical(int n_phys = 0) const;

  /// Zeroes every coefficient with |k1| or |k2| above kmax.
  void truncate(int kmax);
  /// Restores exact Hermitian symmetry and pins the mean and Nyquist entries to zero.
  void enforce_symmetry();

  [[nodiscard]] double max_abs_coeff() const;
  [[nodiscard]] bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, double f) { return a *= f; }
  friend ScalarField operator*(double f, ScalarField a) { return a *= f; }

 private:
  void require_same_grid(const ScalarField& other) const;

  SpectralGrid grid_;
  std::vector<Complex> coeffs_;
};

struct VectorField2 {
  ScalarField u1;
  ScalarField u2;
};

struct FieldNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h2_semi = 0.0;
};

ScalarField laplacian(const ScalarField& f);
/// Inverse Laplacian on zero-mean fields.
ScalarField inv_laplacian(const ScalarField& f);
/// (I - alpha^2 Laplacian)^{-1}.
ScalarField helmholtz_inv(const ScalarField& f, double alpha);
/// (I - alpha^2 Laplacian).
ScalarField helmholtz(const ScalarField& f, double alpha);
ScalarField d1(const ScalarField& f);
ScalarField d2(const ScalarField& f);

/// Dealiased J(a, b) = d1 a d2 b - d2 a d1 b. Inputs are truncated to the grid
/// cutoff before the product and the result is truncated after it.
ScalarField jacobian(const ScalarField& a, const ScalarField& b);

/// u = (-d2 psi, d1 psi).
VectorField2 velocity_from_stream(const ScalarField& psi);
ScalarField divergence(const VectorField2& u);

/// L2 inner product over the torus, including the (2*pi)^2 volume factor.
double inner_product(const ScalarField& a, const ScalarField& b);
FieldNorms norms(const ScalarField& f);

/// Largest pointwise speed of a velocity field on its physical grid.
double max_speed(const VectorField2& u);

}  // namespace mla
