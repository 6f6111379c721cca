#include "mla/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fft.hpp"
#include "mla/errors.hpp"

namespace mla {

SpectralGrid::SpectralGrid(int n_modes, double dealias_fraction)
    : n_(n_modes), dealias_fraction_(dealias_fraction) {
  if (n_modes < 8 || n_modes % 2 != 0) {
    throw ValidationError("n_modes must be even and >= 8, got " + std::to_string(n_modes));
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw ValidationError("dealias_fraction must lie in (0, 1]");
  }
  cutoff_ = static_cast<int>(std::ceil(dealias_fraction * n_modes / 2.0)) - 1;
  cutoff_ = std::clamp(cutoff_, 1, kmax());
}

bool SpectralGrid::representable(int k1, int k2) const {
  return std::abs(k1) <= kmax() && std::abs(k2) <= kmax();
}

std::size_t SpectralGrid::index(int k1, int k2) const {
  const int i1 = k1 < 0 ? k1 + n_ : k1;
  const int i2 = k2 < 0 ? k2 + n_ : k2;
  return static_cast<std::size_t>(i1) * n_ + i2;
}

ScalarField::ScalarField(const SpectralGrid& grid) : grid_(grid), coeffs_(grid.size()) {}

ScalarField ScalarField::from_physical(const SpectralGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw ValidationError("physical sample count does not match grid");
  ScalarField f(grid);
  detail::fft_forward(grid.n_modes(), values, f.coeffs_);
  f.enforce_symmetry();
  return f;
}

ScalarField ScalarField::cos_mode(const SpectralGrid& grid, int k1, int k2, double amplitude) {
  ScalarField f(grid);
  f.set_coeff(k1, k2, {amplitude / 2.0, 0.0});
  return f;
}

ScalarField ScalarField::sin_mode(const SpectralGrid& grid, int k1, int k2, double amplitude) {
  ScalarField f(grid);
  f.set_coeff(k1, k2, {0.0, -amplitude / 2.0});
  return f;
}

ScalarField ScalarField::random(const SpectralGrid& grid, std::uint64_t seed, int kmax,
                                double amplitude, double decay) {
  kmax = std::min(kmax, grid.kmax());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ScalarField f(grid);
  // Independent half-plane: k2 > 0, or k2 == 0 and k1 > 0.
  for (int k2 = 0; k2 <= kmax; ++k2) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      const double w = amplitude * std::pow(1.0 + k1 * k1 + k2 * k2, -decay / 2.0);
      const double re = normal(rng);
      const double im = normal(rng);
      f.set_coeff(k1, k2, {w * re, w * im});
    }
  }
  return f;
}

Complex ScalarField::coeff(int k1, int k2) const {
  if (!grid_.representable(k1, k2)) return {};
  return coeffs_[grid_.index(k1, k2)];
}

void ScalarField::set_coeff(int k1, int k2, Complex value) {
  if (!grid_.representable(k1, k2)) {
    if (value == Complex{}) return;
    throw ValidationError("wavevector (" + std::to_string(k1) + "," + std::to_string(k2) +
                          ") is not representable on this grid");
  }
  if (k1 == 0 && k2 == 0) {
    if (value != Complex{}) throw ValidationError("the (0,0) coefficient is pinned to zero");
    return;
  }
  coeffs_[grid_.index(k1, k2)] = value;
  coeffs_[grid_.index(-k1, -k2)] = std::conj(value);
}

std::vector<double> ScalarField::to_physical(int n_phys) const {
  const int n = grid_.n_modes();
  if (n_phys == 0) n_phys = n;
  if (n_phys < n || n_phys % 2 != 0) throw ValidationError("n_phys must be even and >= n_modes");
  std::vector<Complex> padded(static_cast<std::size_t>(n_phys) * n_phys);
  const int km = grid_.kmax();
  for (int k1 = -km; k1 <= km; ++k1) {
    const int i1 = k1 < 0 ? k1 + n_phys : k1;
    for (int k2 = -km; k2 <= km; ++k2) {
      const int i2 = k2 < 0 ? k2 + n_phys : k2;
      padded[static_cast<std::size_t>(i1) * n_phys + i2] = coeff(k1, k2);
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n_phys) * n_phys);
  detail::fft_inverse(n_phys, padded, out);
  return out;
}

void ScalarField::truncate(int kmax) {
  const int n = grid_.n_modes();
  for (int i1 = 0; i1 < n; ++i1) {
    const bool drop1 = std::abs(grid_.wavenumber(i1)) > kmax;
    for (int i2 = 0; i2 < n; ++i2) {
      if (drop1 || std::abs(grid_.wavenumber(i2)) > kmax) {
        coeffs_[static_cast<std::size_t>(i1) * n + i2] = {};
      }
    }
  }
}

void ScalarField::enforce_symmetry() {
  const int n = grid_.n_modes();
  const int km = grid_.kmax();
  for (int k1 = -km; k1 <= km; ++k1) {
    for (int k2 = 0; k2 <= km; ++k2) {
      if (k2 == 0 && k1 < 0) continue;
      const auto i = grid_.index(k1, k2);
      const auto j = grid_.index(-k1, -k2);
      const Complex avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
      coeffs_[i] = avg;
      coeffs_[j] = std::conj(avg);
    }
  }
  coeffs_[0] = {};
  for (int i = 0; i < n; ++i) {
    coeffs_[static_cast<std::size_t>(n / 2) * n + i] = {};
    coeffs_[static_cast<std::size_t>(i) * n + n / 2] = {};
  }
}

double ScalarField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

void ScalarField::require_same_grid(const ScalarField& other) const {
  if (!(grid_ == other.grid_)) throw ValidationError("fields live on different spectral grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double factor) {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

namespace {

template <class Symbol>
ScalarField apply_multiplier(const ScalarField& f, Symbol symbol) {
  ScalarField out(f.grid());
  const auto& g = f.grid();
  const int n = g.n_modes();
  auto in = f.coeffs();
  auto dst = out.mutable_coeffs();
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = g.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = g.wavenumber(i2);
      const auto idx = static_cast<std::size_t>(i1) * n + i2;
      if (in[idx] == Complex{}) continue;
      dst[idx] = symbol(k1, k2) * in[idx];
    }
  }
  return out;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw ValidationError("fields live on different spectral grids");
}

}  // namespace

ScalarField laplacian(const ScalarField& f) {
  return apply_multiplier(f, [](int k1, int k2) { return Complex(-double(k1 * k1 + k2 * k2)); });
}

ScalarField inv_laplacian(const ScalarField& f) {
  if (std::abs(f.coeff(0, 0)) > 1e-14) throw ValidationError("inv_laplacian requires a zero-mean field");
  return apply_multiplier(f, [](int k1, int k2) {
    const int k2sum = k1 * k1 + k2 * k2;
    return k2sum == 0 ? Complex{} : Complex(-1.0 / k2sum);
  });
}

ScalarField helmholtz_inv(const ScalarField& f, double alpha) {
  if (alpha < 0.0) throw ValidationError("alpha must be nonnegative");
  const double a2 = alpha * alpha;
  return apply_multiplier(f, [a2](int k1, int k2) { return Complex(1.0 / (1.0 + a2 * (k1 * k1 + k2 * k2))); });
}

ScalarField helmholtz(const ScalarField& f, double alpha) {
  if (alpha < 0.0) throw ValidationError("alpha must be nonnegative");
  const double a2 = alpha * alpha;
  return apply_multiplier(f, [a2](int k1, int k2) { return Complex(1.0 + a2 * (k1 * k1 + k2 * k2)); });
}

ScalarField d1(const ScalarField& f) {
  return apply_multiplier(f, [](int k1, int) { return Complex(0.0, k1); });
}

ScalarField d2(const ScalarField& f) {
  return apply_multiplier(f, [](int, int k2) { return Complex(0.0, k2); });
}

ScalarField jacobian(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  const auto& g = a.grid();
  const int kc = g.cutoff();
  ScalarField at = a;
  ScalarField bt = b;
  at.truncate(kc);
  bt.truncate(kc);
  const auto a1 = d1(at).to_physical();
  const auto a2 = d2(at).to_physical();
  const auto b1 = d1(bt).to_physical();
  const auto b2 = d2(bt).to_physical();
  std::vector<double> prod(a1.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a1[i] * b2[i] - a2[i] * b1[i];
  ScalarField out = ScalarField::from_physical(g, prod);
  out.truncate(kc);
  return out;
}

VectorField2 velocity_from_stream(const ScalarField& psi) {
  ScalarField u1 = d2(psi);
  u1 *= -1.0;
  return {std::move(u1), d1(psi)};
}

ScalarField divergence(const VectorField2& u) {
  return d1(u.u1) + d2(u.u2);
}

double inner_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  double sum = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) sum += (ca[i] * std::conj(cb[i])).real();
  return sum * 4.0 * std::numbers::pi * std::numbers::pi;
}

FieldNorms norms(const ScalarField& f) {
  const auto& g = f.grid();
  const int n = g.n_modes();
  auto c = f.coeffs();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = g.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = g.wavenumber(i2);
      const double m = std::norm(c[static_cast<std::size_t>(i1) * n + i2]);
      const double ksq = double(k1 * k1 + k2 * k2);
      s0 += m;
      s1 += ksq * m;
      s2 += ksq * ksq * m;
    }
  }
  const double vol = 4.0 * std::numbers::pi * std::numbers::pi;
  return {std::sqrt(vol * s0), std::sqrt(vol * s1), std::sqrt(vol * s2)};
}

double max_speed(const VectorField2& u) {
  const auto p1 = u.u1.to_physical();
  const auto p2 = u.u2.to_physical();
  double m = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) m = std::max(m, std::hypot(p1[i], p2[i]));
  return m;
}

}  // namespace mla
