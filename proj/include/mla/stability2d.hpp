#pragma once

// Linear instability of the Kolmogorov stationary state psi_s on the 2-D torus.
//
// Along a chain of wavevectors (t, s n + r) the eigenproblem around psi_s
// reduces to the three-term recurrence d_n e_n + e_{n-1} - e_{n+1} = 0 with
//
//   d_n = (k^2 + alpha^2 k^4)(k^2 + sigma) / (Lambda t (k^2 - s^2)),  k^2 = t^2 + (s n + r)^2,
//
// which is linear in sigma (= growth rate / nu) and is solved here as the
// generalized eigenproblem A e = sigma B e with A tridiagonal and B diagonal:
//
//   A_nn = -k^2 (k^2 + alpha^2 k^4),  A_{n,n+1} = Lambda t (k^2 - s^2) = -A_{n,n-1},
//   B_nn = k^2 + alpha^2 k^4.

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mla/spectral_core.hpp"

namespace mla {

/// Lambda = lambda / (2 sqrt2 pi (1 + alpha^2 s^2)).
double capital_lambda(double lambda, int s, double alpha);
/// Inverse of capital_lambda.
double lambda_from_capital(double capital, int s, double alpha);

struct RecurrenceProblem {
  int s = 1;
  /// Cross-stream wavenumber. Integer on the square torus; real after a Squire reduction.
  double t = 1.0;
  int r = 0;
  double capital_lambda = 1.0;
  double alpha = 0.0;
  /// Recurrence indices n in [n_lo, n_hi].
  int n_lo = -64;
  int n_hi = 64;

  /// Symmetric window n in [-n_trunc, n_trunc]. Throws if some k_n^2 == s^2.
  static RecurrenceProblem make(int s, double t, int r, double capital_lambda, double alpha, int n_trunc = 64);
  /// Explicit index window, e.g. to match a Galerkin truncation.
  static RecurrenceProblem with_window(int s, double t, int r, double capital_lambda, double alpha, int n_lo,
                                       int n_hi);

  [[nodiscard]] int size() const { return n_hi - n_lo + 1; }
  [[nodiscard]] double kappa_sq(int n) const;
  /// Recurrence coefficient d_n at a given sigma.
  [[nodiscard]] double d(int n, double sigma_hat) const;
  void validate() const;
};

struct GeneralizedEigSystem {
  int n_lo = 0;
  std::vector<double> diag_a;
  /// super_a[i] = A(i, i+1); sub_a[i] = A(i+1, i).
  std::vector<double> super_a;
  std::vector<double> sub_a;
  std::vector<double> diag_b;

  [[nodiscard]] int size() const { return static_cast<int>(diag_a.size()); }
};

GeneralizedEigSystem build_recurrence_system(const RecurrenceProblem& prob);

/// All eigenvalues sigma of A e = sigma B e for the given window.
std::vector<std::complex<double>> chain_spectrum(const RecurrenceProblem& prob);

struct StabilityResult {
  double sigma_hat = 0.0;
  double capital_lambda = 0.0;
  double eigen_residual = 0.0;
  /// Window actually used after refinement.
  int n_lo = 0;
  int n_hi = 0;
  /// Eigenvector e_n over [n_lo, n_hi], normalized to max |e_n| = 1.
  std::vector<double> eigenvector;
  /// max(|e_{n_lo}|, |e_{n_hi}|) after normalization.
  double tail_ratio = 0.0;
};

struct RecurrenceOptions {
  /// Eigenvalues with |Im| < reality_tol (1 + |Re|) count as real.
  double reality_tol = 1e-10;
  /// An eigenvector is decaying when its end entries are below this fraction of its peak.
  double tail_tol = 1e-8;
  /// Refinement stops when sigma moves less than this (relative to 1 + |sigma|).
  double convergence_tol = 1e-10;
  int max_n_trunc = 512;
};

/// Largest real eigenvalue with a decaying eigenvector, doubling the window until
/// it is converged. The result may be negative. Throws NumericalError if none is found.
StabilityResult leading_real_sigma(const RecurrenceProblem& prob, const RecurrenceOptions& options = {});

/// leading_real_sigma when it is positive, otherwise nullopt.
std::optional<StabilityResult> unstable_sigma(const RecurrenceProblem& prob, const RecurrenceOptions& options = {});

/// Two-sided bounds on Lambda_0 for (t, r) in A(delta).
struct LambdaInterval {
  double lower = 0.0;
  double upper = 0.0;
};
/// General form, valid for alpha >= 0.
LambdaInterval lambda0_interval(int s, double alpha, double delta);
/// Sharper form for alpha == 0.
LambdaInterval lambda0_interval_inviscid_filter(int s, double delta);
/// The same bounds expressed for lambda instead of Lambda.
LambdaInterval lambda0_interval_in_lambda(int s, double alpha, double delta);
LambdaInterval lambda0_interval_in_lambda_inviscid_filter(int s, double delta);

/// Lambda_0 with sigma(Lambda_0) = 0, by bisection in log Lambda to relative width rel_tol.
/// The bracket is the general interval widened by a factor 10 on each side.
double lambda0_threshold(int s, double t, int r, double alpha, double delta, double rel_tol = 1e-8,
                         const RecurrenceOptions& options = {});

// --- Region A(delta) ------------------------------------------------------

struct RegionSpec {
  double delta = 0.3;
  int s = 1;

  /// Throws unless 0 < delta < 1/sqrt(3) and s >= 1.
  static RegionSpec make(double delta, int s);
  [[nodiscard]] double r_min() const { return -s / 6.0; }
  [[nodiscard]] double r_max() const { return s / 6.0; }
};

inline constexpr double kDeltaMax = 0.57735026918962576451;  // 1/sqrt(3)

bool region_contains(const RegionSpec& spec, double t, double r);
/// Lattice points (t, r) in A(delta), ordered by t then r.
std::vector<std::pair<int, int>> lattice_points(const RegionSpec& spec);
long long count_lattice(const RegionSpec& spec);

/// a(delta): area of the s-normalized region.
double region_area(double delta);

struct DeltaOptimum {
  double delta_star = 0.0;
  double value = 0.0;  // a(delta*) delta*^{4/3}
};
DeltaOptimum optimize_delta();

// --- Dense oracle -----------------------------------------------------------

struct LinearizationSpectrum {
  /// Real basis: cos(k.x), sin(k.x) for k in the half-plane with |k| <= k_cutoff.
  std::vector<WaveVector> basis_wavevectors;
  std::vector<std::complex<double>> sigma_hat;
};

/// Assembles the linearization of the filtered-vorticity equation around psi_s
/// by applying the pseudospectral operators to every real basis function and
/// projecting back, then returns all eigenvalues sigma (growth rate / nu).
LinearizationSpectrum full_linearization_spectrum(int s, double lambda, double nu, double alpha, int k_cutoff);

/// Indices n of the chain (t, s n + r) that fall inside |k| <= k_cutoff.
std::pair<int, int> chain_window(int s, int t, int r, int k_cutoff);

// --- Dimension lower bound --------------------------------------------------

/// Coefficient derivations from max a(delta) delta^{4/3}.
double lower_bound_coefficient_alpha0(double max_area_moment);
double lower_bound_coefficient_small_alpha(double max_area_moment);

struct LowerBound2D {
  double value = 0.0;
  double coefficient = 0.0;
  bool small_alpha_regime = false;
  /// For alpha > 0: the coupling G <= (440 sqrt5 pi / 63) alpha^{-3} delta^{-2} (s < 1/alpha).
  bool regime_consistent = true;
  std::string note;
};

/// dim >= 0.006 G^{2/3} (alpha = 0) or 0.0018 G^{2/3} (0 < alpha << 1).
LowerBound2D lower_bound_dim2d(double g, double alpha, double delta_star = 0.4);

}  // namespace mla
