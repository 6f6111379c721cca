#pragma once

// Three-dimensional instability of the shear state v0 = (V sin(s x3), 0, 0) on
// the 3-torus, reduced to two dimensions by Squire's transformation.
//
// Perturbations are normal modes omega(x3) exp(i(a x1 + b x2 - a c t)); the
// x3 dependence lives on the chain of Fourier modes m = s n + r, which the
// shear couples only to m +- s. The linearized system, with viscosity nu made
// explicit, is
//
//   nu Lap w1 - i a (u0 H w1 - c w1) = i a q + (H w3) u0'
//   nu Lap w2 - i a (u0 H w2 - c w2) = i b q
//   nu Lap w3 - i a (u0 H w3 - c w3) = q'
//   i a w1 + i b w2 + w3' = 0
//
// with H = (I - alpha^2 Lap)^{-1} and u0 = H v0. With a_hat^2 = a^2 + b^2 the
// combination (a w1 + b w2)/a_hat obeys the same system with b = 0, a -> a_hat
// and nu -> nu a_hat / a, i.e. a 2-D problem handled by the recurrence solver.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mla/stability2d.hpp"

namespace mla {

struct ShearSetup {
  int s = 1;
  double lambda = 1.0;
  double nu = 1.0;
  double alpha = 0.0;
  /// f1 = forcing_amplitude sin(s x3).
  double forcing_amplitude = 0.0;
  /// v0 = v0_amplitude sin(s x3).
  double v0_amplitude = 0.0;
  /// u0 = H v0 = u0_amplitude sin(s x3).
  double u0_amplitude = 0.0;
  /// |f| = nu^2 lambda s^2 with the 1/(sqrt2 pi) normalization (unit norm on a 2-D cross-section).
  double f_norm = 0.0;
  /// Literal L2 norm over [0, 2 pi]^3, larger by sqrt(2 pi).
  double f_norm_t3 = 0.0;
  /// G = lambda s^2.
  double grashof = 0.0;
  /// v0 . grad u0 == 0 because v0 points along x1 and u0 depends on x3 only.
  bool advection_vanishes = true;
};

ShearSetup build_3d_setup(int s, double lambda, double nu, double alpha);

/// x3 Fourier coefficients {m: coeff} of a profile amplitude * sin(s x3).
std::vector<std::pair<int, Complex>> sine_profile(double amplitude, int s);

struct SquireTriple {
  int a = 1;
  int b = 0;
  int r = 0;

  [[nodiscard]] double a_hat() const;
};

/// Chain of x3 wavenumbers m_i = s (n_lo + i) + r.
struct Chain {
  int s = 1;
  int r = 0;
  int n_lo = 0;
  int n_hi = 0;

  [[nodiscard]] int size() const { return n_hi - n_lo + 1; }
  [[nodiscard]] int m(int i) const { return s * (n_lo + i) + r; }
};

struct Mode1DProfile {
  int a = 1;
  int b = 0;
  Chain chain;
  std::vector<Complex> omega1, omega2, omega3, q;
  /// Phase speed; growth rate is Re(-i a c).
  Complex c;
};

/// Data of the reduced 2-D problem on the torus of period 2 pi / a_hat in x1.
struct ReducedMode {
  double a_hat = 1.0;
  /// a_hat / a: the reduced operator carries viscosity nu * dissipation_scale.
  double dissipation_scale = 1.0;
  Chain chain;
  std::vector<Complex> omega1, omega3, q;
  Complex c;
};

struct ModeResidual {
  double eq1 = 0.0;
  double eq2 = 0.0;
  double eq3 = 0.0;
  double divergence = 0.0;

  [[nodiscard]] double max_momentum() const;
};

/// Relative residuals of the four 3-D equations, each ||sum of terms|| / max ||term||,
/// evaluated on the chain widened by one mode at each end.
ModeResidual mode_residual(const Mode1DProfile& mode, const ShearSetup& setup);
/// Same for the reduced system (eq2 is unused and reported as 0).
ModeResidual reduced_residual(const ReducedMode& mode, const ShearSetup& setup);

/// Squire map: (a w1 + b w2)/a_hat, w3, q a_hat/a, c. Requires a != 0.
ReducedMode squire_reduce(const SquireTriple& triple, const Mode1DProfile& mode);

/// Vector eigenmode of the reduced problem built from a recurrence eigenvector e_n
/// (computed with t = a_hat and Lambda scaled by 1/dissipation_scale). The
/// pressure is recovered from the x1 momentum equation.
ReducedMode reduced_mode_from_recurrence(const StabilityResult& result, int s, int r, double a_hat,
                                         double dissipation_scale, const ShearSetup& setup);

struct Omega2Solution {
  std::vector<Complex> omega2;
  double solve_residual = 0.0;
};

/// Solves [nu Lap + i a c - i a u0 H] w2 = i b q on the chain by a dense LU solve.
/// Requires Re(i a c) < 0 (a growing mode).
Omega2Solution reconstruct_omega2(const SquireTriple& triple, const Chain& chain, const std::vector<Complex>& q,
                                  const ShearSetup& setup, Complex c);

/// Lifts a reduced eigenmode to the 3-D wave (a, b); a must be positive and
/// a^2 + b^2 must match reduced.a_hat^2.
Mode1DProfile lift_mode(const SquireTriple& triple, const ReducedMode& reduced, const ShearSetup& setup);

struct LiftResult {
  SquireTriple triple;
  double a_hat = 0.0;
  /// Lambda of the reduced problem: Lambda(lambda) * a / a_hat.
  double capital_lambda_eff = 0.0;
  /// Recurrence growth rate of the reduced problem (in units of the reduced viscosity).
  double sigma_hat = 0.0;
  /// 3-D growth rate Re(-i a c) = nu * sigma_hat.
  double growth_rate = 0.0;
  ReducedMode reduced;
  Mode1DProfile mode;
  ModeResidual residual;
};

struct LiftOptions {
  /// Eigenvector tail required before lifting; controls the truncation error of the residuals.
  double tail_tol = 1e-13;
  /// Initial recurrence half-width; 0 picks the window covering |m| <= 4 s + 16.
  int n_trunc = 0;
};

/// Full pipeline for one triple: reduced recurrence, vector mode, lift, residuals.
/// Returns nullopt when the reduced problem has no growing mode.
std::optional<LiftResult> lift_unstable_mode(const SquireTriple& triple, const ShearSetup& setup,
                                             const LiftOptions& options = {});

struct LinearSpectrum3D {
  std::vector<Complex> growth;  // eigenvalues sigma of omega ~ exp(sigma t)
  /// Largest |q| / |omega| over all eigenvectors (pressure recovered from the projection).
  double max_pressure_ratio = 0.0;
  double max_growth = 0.0;
};

/// Dense eigensolve of the Leray-projected 3-D operator for wave (a, b) on the x3 chain.
/// Independent of the Squire reduction; used as its oracle.
LinearSpectrum3D oblique_spectrum(int a, int b, const Chain& chain, const ShearSetup& setup);

/// Spectrum at a = 0 over all x3 modes |m| <= k_cutoff.
LinearSpectrum3D a0_stability_spectrum(int b, int s, double lambda, double nu, double alpha, int k_cutoff);

// --- Counting -----------------------------------------------------------------

struct CountWindow {
  double c2 = 0.1;
  double c3 = 0.45;
  double c4 = 0.56;
  double delta_star = 0.45;

  /// Throws unless 0 < c3 < c4 and the rectangle |r| <= c2 s, c3 s <= t' <= c4 s lies
  /// inside A(delta_star) for the sampled s.
  static CountWindow make(double c2, double c3, double c4, double delta_star);
};

struct TripleCount {
  long long count = 0;
  double c5_fit = 0.0;      // count / s^3
  double c5_quarter = 0.0;  // pi c2 (c4^2 - c3^2) / 4
  double c5_sector = 0.0;   // pi c2 (c4^2 - c3^2) / 2: |r| range 2 c2 s times the |b| <= a quarter annulus
};

TripleCount count_triples(int s, const CountWindow& window);

/// Integer triples satisfying the window constraints, ordered by (a, b, r).
std::vector<SquireTriple> window_triples(int s, const CountWindow& window);

/// Triples with a >= 1, |b| <= a and (a_hat, r) in A(delta), ordered by (a, b, r).
std::vector<SquireTriple> admissible_triples(int s, double delta, std::size_t max_count = 0);

/// lambda_2: the general upper threshold of the Lambda_0 interval, expressed in lambda.
double lambda2_threshold(int s, double alpha, double delta);
/// lambda_3 = sqrt2 lambda_2.
double lambda3_threshold(int s, double alpha, double delta);
/// Lambda(lambda_3) * a / a_hat >= Lambda(lambda_2), which holds whenever |b| <= a.
bool lambda3_covers_triple(const SquireTriple& triple, int s, double alpha, double delta);

struct LowerBound3D {
  double value = 0.0;       // c6 G^gamma / alpha^{3(1 - gamma)}
  double mode_count = 0.0;  // c6 / alpha^3 for s = 1/alpha
  std::string note;
};

LowerBound3D lower_bound_dim3d(double g, double alpha, double gamma, double c6);
/// c8 (G / alpha)^{3/2}, the cited upper bound used in two-sided reports.
double upper_bound_dim3d(double g, double alpha, double c8);

}  // namespace mla
