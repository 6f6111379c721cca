#pragma once

// Time integration of the filtered-vorticity equation
//
//   psi_t - nu Lap psi + J(Lap^{-1} psi, (I - alpha^2 Lap)^{-1} psi) = F
//
// on the 2*pi torus with Kolmogorov forcing F_s = -(1/(sqrt2 pi)) nu^2 lambda s^3 cos(s x2).
// The vorticity phi of the filtered velocity is recovered as (I - alpha^2 Lap)^{-1} psi.

#include <cstdint>
#include <string>
#include <vector>

#include "mla/spectral_core.hpp"

namespace mla {

struct ModelParams {
  double nu = 1.0;
  double alpha = 0.0;
  SpectralGrid grid{32};

  void validate() const;
};

struct ForcingSpec {
  int s = 1;
  double lambda = 1.0;
};

struct SolverState {
  ScalarField psi;
  double time = 0.0;
  ModelParams params;
};

struct DiagnosticSample {
  double time = 0.0;
  double phi_l2 = 0.0;
  double grad_phi_l2 = 0.0;
  /// (1/t) * integral_0^t |grad phi|^2, trapezoidal over every step.
  double avg_grad_sq = 0.0;
};

struct TrajectoryDiagnostics {
  std::vector<DiagnosticSample> samples;
};

ScalarField kolmogorov_forcing(const ForcingSpec& spec, const ModelParams& params);
/// Velocity forcing f = (f1, 0), f1 = (1/(sqrt2 pi)) nu^2 lambda s^2 sin(s x2); curl f = F_s.
VectorField2 kolmogorov_velocity_forcing(const ForcingSpec& spec, const ModelParams& params);
ScalarField stationary_psi(const ForcingSpec& spec, const ModelParams& params);

/// G = lambda s^2 (lambda_1 = 1 on the torus).
double grashof(const ForcingSpec& spec);

/// nu Lap psi - J(Lap^{-1} psi, (I - alpha^2 Lap)^{-1} psi) + F.
ScalarField rhs(const SolverState& state, const ScalarField& forcing);

/// phi = (I - alpha^2 Lap)^{-1} psi.
ScalarField filtered_vorticity(const SolverState& state);

struct StepOptions {
  /// Advective limit dt <= courant / (max|v| * k_cutoff).
  double courant = 0.5;
  bool enforce_cfl = true;
};

double dt_max(const SolverState& state, double courant = 0.5);

/// One step of the second-order exponential integrator: diffusion and the
/// constant forcing are propagated exactly per mode, the Jacobian term by an
/// integrating-factor explicit midpoint rule. Throws NumericalError on a
/// non-finite result and ValidationError if dt breaks the CFL guard.
SolverState step_imex(const SolverState& state, double dt, const ScalarField& forcing,
                      const StepOptions& options = {});

/// Reusable stepper that caches the per-mode exponential factors for a fixed dt.
class ImexStepper {
 public:
  ImexStepper(const ModelParams& params, double dt, ScalarField forcing, StepOptions options = {});

  void advance(SolverState& state) const;
  [[nodiscard]] double dt() const { return dt_; }

 private:
  ScalarField nonlinear(const ScalarField& psi) const;

  ModelParams params_;
  double dt_;
  ScalarField forcing_;
  StepOptions options_;
  std::vector<double> decay_full_;
  std::vector<double> decay_half_;
  ScalarField forced_full_;  // phi1(L dt) dt F
  ScalarField forced_half_;  // phi1(L dt/2) dt/2 F
};

/// Integrates from state.time to t_final and samples phi norms every
/// sample_every steps (plus the initial state). An empty interval yields no samples.
TrajectoryDiagnostics run(SolverState& state, double t_final, double dt, const ScalarField& forcing,
                          int sample_every, const StepOptions& options = {});

struct BoundCheck {
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - measured
  bool holds = false;
};

struct AsymptoticReport {
  double tail_start_time = 0.0;
  std::size_t tail_samples = 0;
  BoundCheck phi_sq;        // tail max |phi|^2 vs |f|^2 / (lambda1 nu^2)
  BoundCheck avg_grad_sq;   // tail max of running average |grad phi|^2 vs |f|^2 / nu^2
  std::string note;
};

AsymptoticReport check_asymptotic_bounds(const TrajectoryDiagnostics& diag, double f_l2, double nu,
                                         double lambda1, double tail_fraction = 0.5);

/// Small random Hermitian perturbation for reproducible instability runs.
ScalarField initial_perturbation(const SpectralGrid& grid, std::uint64_t seed, double amplitude, int kmax = 8);

}  // namespace mla
