#pragma once

#include <numbers>
#include <optional>
#include <string>

namespace mla {

struct BoundInputs {
  double g = 1.0;
  double alpha = 0.0;
  double lambda1 = 1.0;
  /// Manifold constant L; pi on the sphere. The torus value is not known in closed form.
  double l_const = std::numbers::pi;
  /// Asymptotic correction epsilon_G (-> 0 as G -> infinity); never modelled, only supplied.
  double eps_g = 0.0;
  double gamma = 0.5;

  void validate() const;
};

/// G^{2/3} ((4 + eps)^3 / (3 L (1 + alpha^2 lambda1)) (log G - log(L/2)/2))^{1/3}.
/// Throws DomainError when the log bracket is not positive.
double upper_bound_1(const BoundInputs& in);

/// (12 / sqrt(L (1 + alpha^2 lambda1)))^{2/3} G^{2/3} (log G + 1/2 + log(3 sqrt2 / sqrt(L (1 + alpha^2 lambda1))))^{1/3}.
double upper_bound_2(const BoundInputs& in);

struct TwoSidedReport {
  double g = 0.0;
  double alpha = 0.0;
  std::optional<double> upper1;
  std::optional<double> upper2;
  std::optional<double> upper;  // min of the available upper bounds
  double lower = 0.0;
  std::optional<double> ratio;  // upper / lower
  bool consistent = true;       // lower <= upper whenever both exist
  std::string notes;
};

TwoSidedReport two_sided_report(const BoundInputs& in);

}  // namespace mla
