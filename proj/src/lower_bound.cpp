#include <cmath>
#include <numbers>
#include <sstream>

#include "mla/errors.hpp"
#include "mla/stability2d.hpp"

namespace mla {

double lower_bound_coefficient_alpha0(double max_area_moment) {
  const double base = 3.0 * std::sqrt(6.0) / (20.0 * std::numbers::pi);
  return 2.0 * std::pow(base, 2.0 / 3.0) * max_area_moment;
}

double lower_bound_coefficient_small_alpha(double max_area_moment) {
  const double base = 63.0 / (440.0 * std::sqrt(5.0) * std::numbers::pi);
  return 2.0 * std::pow(base, 2.0 / 3.0) * max_area_moment;
}

LowerBound2D lower_bound_dim2d(double g, double alpha, double delta_star) {
  if (!(g > 0.0)) throw ValidationError("G must be > 0");
  if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
  LowerBound2D out;
  const double g23 = std::cbrt(g * g);
  if (alpha == 0.0) {
    out.coefficient = 0.006;
    out.note = "alpha = 0: 0.006 G^(2/3)";
  } else {
    out.coefficient = 0.0018;
    out.small_alpha_regime = true;
    const double g_max = 440.0 * std::sqrt(5.0) * std::numbers::pi / 63.0 / std::pow(alpha, 3.0) /
                         (delta_star * delta_star);
    out.regime_consistent = g <= g_max;
    std::ostringstream os;
    os << "0 < alpha << 1: 0.0018 G^(2/3), derived for s < 1/alpha (G <= " << g_max
       << "); with s ~ 1/alpha the bound reads C1/alpha^2 <= dim <= C2 alpha^-2 (log 1/alpha)^(1/3),"
          " C1 and C2 unspecified";
    out.note = os.str();
  }
  out.value = out.coefficient * g23;
  return out;
}

}  // namespace mla
