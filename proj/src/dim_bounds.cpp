#include "mla/dim_bounds.hpp"

#include <cmath>
#include <sstream>

#include "mla/errors.hpp"
#include "mla/stability2d.hpp"

namespace mla {

void BoundInputs::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("G must be > 0");
  if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
  if (!(lambda1 > 0.0)) throw ValidationError("lambda1 must be > 0");
  if (!(l_const > 0.0)) throw ValidationError("L must be > 0");
  if (!(eps_g >= 0.0)) throw ValidationError("eps_G must be >= 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
}

double upper_bound_1(const BoundInputs& in) {
  in.validate();
  const double filt = 1.0 + in.alpha * in.alpha * in.lambda1;
  const double bracket = std::log(in.g) - 0.5 * std::log(in.l_const / 2.0);
  if (!(bracket > 0.0)) {
    std::ostringstream os;
    os << "upper bound 1 undefined: log G - log(L/2)/2 = " << bracket << " <= 0 (G=" << in.g << ")";
    throw DomainError(os.str());
  }
  const double e = 4.0 + in.eps_g;
  return std::cbrt(in.g * in.g) * std::cbrt(e * e * e / (3.0 * in.l_const * filt) * bracket);
}

double upper_bound_2(const BoundInputs& in) {
  in.validate();
  const double root = std::sqrt(in.l_const * (1.0 + in.alpha * in.alpha * in.lambda1));
  const double bracket = std::log(in.g) + 0.5 + std::log(3.0 * std::sqrt(2.0) / root);
  if (!(bracket > 0.0)) {
    std::ostringstream os;
    os << "upper bound 2 undefined: log bracket = " << bracket << " <= 0 (G=" << in.g << ")";
    throw DomainError(os.str());
  }
  const double pre = 12.0 / root;
  return std::cbrt(pre * pre) * std::cbrt(in.g * in.g) * std::cbrt(bracket);
}

TwoSidedReport two_sided_report(const BoundInputs& in) {
  in.validate();
  TwoSidedReport rep;
  rep.g = in.g;
  rep.alpha = in.alpha;
  std::ostringstream notes;
  try {
    rep.upper1 = upper_bound_1(in);
  } catch (const DomainError& e) {
    notes << e.what() << "; ";
  }
  try {
    rep.upper2 = upper_bound_2(in);
  } catch (const DomainError& e) {
    notes << e.what() << "; ";
  }
  if (rep.upper1 && rep.upper2) {
    rep.upper = std::min(*rep.upper1, *rep.upper2);
  } else if (rep.upper1) {
    rep.upper = rep.upper1;
  } else if (rep.upper2) {
    rep.upper = rep.upper2;
  }
  const auto lb = lower_bound_dim2d(in.g, in.alpha);
  rep.lower = lb.value;
  if (rep.upper) {
    rep.ratio = *rep.upper / rep.lower;
    rep.consistent = rep.lower <= *rep.upper;
  }
  if (in.eps_g == 0.0) notes << "upper bound 1 is asymptotic (eps_G -> 0 as G -> infinity), evaluated at eps_G = 0; ";
  notes << lb.note;
  rep.notes = notes.str();
  return rep;
}

}  // namespace mla
