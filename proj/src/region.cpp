#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "mla/errors.hpp"
#include "mla/stability2d.hpp"

namespace mla {

RegionSpec RegionSpec::make(double delta, int s) {
  if (!(delta > 0.0 && delta < kDeltaMax)) {
    std::ostringstream os;
    os << "delta must lie in (0, 1/sqrt(3)), got " << delta;
    throw ValidationError(os.str());
  }
  if (s < 1) throw ValidationError("s must be >= 1");
  return {delta, s};
}

bool region_contains(const RegionSpec& spec, double t, double r) {
  const double s = spec.s;
  const double s2 = s * s;
  return 3.0 * (t * t + r * r) < s2 && t * t + (r - s) * (r - s) > s2 && t * t + (r + s) * (r + s) > s2 &&
         t >= spec.delta * s && spec.r_min() < r && r < spec.r_max();
}

std::vector<std::pair<int, int>> lattice_points(const RegionSpec& spec) {
  std::vector<std::pair<int, int>> pts;
  const double s = spec.s;
  const int t_lo = static_cast<int>(std::ceil(spec.delta * s));
  const int t_hi = static_cast<int>(std::floor(s / std::sqrt(3.0)));
  const int r_bound = static_cast<int>(std::ceil(s / 6.0));
  for (int t = std::max(t_lo, 1); t <= t_hi; ++t) {
    for (int r = -r_bound; r <= r_bound; ++r) {
      if (region_contains(spec, t, r)) pts.emplace_back(t, r);
    }
  }
  return pts;
}

long long count_lattice(const RegionSpec& spec) { return static_cast<long long>(lattice_points(spec).size()); }

double region_area(double delta) {
  if (!(delta > 0.0 && delta < kDeltaMax)) throw ValidationError("delta must lie in (0, 1/sqrt(3))");
  // Horizontal slices at height y (= r/s): x (= t/s) runs from
  // max(delta, sqrt(2|y| - y^2)) to sqrt(1/3 - y^2); the region is symmetric in y.
  auto width = [delta](double y) {
    const double upper = std::sqrt(std::max(0.0, 1.0 / 3.0 - y * y));
    const double lower = std::max(delta, std::sqrt(std::max(0.0, 2.0 * y - y * y)));
    return std::max(0.0, upper - lower);
  };
  const double y_end = std::min(1.0 / 6.0, std::sqrt(1.0 / 3.0 - delta * delta));
  const double y_kink = 1.0 - std::sqrt(1.0 - delta * delta);
  std::vector<double> breaks{0.0};
  if (y_kink > 0.0 && y_kink < y_end) breaks.push_back(y_kink);
  breaks.push_back(y_end);
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    area += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(width, breaks[i], breaks[i + 1], 15, 1e-13);
  }
  return 2.0 * area;
}

DeltaOptimum optimize_delta() {
  auto objective = [](double d) { return region_area(d) * std::pow(d, 4.0 / 3.0); };
  constexpr int kScan = 400;
  double best_d = 0.0, best_v = -1.0;
  for (int i = 1; i < kScan; ++i) {
    const double d = kDeltaMax * i / kScan;
    const double v = objective(d);
    if (v > best_v) {
      best_v = v;
      best_d = d;
    }
  }
  double a = std::max(1e-12, best_d - kDeltaMax / kScan);
  double b = std::min(kDeltaMax - 1e-12, best_d + kDeltaMax / kScan);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = objective(d);
    }
  }
  const double ds = 0.5 * (a + b);
  return {ds, objective(ds)};
}

}  // namespace mla
