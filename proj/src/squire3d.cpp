#include "mla/squire3d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "mla/errors.hpp"

namespace mla {

namespace {

using CVec = std::vector<Complex>;
constexpr Complex kI{0.0, 1.0};

double l2(const CVec& v) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

/// Copies a chain vector into the chain widened by one mode at each end.
CVec pad(const CVec& v) {
  CVec out(v.size() + 2, Complex{});
  std::copy(v.begin(), v.end(), out.begin() + 1);
  return out;
}

Chain widen(const Chain& c) { return {c.s, c.r, c.n_lo - 1, c.n_hi + 1}; }

/// Multiplication by amp sin(s x3) on a chain vector (coefficients at n -+ 1).
CVec mul_sin(const CVec& g, double amp) {
  const int n = static_cast<int>(g.size());
  CVec out(n, Complex{});
  const Complex f = amp / (2.0 * kI);
  for (int j = 0; j < n; ++j) {
    Complex acc{};
    if (j > 0) acc += g[j - 1];
    if (j + 1 < n) acc -= g[j + 1];
    out[j] = f * acc;
  }
  return out;
}

/// Multiplication by amp cos(s x3).
CVec mul_cos(const CVec& g, double amp) {
  const int n = static_cast<int>(g.size());
  CVec out(n, Complex{});
  for (int j = 0; j < n; ++j) {
    Complex acc{};
    if (j > 0) acc += g[j - 1];
    if (j + 1 < n) acc += g[j + 1];
    out[j] = 0.5 * amp * acc;
  }
  return out;
}

template <class F>
CVec map_diag(const CVec& g, const Chain& chain, F&& f) {
  CVec out(g.size());
  for (int j = 0; j < static_cast<int>(g.size()); ++j) out[j] = f(chain.m(j)) * g[j];
  return out;
}

double relative(const std::vector<CVec>& terms) {
  CVec sum(terms.front().size(), Complex{});
  double scale = 0.0;
  for (const auto& t : terms) {
    for (std::size_t j = 0; j < t.size(); ++j) sum[j] += t[j];
    scale = std::max(scale, l2(t));
  }
  return scale > 0.0 ? l2(sum) / scale : 0.0;
}

CVec scaled(const CVec& v, Complex f) {
  CVec out(v);
  for (auto& x : out) x *= f;
  return out;
}

/// Momentum terms nu Lap w - i a (u0 H w - c w) evaluated on the widened chain.
std::vector<CVec> transport_terms(const CVec& w, const Chain& ext, double kh_sq, double nu, double alpha, double a,
                                  Complex c, double u_amp) {
  auto h = [&](int m) { return 1.0 / (1.0 + alpha * alpha * (kh_sq + double(m) * m)); };
  CVec diff = map_diag(w, ext, [&](int m) { return Complex(-nu * (kh_sq + double(m) * m)); });
  CVec adv = scaled(mul_sin(map_diag(w, ext, [&](int m) { return Complex(h(m)); }), u_amp), -kI * a);
  CVec phase = scaled(w, kI * a * c);
  return {diff, adv, phase};
}

void check_sizes(const Chain& chain, std::initializer_list<const CVec*> vs) {
  for (const auto* v : vs) {
    if (static_cast<int>(v->size()) != chain.size()) throw ValidationError("mode profile size does not match its chain");
  }
}

}  // namespace

ShearSetup build_3d_setup(int s, double lambda, double nu, double alpha) {
  if (s < 1) throw ValidationError("s must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and >= 0");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ValidationError("nu must be finite and > 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be finite and >= 0");
  const double pi = std::numbers::pi;
  ShearSetup out;
  out.s = s;
  out.lambda = lambda;
  out.nu = nu;
  out.alpha = alpha;
  out.forcing_amplitude = nu * nu * lambda * s * s / (std::numbers::sqrt2 * pi);
  out.v0_amplitude = nu * lambda / (std::numbers::sqrt2 * pi);
  out.u0_amplitude = out.v0_amplitude / (1.0 + alpha * alpha * s * s);
  out.f_norm = nu * nu * lambda * s * s;
  out.f_norm_t3 = out.forcing_amplitude * 2.0 * std::pow(pi, 1.5);
  out.grashof = lambda * s * s;
  return out;
}

std::vector<std::pair<int, Complex>> sine_profile(double amplitude, int s) {
  return {{-s, Complex(0.0, 0.5 * amplitude)}, {s, Complex(0.0, -0.5 * amplitude)}};
}

double SquireTriple::a_hat() const { return std::hypot(double(a), double(b)); }

double ModeResidual::max_momentum() const { return std::max({eq1, eq2, eq3}); }

ModeResidual mode_residual(const Mode1DProfile& mode, const ShearSetup& setup) {
  check_sizes(mode.chain, {&mode.omega1, &mode.omega2, &mode.omega3, &mode.q});
  const Chain ext = widen(mode.chain);
  const double a = mode.a, b = mode.b;
  const double kh_sq = a * a + b * b;
  auto h = [&](int m) { return 1.0 / (1.0 + setup.alpha * setup.alpha * (kh_sq + double(m) * m)); };
  const CVec w1 = pad(mode.omega1), w2 = pad(mode.omega2), w3 = pad(mode.omega3), q = pad(mode.q);

  ModeResidual res;
  auto t1 = transport_terms(w1, ext, kh_sq, setup.nu, setup.alpha, a, mode.c, setup.u0_amplitude);
  t1.push_back(scaled(q, -kI * a));
  t1.push_back(scaled(mul_cos(map_diag(w3, ext, [&](int m) { return Complex(h(m)); }), setup.u0_amplitude * setup.s),
                      -1.0));
  res.eq1 = relative(t1);

  auto t2 = transport_terms(w2, ext, kh_sq, setup.nu, setup.alpha, a, mode.c, setup.u0_amplitude);
  t2.push_back(scaled(q, -kI * b));
  res.eq2 = relative(t2);

  auto t3 = transport_terms(w3, ext, kh_sq, setup.nu, setup.alpha, a, mode.c, setup.u0_amplitude);
  t3.push_back(map_diag(q, ext, [&](int m) { return -kI * double(m); }));
  res.eq3 = relative(t3);

  res.divergence = relative({scaled(w1, kI * a), scaled(w2, kI * b),
                             map_diag(w3, ext, [&](int m) { return kI * double(m); })});
  return res;
}

ModeResidual reduced_residual(const ReducedMode& mode, const ShearSetup& setup) {
  check_sizes(mode.chain, {&mode.omega1, &mode.omega3, &mode.q});
  const Chain ext = widen(mode.chain);
  const double ah = mode.a_hat;
  const double kh_sq = ah * ah;
  const double nu_hat = setup.nu * mode.dissipation_scale;
  auto h = [&](int m) { return 1.0 / (1.0 + setup.alpha * setup.alpha * (kh_sq + double(m) * m)); };
  const CVec w1 = pad(mode.omega1), w3 = pad(mode.omega3), q = pad(mode.q);

  ModeResidual res;
  auto t1 = transport_terms(w1, ext, kh_sq, nu_hat, setup.alpha, ah, mode.c, setup.u0_amplitude);
  t1.push_back(scaled(q, -kI * ah));
  t1.push_back(scaled(mul_cos(map_diag(w3, ext, [&](int m) { return Complex(h(m)); }), setup.u0_amplitude * setup.s),
                      -1.0));
  res.eq1 = relative(t1);

  auto t3 = transport_terms(w3, ext, kh_sq, nu_hat, setup.alpha, ah, mode.c, setup.u0_amplitude);
  t3.push_back(map_diag(q, ext, [&](int m) { return -kI * double(m); }));
  res.eq3 = relative(t3);

  res.divergence = relative({scaled(w1, kI * ah), map_diag(w3, ext, [&](int m) { return kI * double(m); })});
  return res;
}

ReducedMode squire_reduce(const SquireTriple& triple, const Mode1DProfile& mode) {
  if (triple.a == 0) throw ValidationError("the Squire reduction needs a != 0");
  if (mode.a != triple.a || mode.b != triple.b) throw ValidationError("mode wavenumbers do not match the triple");
  check_sizes(mode.chain, {&mode.omega1, &mode.omega2, &mode.omega3, &mode.q});
  const double a = triple.a, b = triple.b, ah = triple.a_hat();
  ReducedMode out;
  out.a_hat = ah;
  out.dissipation_scale = ah / a;
  out.chain = mode.chain;
  out.c = mode.c;
  out.omega3 = mode.omega3;
  out.omega1.resize(mode.omega1.size());
  out.q.resize(mode.q.size());
  for (std::size_t j = 0; j < mode.omega1.size(); ++j) {
    out.omega1[j] = (a * mode.omega1[j] + b * mode.omega2[j]) / ah;
    out.q[j] = mode.q[j] * ah / a;
  }
  return out;
}

ReducedMode reduced_mode_from_recurrence(const StabilityResult& result, int s, int r, double a_hat,
                                         double dissipation_scale, const ShearSetup& setup) {
  if (!(a_hat > 0.0)) throw ValidationError("a_hat must be positive");
  if (!(dissipation_scale > 0.0)) throw ValidationError("dissipation scale must be positive");
  const Chain chain{s, r, result.n_lo, result.n_hi};
  if (static_cast<int>(result.eigenvector.size()) != chain.size()) {
    throw ValidationError("eigenvector length does not match its window");
  }
  const double al2 = setup.alpha * setup.alpha;
  ReducedMode out;
  out.a_hat = a_hat;
  out.dissipation_scale = dissipation_scale;
  out.chain = chain;
  const int n = chain.size();
  out.omega1.resize(n);
  out.omega3.resize(n);
  for (int j = 0; j < n; ++j) {
    const double m = chain.m(j);
    const double k2 = a_hat * a_hat + m * m;
    // Stream function chi of the filtered perturbation, recovered from the recurrence variable.
    const double zeta = result.eigenvector[j] * (k2 + al2 * k2 * k2) / (k2 - double(s) * s);
    const Complex chi = -zeta / k2;
    out.omega1[j] = -kI * m * chi;
    out.omega3[j] = kI * a_hat * chi;
  }
  const double growth = setup.nu * dissipation_scale * result.sigma_hat;
  out.c = kI * growth / a_hat;

  // Pressure from the x1 momentum balance; entries outside the window are dropped.
  out.q.assign(n, Complex{});
  const Chain ext = widen(chain);
  const double nu_hat = setup.nu * dissipation_scale;
  auto h = [&](int m) { return 1.0 / (1.0 + al2 * (a_hat * a_hat + double(m) * m)); };
  const CVec w1 = pad(out.omega1), w3 = pad(out.omega3);
  auto terms = transport_terms(w1, ext, a_hat * a_hat, nu_hat, setup.alpha, a_hat, out.c, setup.u0_amplitude);
  terms.push_back(
      scaled(mul_cos(map_diag(w3, ext, [&](int m) { return Complex(h(m)); }), setup.u0_amplitude * s), -1.0));
  for (int j = 0; j < n; ++j) {
    Complex acc{};
    for (const auto& t : terms) acc += t[j + 1];
    out.q[j] = acc / (kI * a_hat);
  }
  return out;
}

Omega2Solution reconstruct_omega2(const SquireTriple& triple, const Chain& chain, const CVec& q,
                                  const ShearSetup& setup, Complex c) {
  if (static_cast<int>(q.size()) != chain.size()) throw ValidationError("pressure size does not match its chain");
  const double a = triple.a, b = triple.b;
  if (!((kI * a * c).real() < 0.0)) {
    throw ValidationError("omega2 reconstruction requires a growing mode, Re(i a c) < 0");
  }
  const int n = chain.size();
  const double kh_sq = a * a + b * b;
  auto h = [&](int j) {
    const double m = chain.m(j);
    return 1.0 / (1.0 + setup.alpha * setup.alpha * (kh_sq + m * m));
  };
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd rhs(n);
  const double half = 0.5 * a * setup.u0_amplitude;
  for (int j = 0; j < n; ++j) {
    const double m = chain.m(j);
    mat(j, j) = -setup.nu * (kh_sq + m * m) + kI * a * c;
    if (j > 0) mat(j, j - 1) = -half * h(j - 1);
    if (j + 1 < n) mat(j, j + 1) = half * h(j + 1);
    rhs[j] = kI * b * q[j];
  }
  Omega2Solution out;
  out.omega2.assign(n, Complex{});
  if (rhs.norm() == 0.0) return out;
  const Eigen::VectorXcd x = mat.partialPivLu().solve(rhs);
  if (!x.allFinite()) throw NumericalError("omega2 solve produced non-finite values");
  out.solve_residual = (mat * x - rhs).norm() / rhs.norm();
  for (int j = 0; j < n; ++j) out.omega2[j] = x[j];
  return out;
}

Mode1DProfile lift_mode(const SquireTriple& triple, const ReducedMode& reduced, const ShearSetup& setup) {
  if (triple.a <= 0) throw ValidationError("lifting is defined for a > 0; use the conjugate mode of (-a, -b)");
  const double ah = triple.a_hat();
  if (std::abs(ah - reduced.a_hat) > 1e-12 * ah) throw ValidationError("reduced mode has a different a_hat");
  const double a = triple.a, b = triple.b;
  Mode1DProfile out;
  out.a = triple.a;
  out.b = triple.b;
  out.chain = reduced.chain;
  out.c = reduced.c;
  out.omega3 = reduced.omega3;
  out.q = scaled(reduced.q, a / ah);
  auto w2 = reconstruct_omega2(triple, out.chain, out.q, setup, out.c);
  if (w2.solve_residual > 1e-10) {
    std::ostringstream os;
    os << "omega2 solve residual " << w2.solve_residual << " exceeds 1e-10";
    throw NumericalError(os.str());
  }
  out.omega2 = std::move(w2.omega2);
  out.omega1.resize(out.omega3.size());
  for (std::size_t j = 0; j < out.omega1.size(); ++j) {
    out.omega1[j] = (ah * reduced.omega1[j] - b * out.omega2[j]) / a;
  }
  return out;
}

std::optional<LiftResult> lift_unstable_mode(const SquireTriple& triple, const ShearSetup& setup,
                                             const LiftOptions& options) {
  if (triple.a <= 0) throw ValidationError("lifting is defined for a > 0");
  const double ah = triple.a_hat();
  const double lam_eff = capital_lambda(setup.lambda, setup.s, setup.alpha) * triple.a / ah;
  RecurrenceOptions ropt;
  ropt.tail_tol = options.tail_tol;
  const int n_trunc = options.n_trunc > 0 ? options.n_trunc : (4 * setup.s + 16 + setup.s - 1) / setup.s;
  const auto prob = RecurrenceProblem::make(setup.s, ah, triple.r, lam_eff, setup.alpha, n_trunc);
  const auto sol = unstable_sigma(prob, ropt);
  if (!sol) return std::nullopt;

  LiftResult out;
  out.triple = triple;
  out.a_hat = ah;
  out.capital_lambda_eff = lam_eff;
  out.sigma_hat = sol->sigma_hat;
  out.growth_rate = setup.nu * sol->sigma_hat;
  out.reduced = reduced_mode_from_recurrence(*sol, setup.s, triple.r, ah, ah / triple.a, setup);
  out.mode = lift_mode(triple, out.reduced, setup);
  out.residual = mode_residual(out.mode, setup);
  return out;
}

namespace {

using Vec3 = std::array<double, 3>;

/// Orthonormal pair spanning the plane orthogonal to k.
std::array<Vec3, 2> div_free_basis(double a, double b, double m) {
  const double kh = std::hypot(a, b);
  if (kh == 0.0) return {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}};
  const Vec3 e1{-b / kh, a / kh, 0.0};
  const double kn = std::sqrt(a * a + b * b + m * m);
  // k x e1 / |k|
  const Vec3 e2{(b * e1[2] - m * e1[1]) / kn, (m * e1[0] - a * e1[2]) / kn, (a * e1[1] - b * e1[0]) / kn};
  return {e1, e2};
}

/// Leray-projected linear operator on the x3 modes ms, in a divergence-free basis.
LinearSpectrum3D projected_spectrum(int a, int b, const std::vector<int>& ms, const ShearSetup& setup) {
  const int n = static_cast<int>(ms.size());
  const int dim = 2 * n;
  if (dim == 0) return {};
  std::map<int, int> where;
  for (int i = 0; i < n; ++i) where[ms[i]] = i;
  const double kh_sq = double(a) * a + double(b) * b;
  const double U = setup.u0_amplitude;
  const int s = setup.s;
  std::vector<std::array<Vec3, 2>> basis(n);
  std::vector<double> hk(n);
  for (int i = 0; i < n; ++i) {
    basis[i] = div_free_basis(a, b, ms[i]);
    hk[i] = 1.0 / (1.0 + setup.alpha * setup.alpha * (kh_sq + double(ms[i]) * ms[i]));
  }

  // Unprojected action on mode j contributing to mode i: g_i += B_ij w_j.
  auto block = [&](int i, int j) {
    Eigen::Matrix3cd blk = Eigen::Matrix3cd::Zero();
    const int dm = ms[i] - ms[j];
    if (i == j) {
      blk.diagonal().setConstant(-setup.nu * (kh_sq + double(ms[i]) * ms[i]));
    } else if (dm == s || dm == -s) {
      // -i a u0 H w: u0 = U sin(s x3) shifts m by +-s with weight +-U/(2i).
      const double sgn = dm == s ? 1.0 : -1.0;
      blk.diagonal().setConstant(-kI * double(a) * sgn * U / (2.0 * kI) * hk[j]);
      // -(H w3) u0' e1 with u0' = U s cos(s x3).
      blk(0, 2) += -0.5 * U * s * hk[j];
    }
    return blk;
  };

  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    for (int j : {where.count(ms[i]) ? i : -1, where.count(ms[i] - s) ? where[ms[i] - s] : -1,
                  where.count(ms[i] + s) ? where[ms[i] + s] : -1}) {
      if (j < 0) continue;
      const Eigen::Matrix3cd blk = block(i, j);
      for (int al = 0; al < 2; ++al) {
        for (int be = 0; be < 2; ++be) {
          Eigen::Vector3cd eb(basis[j][be][0], basis[j][be][1], basis[j][be][2]);
          Eigen::Vector3cd ea(basis[i][al][0], basis[i][al][1], basis[i][al][2]);
          mat(2 * i + al, 2 * j + be) += ea.dot(blk * eb);
        }
      }
    }
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mat, true);
  if (es.info() != Eigen::Success) throw NumericalError("3-D eigensolver failed");
  LinearSpectrum3D out;
  out.growth.assign(es.eigenvalues().begin(), es.eigenvalues().end());
  out.max_growth = -std::numeric_limits<double>::infinity();
  for (const auto& g : out.growth) out.max_growth = std::max(out.max_growth, g.real());

  for (int col = 0; col < dim; ++col) {
    const Eigen::VectorXcd v = es.eigenvectors().col(col);
    std::vector<Eigen::Vector3cd> w(n);
    double wmax = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] = Eigen::Vector3cd::Zero();
      for (int al = 0; al < 2; ++al) {
        w[i] += v[2 * i + al] * Eigen::Vector3cd(basis[i][al][0], basis[i][al][1], basis[i][al][2]);
      }
      wmax = std::max(wmax, w[i].cwiseAbs().maxCoeff());
    }
    double qmax = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::Vector3cd g = Eigen::Vector3cd::Zero();
      for (int j = 0; j < n; ++j) {
        const int dm = ms[i] - ms[j];
        if (i == j || dm == s || dm == -s) g += block(i, j) * w[j];
      }
      const double k2 = kh_sq + double(ms[i]) * ms[i];
      const Complex kg = double(a) * g[0] + double(b) * g[1] + double(ms[i]) * g[2];
      qmax = std::max(qmax, std::abs(kg) / k2);
    }
    if (wmax > 0.0) out.max_pressure_ratio = std::max(out.max_pressure_ratio, qmax / wmax);
  }
  return out;
}

}  // namespace

LinearSpectrum3D oblique_spectrum(int a, int b, const Chain& chain, const ShearSetup& setup) {
  if (chain.s != setup.s) throw ValidationError("chain period differs from the shear wavenumber");
  std::vector<int> ms;
  for (int j = 0; j < chain.size(); ++j) {
    if (a == 0 && b == 0 && chain.m(j) == 0) continue;
    ms.push_back(chain.m(j));
  }
  return projected_spectrum(a, b, ms, setup);
}

LinearSpectrum3D a0_stability_spectrum(int b, int s, double lambda, double nu, double alpha, int k_cutoff) {
  if (k_cutoff < 1) throw ValidationError("k_cutoff must be >= 1");
  const auto setup = build_3d_setup(s, lambda, nu, alpha);
  std::vector<int> ms;
  for (int m = -k_cutoff; m <= k_cutoff; ++m) {
    if (b == 0 && m == 0) continue;
    ms.push_back(m);
  }
  return projected_spectrum(0, b, ms, setup);
}

CountWindow CountWindow::make(double c2, double c3, double c4, double delta_star) {
  if (!(c2 > 0.0)) throw ValidationError("count window: c2 must be > 0");
  if (!(c3 > 0.0 && c3 < c4)) throw ValidationError("count window: need 0 < c3 < c4");
  if (!(delta_star > 0.0 && delta_star < kDeltaMax)) throw ValidationError("count window: delta* must lie in (0, 1/sqrt3)");
  // The t-slices of A shrink as |r| grows, so the two outer corners decide containment.
  for (int s : {60, 120, 600}) {
    const auto spec = RegionSpec::make(delta_star, s);
    for (double t : {c3 * s, c4 * s}) {
      if (!region_contains(spec, t, c2 * s) || !region_contains(spec, t, -c2 * s)) {
        std::ostringstream os;
        os << "count window (c2=" << c2 << ", c3=" << c3 << ", c4=" << c4 << ") is not inside A(" << delta_star
           << ") at s=" << s;
        throw ValidationError(os.str());
      }
    }
  }
  return {c2, c3, c4, delta_star};
}

namespace {

template <class F>
void for_each_window_pair(int s, const CountWindow& w, F&& f) {
  const double lo = w.c3 * s, hi = w.c4 * s;
  const int a_max = static_cast<int>(std::floor(hi));
  for (int a = 1; a <= a_max; ++a) {
    for (int b = -a; b <= a; ++b) {
      const double k2 = double(a) * a + double(b) * b;
      if (k2 >= lo * lo && k2 <= hi * hi) f(a, b);
    }
  }
}

}  // namespace

TripleCount count_triples(int s, const CountWindow& window) {
  if (s < 1) throw ValidationError("s must be >= 1");
  const long long r_count = 2LL * static_cast<long long>(std::floor(window.c2 * s)) + 1;
  long long pairs = 0;
  for_each_window_pair(s, window, [&](int, int) { ++pairs; });
  TripleCount out;
  out.count = pairs * r_count;
  out.c5_fit = double(out.count) / (double(s) * s * s);
  const double ring = window.c4 * window.c4 - window.c3 * window.c3;
  out.c5_quarter = std::numbers::pi * window.c2 * ring / 4.0;
  out.c5_sector = std::numbers::pi * window.c2 * ring / 2.0;
  return out;
}

std::vector<SquireTriple> window_triples(int s, const CountWindow& window) {
  const int r_max = static_cast<int>(std::floor(window.c2 * s));
  std::vector<SquireTriple> out;
  for_each_window_pair(s, window, [&](int a, int b) {
    for (int r = -r_max; r <= r_max; ++r) out.push_back({a, b, r});
  });
  return out;
}

std::vector<SquireTriple> admissible_triples(int s, double delta, std::size_t max_count) {
  const auto spec = RegionSpec::make(delta, s);
  const int a_max = static_cast<int>(std::floor(s * kDeltaMax));
  const int r_lim = static_cast<int>(std::ceil(s / 6.0));
  std::vector<SquireTriple> out;
  for (int a = 1; a <= a_max; ++a) {
    for (int b = -a; b <= a; ++b) {
      const double ah = std::hypot(double(a), double(b));
      for (int r = -r_lim; r <= r_lim; ++r) {
        if (!region_contains(spec, ah, r)) continue;
        out.push_back({a, b, r});
        if (max_count > 0 && out.size() == max_count) return out;
      }
    }
  }
  return out;
}

double lambda2_threshold(int s, double alpha, double delta) {
  return lambda0_interval_in_lambda(s, alpha, delta).upper;
}

double lambda3_threshold(int s, double alpha, double delta) {
  return std::numbers::sqrt2 * lambda2_threshold(s, alpha, delta);
}

bool lambda3_covers_triple(const SquireTriple& triple, int s, double alpha, double delta) {
  const double l2 = capital_lambda(lambda2_threshold(s, alpha, delta), s, alpha);
  const double l3 = capital_lambda(lambda3_threshold(s, alpha, delta), s, alpha);
  return l3 * triple.a / triple.a_hat() >= l2 * (1.0 - 1e-12);
}

LowerBound3D lower_bound_dim3d(double g, double alpha, double gamma, double c6) {
  if (!(alpha > 0.0)) throw ValidationError("the 3-D lower bound needs alpha > 0");
  if (!(g > 0.0)) throw ValidationError("G must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (!(c6 > 0.0)) throw ValidationError("c6 must be > 0");
  LowerBound3D out;
  out.value = c6 * std::pow(g, gamma) / std::pow(alpha, 3.0 * (1.0 - gamma));
  out.mode_count = c6 / std::pow(alpha, 3.0);
  out.note =
      "c6 is a free constant supplied by the caller; the sharp upper bound is expected to scale like G^kappa "
      "with 1 < kappa < 3/2";
  return out;
}

double upper_bound_dim3d(double g, double alpha, double c8) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!(g >= 0.0)) throw ValidationError("G must be >= 0");
  return c8 * std::pow(g / alpha, 1.5);
}

}  // namespace mla
