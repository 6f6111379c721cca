#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mla/errors.hpp"
#include "mla/stability2d.hpp"

namespace mla {

double capital_lambda(double lambda, int s, double alpha) {
  if (s < 1) throw ValidationError("s must be >= 1");
  return lambda / (2.0 * std::numbers::sqrt2 * std::numbers::pi * (1.0 + alpha * alpha * s * s));
}

double lambda_from_capital(double capital, int s, double alpha) {
  if (s < 1) throw ValidationError("s must be >= 1");
  return capital * 2.0 * std::numbers::sqrt2 * std::numbers::pi * (1.0 + alpha * alpha * s * s);
}

RecurrenceProblem RecurrenceProblem::make(int s, double t, int r, double capital_lambda, double alpha,
                                          int n_trunc) {
  if (n_trunc < 1) throw ValidationError("n_trunc must be >= 1");
  return with_window(s, t, r, capital_lambda, alpha, -n_trunc, n_trunc);
}

RecurrenceProblem RecurrenceProblem::with_window(int s, double t, int r, double capital_lambda, double alpha,
                                                 int n_lo, int n_hi) {
  RecurrenceProblem p;
  p.s = s;
  p.t = t;
  p.r = r;
  p.capital_lambda = capital_lambda;
  p.alpha = alpha;
  p.n_lo = n_lo;
  p.n_hi = n_hi;
  p.validate();
  return p;
}

double RecurrenceProblem::kappa_sq(int n) const {
  const double k2 = double(s) * n + r;
  return t * t + k2 * k2;
}

double RecurrenceProblem::d(int n, double sigma_hat) const {
  const double k2 = kappa_sq(n);
  return (k2 + alpha * alpha * k2 * k2) * (k2 + sigma_hat) / (capital_lambda * t * (k2 - double(s) * s));
}

void RecurrenceProblem::validate() const {
  if (s < 1) throw ValidationError("s must be >= 1");
  if (!(t > 0.0)) throw ValidationError("t must be > 0");
  if (!(capital_lambda >= 0.0) || !std::isfinite(capital_lambda)) throw ValidationError("Lambda must be >= 0");
  if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
  if (n_hi < n_lo) throw ValidationError("empty recurrence window");
  const double s2 = double(s) * s;
  for (int n = n_lo; n <= n_hi; ++n) {
    if (std::abs(kappa_sq(n) - s2) <= 1e-12 * s2) {
      std::ostringstream os;
      os << "singular recurrence: t^2 + (s n + r)^2 = s^2 at n=" << n << " (s=" << s << ", t=" << t << ", r=" << r
         << ")";
      throw ValidationError(os.str());
    }
  }
}

GeneralizedEigSystem build_recurrence_system(const RecurrenceProblem& prob) {
  prob.validate();
  GeneralizedEigSystem sys;
  sys.n_lo = prob.n_lo;
  const int m = prob.size();
  const double s2 = double(prob.s) * prob.s;
  const double a2 = prob.alpha * prob.alpha;
  sys.diag_a.resize(m);
  sys.diag_b.resize(m);
  sys.super_a.resize(m - 1);
  sys.sub_a.resize(m - 1);
  for (int i = 0; i < m; ++i) {
    const int n = prob.n_lo + i;
    const double k2 = prob.kappa_sq(n);
    const double b = k2 + a2 * k2 * k2;
    sys.diag_b[i] = b;
    sys.diag_a[i] = -k2 * b;
    const double coupling = prob.capital_lambda * prob.t * (k2 - s2);
    if (i + 1 < m) sys.super_a[i] = coupling;  // row n, column n+1
    if (i > 0) sys.sub_a[i - 1] = -coupling;   // row n, column n-1
  }
  return sys;
}

namespace {

Eigen::MatrixXd reduced_matrix(const GeneralizedEigSystem& sys) {
  const int m = sys.size();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double inv_b = 1.0 / sys.diag_b[i];
    mat(i, i) = sys.diag_a[i] * inv_b;
    if (i + 1 < m) mat(i, i + 1) = sys.super_a[i] * inv_b;
    if (i > 0) mat(i, i - 1) = sys.sub_a[i - 1] * inv_b;
  }
  return mat;
}

double generalized_residual(const GeneralizedEigSystem& sys, const std::vector<double>& e, double sigma) {
  const int m = sys.size();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < m; ++i) {
    double ae = sys.diag_a[i] * e[i];
    if (i + 1 < m) ae += sys.super_a[i] * e[i + 1];
    if (i > 0) ae += sys.sub_a[i - 1] * e[i - 1];
    const double be = sys.diag_b[i] * e[i];
    num += (ae - sigma * be) * (ae - sigma * be);
    den += be * be;
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

struct Candidate {
  bool found = false;
  StabilityResult result;
};

/// Solves (M - mu I) x = rhs for tridiagonal M stored as (sub, diag, super); partial pivoting.
std::vector<double> tridiag_shifted_solve(const std::vector<double>& sub, const std::vector<double>& diag,
                                          const std::vector<double>& sup, double mu, std::vector<double> rhs) {
  const int m = static_cast<int>(diag.size());
  // Row i holds up to three nonzeros at columns i, i+1, i+2 after elimination.
  std::vector<double> d(m), u1(m, 0.0), u2(m, 0.0);
  for (int i = 0; i < m; ++i) {
    d[i] = diag[i] - mu;
    if (i + 1 < m) u1[i] = sup[i];
  }
  std::vector<double> l(m > 0 ? m - 1 : 0, 0.0);
  for (int i = 0; i + 1 < m; ++i) {
    double below_d = sub[i], below_u1 = d[i + 1], below_u2 = (i + 2 < m) ? u1[i + 1] : 0.0;
    if (std::abs(below_d) > std::abs(d[i])) {
      std::swap(d[i], below_d);
      std::swap(u1[i], below_u1);
      std::swap(u2[i], below_u2);
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (d[i] == 0.0) d[i] = 1e-300;
    const double f = below_d / d[i];
    d[i + 1] = below_u1 - f * u1[i];
    if (i + 2 < m) u1[i + 1] = below_u2 - f * u2[i];
    rhs[i + 1] -= f * rhs[i];
  }
  if (m > 0 && d[m - 1] == 0.0) d[m - 1] = 1e-300;
  for (int i = m - 1; i >= 0; --i) {
    double acc = rhs[i];
    if (i + 1 < m) acc -= u1[i] * rhs[i + 1];
    if (i + 2 < m) acc -= u2[i] * rhs[i + 2];
    rhs[i] = acc / d[i];
  }
  return rhs;
}

std::vector<double> inverse_iteration(const GeneralizedEigSystem& sys, double lambda) {
  const int m = sys.size();
  std::vector<double> sub(m > 0 ? m - 1 : 0), diag(m), sup(m > 0 ? m - 1 : 0);
  for (int i = 0; i < m; ++i) {
    const double inv_b = 1.0 / sys.diag_b[i];
    diag[i] = sys.diag_a[i] * inv_b;
    if (i + 1 < m) sup[i] = sys.super_a[i] * inv_b;
    if (i > 0) sub[i - 1] = sys.sub_a[i - 1] * inv_b;
  }
  const double mu = lambda + 1e-12 * (1.0 + std::abs(lambda));
  std::vector<double> x(m, 1.0);
  for (int it = 0; it < 3; ++it) {
    x = tridiag_shifted_solve(sub, diag, sup, mu, std::move(x));
    double nrm = 0.0;
    for (double v : x) nrm = std::max(nrm, std::abs(v));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
    for (double& v : x) v /= nrm;
  }
  return x;
}

/// One solve on a fixed window: largest real eigenvalue whose eigenvector decays.
Candidate solve_window(const RecurrenceProblem& prob, const RecurrenceOptions& opt) {
  const auto sys = build_recurrence_system(prob);
  Eigen::EigenSolver<Eigen::MatrixXd> es(reduced_matrix(sys), false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigensolver failed on the recurrence system");
  }
  const auto& vals = es.eigenvalues();
  std::vector<int> order(vals.size());
  for (int i = 0; i < vals.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a].real() > vals[b].real(); });

  Candidate best;
  for (int idx : order) {
    const auto lam = vals[idx];
    if (std::abs(lam.imag()) >= opt.reality_tol * (1.0 + std::abs(lam.real()))) continue;
    std::vector<double> e = inverse_iteration(sys, lam.real());
    int peak = 0;
    for (int i = 1; i < static_cast<int>(e.size()); ++i) {
      if (std::abs(e[i]) > std::abs(e[peak])) peak = i;
    }
    const double scale = e[peak];
    for (auto& x : e) x /= scale;
    const double tail = std::max(std::abs(e.front()), std::abs(e.back()));
    if (tail >= opt.tail_tol) continue;
    best.found = true;
    best.result.sigma_hat = lam.real();
    best.result.capital_lambda = prob.capital_lambda;
    best.result.n_lo = prob.n_lo;
    best.result.n_hi = prob.n_hi;
    best.result.tail_ratio = tail;
    best.result.eigen_residual = generalized_residual(sys, e, lam.real());
    best.result.eigenvector = std::move(e);
    break;
  }
  return best;
}

RecurrenceProblem widened(const RecurrenceProblem& p) {
  const int grow = (p.size() + 1) / 2;
  RecurrenceProblem q = p;
  q.n_lo -= grow;
  q.n_hi += grow;
  q.validate();
  return q;
}

}  // namespace

std::vector<std::complex<double>> chain_spectrum(const RecurrenceProblem& prob) {
  const auto sys = build_recurrence_system(prob);
  Eigen::EigenSolver<Eigen::MatrixXd> es(reduced_matrix(sys), false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on the recurrence system");
  std::vector<std::complex<double>> out(es.eigenvalues().begin(), es.eigenvalues().end());
  return out;
}

StabilityResult leading_real_sigma(const RecurrenceProblem& prob, const RecurrenceOptions& options) {
  RecurrenceProblem cur = prob;
  Candidate prev = solve_window(cur, options);
  while (true) {
    const int half_width = std::max(-cur.n_lo, cur.n_hi);
    if (half_width > options.max_n_trunc) {
      std::ostringstream os;
      os << "recurrence did not converge within n_trunc=" << options.max_n_trunc << " (s=" << prob.s
         << ", t=" << prob.t << ", r=" << prob.r << ", Lambda=" << prob.capital_lambda << ")";
      throw NumericalError(os.str());
    }
    RecurrenceProblem next = widened(cur);
    Candidate now = solve_window(next, options);
    if (prev.found && now.found) {
      const double sp = prev.result.sigma_hat;
      const double sn = now.result.sigma_hat;
      if (std::abs(sn - sp) < options.convergence_tol * (1.0 + std::abs(sn))) return prev.result;
    }
    cur = next;
    prev = std::move(now);
  }
}

std::optional<StabilityResult> unstable_sigma(const RecurrenceProblem& prob, const RecurrenceOptions& options) {
  auto res = leading_real_sigma(prob, options);
  if (res.sigma_hat > 0.0) return res;
  return std::nullopt;
}

LambdaInterval lambda0_interval(int s, double alpha, double delta) {
  const double f = 1.0 + alpha * alpha * s * s;
  return {delta * delta * s * f / std::numbers::sqrt2,
          55.0 * std::sqrt(5.0) / (63.0 * std::numbers::sqrt2) * s * f / (delta * delta)};
}

LambdaInterval lambda0_interval_inviscid_filter(int s, double delta) {
  return {delta * delta * s / std::numbers::sqrt2, 5.0 / (3.0 * std::sqrt(3.0)) * s / (delta * delta)};
}

LambdaInterval lambda0_interval_in_lambda(int s, double alpha, double delta) {
  const double f = 1.0 + alpha * alpha * s * s;
  const double pi = std::numbers::pi;
  return {2.0 * pi * delta * delta * s * f * f, 110.0 * std::sqrt(5.0) * pi / 63.0 * s * f * f / (delta * delta)};
}

LambdaInterval lambda0_interval_in_lambda_inviscid_filter(int s, double delta) {
  const double pi = std::numbers::pi;
  return {2.0 * pi * delta * delta * s, 20.0 * pi / (3.0 * std::sqrt(6.0)) * s / (delta * delta)};
}

double lambda0_threshold(int s, double t, int r, double alpha, double delta, double rel_tol,
                         const RecurrenceOptions& options) {
  const auto iv = lambda0_interval(s, alpha, delta);
  double lo = iv.lower / 10.0;
  double hi = iv.upper * 10.0;

  // The decay of e_n is slowest at the largest Lambda, so a window converged there
  // serves the whole bracket.
  const auto at_hi = leading_real_sigma(RecurrenceProblem::make(s, t, r, hi, alpha, 16), options);
  const auto at_lo = leading_real_sigma(RecurrenceProblem::make(s, t, r, lo, alpha, 16), options);
  if (!(at_lo.sigma_hat < 0.0 && at_hi.sigma_hat > 0.0)) {
    std::ostringstream os;
    os << "sigma does not change sign on [" << lo << ", " << hi << "]: sigma(lo)=" << at_lo.sigma_hat
       << ", sigma(hi)=" << at_hi.sigma_hat;
    throw NumericalError(os.str());
  }
  const int n_lo = at_hi.n_lo;
  const int n_hi = at_hi.n_hi;
  RecurrenceOptions fixed = options;
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    auto prob = RecurrenceProblem::with_window(s, t, r, mid, alpha, n_lo, n_hi);
    Candidate c = solve_window(prob, fixed);
    if (!c.found) throw NumericalError("no decaying real eigenvalue inside the Lambda_0 bracket");
    if (c.result.sigma_hat > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::sqrt(lo * hi);
}

}  // namespace mla
