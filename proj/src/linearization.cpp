#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "mla/dynamics.hpp"
#include "mla/errors.hpp"
#include "mla/stability2d.hpp"

namespace mla {

std::pair<int, int> chain_window(int s, int t, int r, int k_cutoff) {
  const long long kc2 = static_cast<long long>(k_cutoff) * k_cutoff;
  int lo = 1, hi = -1;
  bool any = false;
  const int reach = k_cutoff / s + 2;
  for (int n = -reach; n <= reach; ++n) {
    const long long k2 = static_cast<long long>(s) * n + r;
    if (static_cast<long long>(t) * t + k2 * k2 <= kc2) {
      if (!any) lo = n;
      hi = n;
      any = true;
    }
  }
  if (!any) throw ValidationError("chain has no member inside the cutoff");
  return {lo, hi};
}

LinearizationSpectrum full_linearization_spectrum(int s, double lambda, double nu, double alpha, int k_cutoff) {
  if (s < 1) throw ValidationError("s must be >= 1");
  if (k_cutoff < 3 * s) {
    std::ostringstream os;
    os << "k_cutoff=" << k_cutoff << " truncates the coupling chains; need k_cutoff >= 3s = " << 3 * s;
    throw ValidationError(os.str());
  }
  // Grid large enough that products of basis modes with psi_s are alias-free on the basis.
  int n = 3 * (k_cutoff + s) + 4;
  n += n % 2;
  ModelParams params{nu, alpha, SpectralGrid(n)};
  params.validate();
  const ScalarField psi_s = stationary_psi({s, lambda}, params);
  const ScalarField stream_s = inv_laplacian(psi_s);
  const ScalarField filtered_s = helmholtz_inv(psi_s, alpha);

  LinearizationSpectrum out;
  const long long kc2 = static_cast<long long>(k_cutoff) * k_cutoff;
  for (int k1 = 0; k1 <= k_cutoff; ++k1) {
    for (int k2 = -k_cutoff; k2 <= k_cutoff; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      if (static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2 > kc2) continue;
      out.basis_wavevectors.push_back({k1, k2});
    }
  }
  const int nb = static_cast<int>(out.basis_wavevectors.size());
  // Column layout: 2j -> cos(k_j.x), 2j+1 -> sin(k_j.x).
  Eigen::MatrixXd mat(2 * nb, 2 * nb);
  for (int j = 0; j < nb; ++j) {
    const auto kj = out.basis_wavevectors[j];
    for (int part = 0; part < 2; ++part) {
      const ScalarField basis = part == 0 ? ScalarField::cos_mode(params.grid, kj.k1, kj.k2)
                                          : ScalarField::sin_mode(params.grid, kj.k1, kj.k2);
      ScalarField image = jacobian(stream_s, helmholtz_inv(basis, alpha));
      image += jacobian(inv_laplacian(basis), filtered_s);
      image *= 1.0 / nu;
      image -= laplacian(basis);
      for (int i = 0; i < nb; ++i) {
        const auto ki = out.basis_wavevectors[i];
        const Complex c = image.coeff(ki.k1, ki.k2);
        mat(2 * i, 2 * j + part) = 2.0 * c.real();
        mat(2 * i + 1, 2 * j + part) = -2.0 * c.imag();
      }
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(mat, false);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve of the linearization failed");
  out.sigma_hat.reserve(2 * nb);
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.sigma_hat.push_back(-es.eigenvalues()[i]);
  return out;
}

}  // namespace mla
