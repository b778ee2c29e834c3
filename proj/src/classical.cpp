#include "ssgap/classical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>

#include "ssgap/errors.hpp"
#include "ssgap/sigma_ode.hpp"
#include "ssgap/specfun.hpp"

namespace ssgap::classical {
namespace {

void check_args(int n, double X) {
  if (n < 0) throw DomainError("Toeplitz dimension must be nonnegative");
  if (!(X >= 0.0) || !std::isfinite(X)) throw DomainError("Toeplitz argument X must be finite and >= 0");
}

// Determinant of the Toeplitz matrix with entries f[|j - k|] times sign(j - k)^parity.
double toeplitz_det(int n, const std::vector<double>& f, bool odd_negative_lower) {
  if (n == 0) return 1.0;
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const int d = j - k;
      double v = f[static_cast<std::size_t>(std::abs(d))];
      if (odd_negative_lower && d < 0 && (-d) % 2 == 1) v = -v;
      m(j, k) = v;
    }
  }
  return m.partialPivLu().determinant();
}

}  // namespace

double tau_diag(int n, double X) {
  check_args(n, X);
  if (n == 0) return 1.0;
  return toeplitz_det(n, specfun::bessel_i_integer_family(n - 1, 2.0 * std::sqrt(X)), false);
}

double tau_cross(int n, double X) {
  check_args(n, X);
  if (n == 0) return std::exp(X);
  return std::exp(X) * toeplitz_det(n, specfun::bessel_j_integer_family(n - 1, 2.0 * std::sqrt(X)), true);
}

double tau_cross_negated(int n, double X) {
  check_args(n, X);
  if (n == 0) return std::exp(-X);
  const double z = 2.0 * std::sqrt(X);
  const std::complex<double> pow_i[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const int d = j - k;
      // J_d(i z) = i^d I_|d|(z) for either sign of d.
      m(j, k) = pow_i[((d % 4) + 4) % 4] * specfun::bessel_i(std::abs(d), z);
    }
  }
  const std::complex<double> det = m.partialPivLu().determinant();
  if (std::fabs(det.imag()) > 1e-10 * std::max(1.0, std::abs(det))) {
    throw NumericError("tau_cross_negated: determinant has a nonzero imaginary part");
  }
  return std::exp(-X) * det.real();
}

double classical_identity_check(int n, const std::vector<double>& X_grid) {
  if (n < 1) throw DomainError("classical_identity_check needs n >= 1");
  double worst = 0.0;
  for (double X : X_grid) {
    if (!(X > 0.0)) throw DomainError("classical_identity_check: grid points must be positive");
    const double lhs = std::exp(-2.0 * X) * tau_diag(n - 1, X) * tau_diag(n, X);
    const double rhs = tau_cross_negated(n, X) * tau_cross_negated(n - 1, X);
    worst = std::max(worst, std::fabs(lhs - rhs) / std::fabs(lhs));
  }
  return worst;
}

double he_classical_check(int n, const std::vector<double>& X_grid, double tol) {
  if (n < 0) throw DomainError("he_classical_check needs n >= 0");
  double worst = 0.0;
  for (double X : X_grid) {
    if (!(X > 0.0) || X > 20.0) throw DomainError("he_classical_check: grid must lie in (0, 20]");
    const double closed = std::exp(-0.25 * X) * tau_diag(n, 0.25 * X);
    const double ode = sigma::gap_hard_edge(n, X, tol).E;
    worst = std::max(worst, std::fabs(closed - ode) / ode);
  }
  return worst;
}

}  // namespace ssgap::classical
