#pragma once

#include <vector>

namespace ssgap::classical {

/// det[I_{j-k}(2 sqrt X)]_{j,k<n}; 1 for n = 0.
double tau_diag(int n, double X);

/// e^X det[J_{j-k}(2 sqrt X)]_{j,k<n}, with J_{-m} = (-1)^m J_m.
double tau_cross(int n, double X);

/// tau_cross(n, -X) for X >= 0. The entries J_m(2i sqrt X) = i^m I_m(2 sqrt X)
/// are assembled into a complex matrix and factorized as is.
double tau_cross_negated(int n, double X);

/// Max over the grid of the relative residual of
///   e^{-2X} tau_diag(n-1, X) tau_diag(n, X) = tau_cross_negated(n, X) tau_cross_negated(n-1, X).
/// Requires n >= 1.
double classical_identity_check(int n, const std::vector<double>& X_grid);

/// Max over the grid of |e^{-X/4} tau_diag(n, X/4) - E_hard(n, X)| / E_hard with
/// E_hard from the sigma-form route at a = n.
double he_classical_check(int n, const std::vector<double>& X_grid, double tol = 1e-12);

}  // namespace ssgap::classical
