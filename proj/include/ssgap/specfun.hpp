#pragma once

#include <vector>

namespace ssgap::specfun {

/// Controls the series / asymptotic crossover of the Bessel evaluators.
struct EvalPolicy {
  double series_threshold = 12.0;  ///< power series for z <= threshold
  int asymptotic_terms = 40;       ///< cap on Hankel expansion terms
  double target_rel_err = 1e-15;

  void validate() const;
};

/// Gamma function for real x (Lanczos g=7 with reflection below 1/2).
/// Throws DomainError at the poles 0, -1, -2, ...
double gamma(double x);

/// 1/Gamma(x), zero at the poles.
double rgamma(double x);

/// Bessel function of the first kind J_nu(z) for real order and z in [0, 100].
double bessel_j(double nu, double z, const EvalPolicy& policy = {});

/// Modified Bessel function I_nu(z) for real order and z in [0, 100].
double bessel_i(double nu, double z, const EvalPolicy& policy = {});

/// J_0(z) .. J_{n_max}(z) by downward (Miller) recurrence.
std::vector<double> bessel_j_integer_family(int n_max, double z);

/// I_0(z) .. I_{n_max}(z) by downward (Miller) recurrence, normalized by the
/// series value of I_0.
std::vector<double> bessel_i_integer_family(int n_max, double z);

}  // namespace ssgap::specfun
