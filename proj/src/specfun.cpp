#include "ssgap/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "ssgap/errors.hpp"

namespace ssgap::specfun {
namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(double x) { return x == std::nearbyint(x); }

// Lanczos coefficients for g = 7, n = 9; relative error below 2e-15 on the
// positive axis.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double gamma_positive(double x) {
  // x >= 0.5
  const double xm = x - 1.0;
  double acc = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    acc += kLanczos[i] / (xm + static_cast<double>(i));
  }
  const double t = xm + kLanczosG + 0.5;
  // Split the power to keep t^(xm+0.5) finite for x up to ~170.
  const double half = std::pow(t, 0.5 * (xm + 0.5));
  return std::sqrt(2.0 * kPi) * half * (half * std::exp(-t)) * acc;
}

void check_argument(double z) {
  if (!(z >= 0.0)) throw DomainError("Bessel argument must be nonnegative");
  if (z > 100.0) throw DomainError("Bessel argument above supported range (100)");
}

// Sum_k (sign)^k (z/2)^(2k+nu) / (k! Gamma(k+nu+1)), accumulated in long double.
double bessel_series(double nu, double z, int sign, double target) {
  const long double half_z = 0.5L * z;
  const long double q = static_cast<long double>(sign) * half_z * half_z;
  long double term = std::pow(half_z, static_cast<long double>(nu)) *
                     static_cast<long double>(rgamma(nu + 1.0));
  int k = 0;
  // For negative non-integer nu and tiny z the first term can underflow to
  // zero even though later terms do not; that only happens for z ~ 0, where
  // the result is zero or infinite anyway.
  long double sum = term;
  while (true) {
    ++k;
    term *= q / (static_cast<long double>(k) * (static_cast<long double>(k) + nu));
    sum += term;
    if (k > 4 && std::fabs(term) <= target * std::fabs(sum)) break;
    if (k > 500) break;
  }
  return static_cast<double>(sum);
}

// Hankel asymptotic coefficients a_k(nu) / z^k, truncated at the smallest term.
// While (2k - 1)^2 < 4 nu^2 the terms may still grow before the expansion turns
// over, so truncation is only considered past that point.
struct Hankel {
  double p = 0.0;
  double q = 0.0;
};

Hankel hankel_pq(double nu, double z, int max_terms) {
  const double mu = 4.0 * nu * nu;
  Hankel out;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_terms; ++k) {
    if (k > 0) {
      const double odd = 2.0 * k - 1.0;
      term *= (mu - odd * odd) / (k * 8.0 * z);
    }
    const double mag = std::fabs(term);
    if (mag > last && (2.0 * k - 1.0) * (2.0 * k - 1.0) > mu) break;
    last = mag;
    switch (k % 4) {
      case 0: out.p += term; break;
      case 1: out.q += term; break;
      case 2: out.p -= term; break;
      case 3: out.q -= term; break;
    }
    if (mag < 1e-17 * std::fabs(out.p)) break;
  }
  return out;
}

double bessel_j_asymptotic(double nu, double z, int max_terms) {
  const Hankel pq = hankel_pq(nu, z, max_terms);
  const double omega = z - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * z)) * (pq.p * std::cos(omega) - pq.q * std::sin(omega));
}

double bessel_i_asymptotic(double nu, double z, int max_terms) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double last = 1.0;
  for (int k = 1; k <= max_terms; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * z);
    if (std::fabs(term) > last && odd * odd > mu) break;
    last = std::fabs(term);
    sum += term;
    if (last < 1e-17) break;
  }
  return std::exp(z) / std::sqrt(2.0 * kPi * z) * sum;
}

// Modified Bessel series converges without cancellation; keep it well past
// the J crossover.
constexpr double kIMinAsymptotic = 30.0;

}  // namespace

void EvalPolicy::validate() const {
  if (!(series_threshold > 0.0)) throw DomainError("series_threshold must be positive");
  if (asymptotic_terms <= 0) throw DomainError("asymptotic_terms must be positive");
  if (!(target_rel_err > 0.0 && target_rel_err <= 1e-6)) {
    throw DomainError("target_rel_err must lie in (0, 1e-6]");
  }
}

double gamma(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma: non-finite argument");
  if (x <= 0.0 && is_integer(x)) throw DomainError("gamma: pole at nonpositive integer");
  if (x < 0.5) {
    return kPi / (std::sin(kPi * x) * gamma_positive(1.0 - x));
  }
  return gamma_positive(x);
}

double rgamma(double x) {
  if (x <= 0.0 && is_integer(x)) return 0.0;
  return 1.0 / gamma(x);
}

double bessel_j(double nu, double z, const EvalPolicy& policy) {
  check_argument(z);
  if (nu < 0.0 && is_integer(nu)) {
    const double v = bessel_j(-nu, z, policy);
    return (static_cast<long long>(-nu) % 2 == 0) ? v : -v;
  }
  if (z == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    throw DomainError("bessel_j: J_nu(0) is infinite for negative non-integer order");
  }
  if (z <= policy.series_threshold) {
    return bessel_series(nu, z, -1, policy.target_rel_err);
  }
  return bessel_j_asymptotic(nu, z, policy.asymptotic_terms);
}

double bessel_i(double nu, double z, const EvalPolicy& policy) {
  check_argument(z);
  if (nu < 0.0 && is_integer(nu)) return bessel_i(-nu, z, policy);
  if (z == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    throw DomainError("bessel_i: I_nu(0) is infinite for negative non-integer order");
  }
  if (z <= std::max(policy.series_threshold, kIMinAsymptotic)) {
    return bessel_series(nu, z, +1, policy.target_rel_err);
  }
  return bessel_i_asymptotic(nu, z, policy.asymptotic_terms);
}

namespace {

int miller_start(int n_max, double z) {
  const double m = std::max<double>(n_max, z);
  return static_cast<int>(m + 20.0 + std::sqrt(40.0 * m)) | 1;
}

// Downward recurrence f_{k-1} = (2k/z) f_k + sign * f_{k+1}, unnormalized,
// rescaled on the fly to stay finite.
std::vector<double> miller_downward(int n_max, double z, double sign, int start) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  double above = 0.0;
  double current = 1e-300;
  for (int k = start; k > 0; --k) {
    const double below = (2.0 * k / z) * current + sign * above;
    above = current;
    current = below;
    if (k - 1 <= n_max) out[static_cast<std::size_t>(k - 1)] = current;
    if (std::fabs(current) > 1e250) {
      current *= 1e-250;
      above *= 1e-250;
      for (int j = std::max(k - 1, 0); j <= n_max; ++j) out[static_cast<std::size_t>(j)] *= 1e-250;
    }
  }
  return out;
}

}  // namespace

std::vector<double> bessel_i_integer_family(int n_max, double z) {
  if (n_max < 0) throw DomainError("bessel_i_integer_family: n_max must be nonnegative");
  check_argument(z);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (z == 0.0) {
    out[0] = 1.0;
    return out;
  }
  out = miller_downward(n_max, z, +1.0, miller_start(n_max, z));
  const double scale = bessel_i(0.0, z) / out[0];
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> bessel_j_integer_family(int n_max, double z) {
  if (n_max < 0) throw DomainError("bessel_j_integer_family: n_max must be nonnegative");
  check_argument(z);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (z == 0.0) {
    out[0] = 1.0;
    return out;
  }
  // Keep every even order for the sum rule J_0 + 2 sum J_{2k} = 1.
  const int start = miller_start(n_max, z);
  std::vector<double> all = miller_downward(start, z, -1.0, start + 1);
  long double norm = all[0];
  for (std::size_t k = 2; k < all.size(); k += 2) norm += 2.0L * all[k];
  for (int k = 0; k <= n_max; ++k) {
    out[static_cast<std::size_t>(k)] = static_cast<double>(all[static_cast<std::size_t>(k)] / norm);
  }
  return out;
}

}  // namespace ssgap::specfun
