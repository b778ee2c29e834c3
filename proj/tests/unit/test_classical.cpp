#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ssgap/classical.hpp"
#include "ssgap/errors.hpp"
#include "ssgap/specfun.hpp"

using namespace ssgap;
using namespace ssgap::classical;

namespace {

// Laplace expansion along the first row; small n only.
double cofactor_det(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1.0;
  double d = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<double>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<double> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    d += (c % 2 ? -1.0 : 1.0) * m[0][c] * cofactor_det(minor);
  }
  return d;
}

double toeplitz_oracle(int n, double X, bool cross) {
  const double z = 2.0 * std::sqrt(X);
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const int d = j - k, ad = std::abs(d);
      if (cross) {
        m[j][k] = specfun::bessel_j(ad, z) * ((d < 0 && ad % 2) ? -1.0 : 1.0);
      } else {
        m[j][k] = specfun::bessel_i(ad, z);
      }
    }
  }
  return (cross ? std::exp(X) : 1.0) * cofactor_det(m);
}

}  // namespace

TEST_CASE("small determinants") {
  const double X = 0.8, z = 2.0 * std::sqrt(X);
  CHECK(tau_diag(0, X) == 1.0);
  CHECK(tau_cross(0, X) == std::exp(X));
  CHECK(tau_diag(1, X) == doctest::Approx(specfun::bessel_i(0, z)).epsilon(1e-14));
  CHECK(tau_cross(1, X) == doctest::Approx(std::exp(X) * specfun::bessel_j(0, z)).epsilon(1e-14));
  const double i0 = specfun::bessel_i(0, z), i1 = specfun::bessel_i(1, z);
  CHECK(tau_diag(2, X) == doctest::Approx(i0 * i0 - i1 * i1).epsilon(1e-13));
  CHECK(tau_cross_negated(1, X) == doctest::Approx(std::exp(-X) * i0).epsilon(1e-14));
}

TEST_CASE("against mpmath at X = 1.5") {
  CHECK(std::fabs(tau_diag(2, 1.5) / kTauAt1p5[0] - 1.0) < 1e-13);
  CHECK(std::fabs(tau_diag(3, 1.5) / kTauAt1p5[1] - 1.0) < 1e-13);
  CHECK(std::fabs(tau_cross(2, 1.5) / kTauAt1p5[2] - 1.0) < 1e-13);
  CHECK(std::fabs(tau_cross(3, 1.5) / kTauAt1p5[3] - 1.0) < 1e-12);
}

TEST_CASE("LU determinants against cofactor expansion") {
  for (int n = 1; n <= 4; ++n) {
    for (double X : {0.3, 2.0, 7.5}) {
      CAPTURE(n);
      CAPTURE(X);
      const double d = toeplitz_oracle(n, X, false), c = toeplitz_oracle(n, X, true);
      CHECK(std::fabs(tau_diag(n, X) - d) <= 1e-10 * std::max(1.0, std::fabs(d)));
      CHECK(std::fabs(tau_cross(n, X) - c) <= 1e-10 * std::max(1.0, std::fabs(c)));
    }
  }
}

TEST_CASE("bilinear identity") {
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.25 * i);
  for (int n = 1; n <= 3; ++n) CHECK(classical_identity_check(n, grid) <= 1e-12);
  CHECK_THROWS_AS(classical_identity_check(0, grid), DomainError);
}

TEST_CASE("hard-edge gap at integer a") {
  const std::vector<double> grid{0.5, 2.0, 5.0, 12.0, 20.0};
  for (int n = 0; n <= 3; ++n) CHECK(he_classical_check(n, grid) <= 1e-8);
  // e^{-X/4} tau_diag(n, X/4) is a probability decreasing in X
  for (int n = 1; n <= 3; ++n) {
    double prev = 1.0;
    for (double X = 0.5; X <= 20.0; X += 0.5) {
      const double e = std::exp(-X / 4) * tau_diag(n, X / 4);
      CHECK(e > 0.0);
      CHECK(e < prev);
      prev = e;
    }
  }
}
