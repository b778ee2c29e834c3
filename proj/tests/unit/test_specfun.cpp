#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ssgap/errors.hpp"
#include "ssgap/specfun.hpp"

using namespace ssgap;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }
}  // namespace

TEST_CASE("gamma against mpmath") {
  for (std::size_t i = 0; i < std::size(kGammaArgs); ++i) {
    CAPTURE(kGammaArgs[i]);
    CHECK(rel(specfun::gamma(kGammaArgs[i]), kGamma[i]) < 1e-14);
    CHECK(rel(specfun::rgamma(kGammaArgs[i]), 1.0 / kGamma[i]) < 1e-14);
  }
}

TEST_CASE("gamma poles") {
  CHECK_THROWS_AS(specfun::gamma(0.0), DomainError);
  CHECK_THROWS_AS(specfun::gamma(-3.0), DomainError);
  CHECK(specfun::rgamma(-2.0) == 0.0);
}

TEST_CASE("real-order Bessel J against mpmath") {
  for (std::size_t i = 0; i < std::size(kBesselJ); ++i) {
    const double nu = kBesselArgs[i][0], z = kBesselArgs[i][1];
    CAPTURE(nu);
    CAPTURE(z);
    CHECK(std::fabs(specfun::bessel_j(nu, z) - kBesselJ[i]) < 1e-12);
  }
}

TEST_CASE("real-order Bessel I against mpmath") {
  for (std::size_t i = 0; i < std::size(kBesselI); ++i) {
    const double nu = kBesselIArgs[i][0], z = kBesselIArgs[i][1];
    CAPTURE(nu);
    CAPTURE(z);
    CHECK(rel(specfun::bessel_i(nu, z), kBesselI[i]) < 1e-13);
  }
}

TEST_CASE("half-integer closed forms") {
  const double pi = 3.14159265358979323846;
  for (double z : {0.3, 2.0, 9.0, 15.0, 40.0}) {
    CAPTURE(z);
    CHECK(std::fabs(specfun::bessel_j(0.5, z) - std::sqrt(2.0 / (pi * z)) * std::sin(z)) < 1e-14);
    CHECK(std::fabs(specfun::bessel_j(-0.5, z) - std::sqrt(2.0 / (pi * z)) * std::cos(z)) < 1e-14);
  }
  CHECK(rel(specfun::bessel_i(0.5, 3.0), std::sqrt(2.0 / (pi * 3.0)) * std::sinh(3.0)) < 1e-14);
}

TEST_CASE("integer families agree with point evaluation") {
  for (double z : {0.5, 2.0, 8.0, 20.0}) {
    const auto jf = specfun::bessel_j_integer_family(6, z);
    const auto ifam = specfun::bessel_i_integer_family(6, z);
    double sum = jf[0];
    for (int k = 1; k <= 6; ++k) {
      CAPTURE(z);
      CAPTURE(k);
      CHECK(std::fabs(jf[k] - specfun::bessel_j(k, z)) < 1e-13);
      CHECK(rel(ifam[k], specfun::bessel_i(k, z)) < 1e-13);
      if (k % 2 == 0) sum += 2.0 * jf[k];
    }
  }
  for (double z : {0.5, 2.0, 8.0, 20.0}) {
    const auto jf = specfun::bessel_j_integer_family(60, z);
    double sum = jf[0];
    for (int k = 2; k <= 60; k += 2) sum += 2.0 * jf[k];
    CHECK(std::fabs(sum - 1.0) < 1e-13);
  }
}

TEST_CASE("recurrences") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> nu_d(0.0, 4.0), z_d(0.2, 60.0);
  for (int i = 0; i < 400; ++i) {
    const double nu = nu_d(rng) + 1.0, z = z_d(rng);
    const double jm = specfun::bessel_j(nu - 1, z), j = specfun::bessel_j(nu, z), jp = specfun::bessel_j(nu + 1, z);
    CHECK(std::fabs(jm + jp - 2.0 * nu / z * j) < 1e-9 * std::max({1.0, std::fabs(jm), std::fabs(jp)}));
    const double im = specfun::bessel_i(nu - 1, z), in = specfun::bessel_i(nu, z), ip = specfun::bessel_i(nu + 1, z);
    CHECK(std::fabs(im - ip - 2.0 * nu / z * in) < 1e-9 * im);
  }
  for (double x = 0.1; x <= 20.0; x += 0.37) {
    CHECK(std::fabs(specfun::gamma(x + 1) / (x * specfun::gamma(x)) - 1.0) < 1e-12);
  }
}

TEST_CASE("series and asymptotic branches meet") {
  for (double nu : {0.0, 0.3, 1.5, 2.7}) {
    // one ulp either side of the switch points
    const double zj = 12.0, zi = 30.0;
    CHECK(std::fabs(specfun::bessel_j(nu, zj) - specfun::bessel_j(nu, std::nextafter(zj, 13.0))) < 1e-9);
    CHECK(std::fabs(specfun::bessel_i(nu, zi) / specfun::bessel_i(nu, std::nextafter(zi, 31.0)) - 1.0) < 1e-9);
  }
}

TEST_CASE("integer-order I is positive and increasing") {
  for (int n = 0; n <= 5; ++n) {
    double prev = specfun::bessel_i(n, 0.0);
    for (double z = 0.25; z <= 50.0; z += 0.25) {
      const double v = specfun::bessel_i(n, z);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(specfun::bessel_j(0.5, -1.0), DomainError);
  CHECK(specfun::bessel_j(0.0, 0.0) == 1.0);
  CHECK(specfun::bessel_i(2.0, 0.0) == 0.0);
}
