#include <doctest.h>

#include <cmath>
#include <random>

#include "ssgap/errors.hpp"
#include "ssgap/hamflow.hpp"

using namespace ssgap;
using namespace ssgap::hamflow;

namespace {

HamState piii(double t, double q, double p, double v1, double v2, double e0 = 1.0, double einf = 1.0) {
  return {System::PIII, t, q, p, {v1, v2, e0, einf}};
}

HamState with_qp(HamState st, double q, double p) {
  st.q = q;
  st.p = p;
  return st;
}

}  // namespace

TEST_CASE("Hamiltonian and field at the origin") {
  const HamState st = piii(1.7, 0.0, 0.0, 0.3, -0.4, 1.5, 0.5);
  CHECK(time_hamiltonian(st) == 0.0);
  const Rates r = vector_field(st);
  CHECK(r.dq == doctest::Approx(2.0 * 1.5));
  CHECK(r.dp == doctest::Approx(-0.5 * (0.3 - 0.4)));
  HamState sp{System::PIIIprime, 1.5, 0.5, 0.2, {0.3, 0.7, 1.0, 1.0}};
  CHECK(time_hamiltonian(sp) == doctest::Approx(0.48).epsilon(1e-14));
}

TEST_CASE("field matches finite differences of tH") {
  for (System sys : {System::PIII, System::PIIIprime}) {
    HamState st{sys, 1.3, 0.4, -0.7, {0.6, -1.1, 1.0, 1.0}};
    const double h = 1e-5;
    const double dHdp = (time_hamiltonian(with_qp(st, st.q, st.p + h)) - time_hamiltonian(with_qp(st, st.q, st.p - h))) / (2 * h);
    const double dHdq = (time_hamiltonian(with_qp(st, st.q + h, st.p)) - time_hamiltonian(with_qp(st, st.q - h, st.p))) / (2 * h);
    const Rates r = vector_field(st);
    CHECK(std::fabs(r.dq - dHdp / st.time) < 1e-9);
    CHECK(std::fabs(r.dp + dHdq / st.time) < 1e-9);
    HamState lo = st, hi = st;
    lo.time -= h;
    hi.time += h;
    CHECK(std::fabs(explicit_time_partial(st) - (time_hamiltonian(hi) - time_hamiltonian(lo)) / (2 * h)) < 1e-9);
  }
}

TEST_CASE("time 0 is singular") {
  CHECK_THROWS_AS(vector_field(piii(0.0, 0.1, 0.1, 0.0, 0.0)), SingularPointError);
  CHECK_THROWS_AS(integrate_flow(piii(0.0, 0.1, 0.1, 0.0, 0.0), 1.0), SingularPointError);
}

TEST_CASE("energy bookkeeping and tolerance halving") {
  std::mt19937_64 rng(1);
  const double tol = 1e-10;
  const FlowTrajectory a = random_trajectory(rng, System::PIII, 1.0, 1.5, tol);
  const FlowTrajectory b = integrate_flow(a.state(1.0), 1.5, tol / 2);
  double diff = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double t = 1.0 + 0.025 * i;
    const HamState x = a.state(t), y = b.state(t);
    diff = std::max(diff, std::max(std::fabs(x.q - y.q), std::fabs(x.p - y.p)) / std::max({1.0, std::fabs(y.q), std::fabs(y.p)}));
  }
  CHECK(diff <= 10 * tol);
  // d(tH)/dt along the flow is the explicit partial
  const FlowTrajectory c = random_trajectory(rng, System::PIII, 1.0, 3.0, 1e-12);
  const double h = 1e-3;
  for (double t : {1.2, 1.9, 2.6}) {
    const double c1 = (c.time_hamiltonian_at(t + h) - c.time_hamiltonian_at(t - h)) / (2 * h);
    const double c2 = (c.time_hamiltonian_at(t + h / 2) - c.time_hamiltonian_at(t - h / 2)) / h;
    const double fd = (4 * c2 - c1) / 3;
    CHECK(std::fabs(fd - explicit_time_partial(c.state(t))) < 1e-7 * std::max(1.0, std::fabs(fd)));
  }
}

TEST_CASE("aux h and its derivatives") {
  const HamState zero = piii(2.0, 0.0, 0.0, 0.5, 0.1);
  CHECK(aux_h(zero).h == doctest::Approx(0.5));  // (2 v1 + 1)^2 / 8
  std::mt19937_64 rng(2);
  const FlowTrajectory tr = random_trajectory(rng, System::PIII, 1.0, 2.5, 1e-12);
  const double h = 1e-3;
  for (double t : {1.4, 2.0}) {
    auto d = [&](auto f) {
      // Richardson-extrapolated central difference
      const double c1 = (f(t + h) - f(t - h)) / (2 * h);
      const double c2 = (f(t + h / 2) - f(t - h / 2)) / h;
      return (4 * c2 - c1) / 3;
    };
    const AuxH x = aux_h(tr.state(t));
    CHECK(std::fabs(d([&](double u) { return aux_h(tr.state(u)).h; }) - x.h1) < 1e-8);
    CHECK(std::fabs(d([&](double u) { return aux_h(tr.state(u)).h1; }) - x.h2) < 1e-7);
  }
}

TEST_CASE("second-degree equation on random trajectories") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 6; ++i) {
    const FlowTrajectory tr = random_trajectory(rng, System::PIII, 1.0, 2.0, 1e-12);
    const Theorem1Result r = theorem1_residual(tr);
    CHECK(r.fraction_within(1e-6) >= 0.95);
    CHECK(r.proof_identity_max <= 1e-8);
    CHECK(scalar_piii_residual(tr).max_residual <= 1e-6);
  }
}

TEST_CASE("square-root term drops out when v2 - v1 - 1 = 0") {
  const HamState st = piii(1.4, 0.7, -0.3, 0.2, 1.2);
  CHECK(std::fabs(theorem1_point_residual(st, 1) - theorem1_point_residual(st, -1)) < 1e-15);
  CHECK(theorem1_point_residual(st, 1) < 1e-12);
}

TEST_CASE("recovering q and p") {
  std::mt19937_64 rng(3);
  const FlowTrajectory tr = random_trajectory(rng, System::PIII, 1.0, 2.0, 1e-12);
  for (double t : {1.25, 1.5, 1.75}) {
    const HamState st = tr.state(t);
    const AuxH aux = aux_h(st);
    double best = INFINITY;
    for (int eps : {1, -1}) {
      try {
        const auto [q, p] = recover_qp(aux, t, st.params, eps);
        best = std::min(best, std::max(std::fabs(q - st.q), std::fabs(p - st.p)));
      } catch (const NumericError&) {
      }
    }
    CHECK(best < 1e-7);
  }
  CHECK_THROWS_AS(recover_qp({0.0, 1.0, 0.0}, 1.0, {0.1, 0.2, 1.0, 1.0}, 1), DomainError);
}

TEST_CASE("P_III' splitting of tH") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 4; ++i) {
    const FlowTrajectory tr = random_trajectory(rng, System::PIII, 1.0, 1.8, 1e-12);
    CHECK(lemma_sum_check(tr) <= 1e-8);
    CHECK(lemma_first_line_check(tr) <= 1e-8);
  }
}

TEST_CASE("poles are reported") {
  HamState st{System::PIIIprime, 1.0, -5.0, 0.0, {0.0, 0.0, 1.0, 1.0}};
  CHECK_THROWS_AS(integrate_flow(st, 10.0), PoleError);
}
