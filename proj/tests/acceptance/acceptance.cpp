// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ssgap/backlund.hpp"
#include "ssgap/classical.hpp"
#include "ssgap/errors.hpp"
#include "ssgap/hamflow.hpp"
#include "ssgap/kernels.hpp"
#include "ssgap/sigma_ode.hpp"

using namespace ssgap;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kA[] = {0.0, 0.25, 0.5, 1.0, 2.5};
constexpr double kX[] = {0.25, 0.5, 1.0, 1.5};
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<kernels::GapResult> all_routes(double a, double x) {
  return {kernels::gap_fredholm(a, x), sigma::gap_ss_sigma1(a, x), sigma::gap_ss_product(a, x),
          sigma::gap_ss_cross(a, x)};
}

double pairwise(const std::vector<kernels::GapResult>& rs) {
  double w = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      w = std::max(w, std::fabs(rs[i].E - rs[j].E) / std::max(rs[i].E, rs[j].E));
    }
  }
  return w;
}

Outcome route_agreement() {
  double disc = 0.0, err = 0.0;
  for (double a : kA) {
    for (double x : kX) {
      const auto rs = all_routes(a, x);
      disc = std::max(disc, pairwise(rs));
      err = std::max(err, rs[0].err_est);
    }
  }
  return {disc <= 1e-5 && err <= 1e-8,
          fmt("max pairwise rel %.2e (<= 1e-5, target 1e-6 %s), Fredholm err_est %.2e (<= 1e-8)", disc,
              disc <= 1e-6 ? "met" : "missed", err)};
}

Outcome sine_reduction() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  const auto k = kernels::KernelSpec::spectrum_singularity(0.0);
  double off = 0.0, diag = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = d(rng), v = d(rng);
    const double z = kPi * (u - v);
    off = std::max(off, std::fabs(kernels::eval_kernel(k, u, v) - std::sin(z) / z));
    diag = std::max(diag, std::fabs(kernels::eval_kernel(k, u, u) - 1.0));
  }
  return {off <= 1e-12 && diag <= 1e-12, fmt("off-diagonal %.2e, diagonal %.2e over 10000 pairs (<= 1e-12)", off, diag)};
}

Outcome classical_hard_edge() {
  std::vector<double> grid;
  for (int i = 1; i <= 80; ++i) grid.push_back(0.25 * i);
  double ode = 0.0, fred = 0.0;
  for (int n = 1; n <= 3; ++n) {
    ode = std::max(ode, classical::he_classical_check(n, grid));
    for (double X : {1.0, 5.0, 10.0, 20.0}) {
      const double closed = std::exp(-X / 4) * classical::tau_diag(n, X / 4);
      fred = std::max(fred, std::fabs(std::exp(kernels::hard_edge_fredholm(n, X).logE) - closed) / closed);
    }
  }
  return {ode <= 1e-8 && fred <= 1e-6, fmt("sigma-form vs closed form %.2e (<= 1e-8), Fredholm %.2e (<= 1e-6)", ode, fred)};
}

struct FlowSample {
  std::vector<hamflow::FlowTrajectory> trajs;
  std::size_t redraws = 0;
};

const FlowSample& flows() {
  static const FlowSample s = [] {
    FlowSample out;
    std::mt19937_64 rng(kSeed);
    for (int i = 0; i < 100; ++i) {
      out.trajs.push_back(hamflow::random_trajectory(rng, hamflow::System::PIII, 1.0, 3.0, 1e-12, &out.redraws));
    }
    return out;
  }();
  return s;
}

Outcome theorem1() {
  std::size_t nodes = 0, within = 0;
  double proof = 0.0;
  for (const auto& tr : flows().trajs) {
    const auto r = hamflow::theorem1_residual(tr);
    nodes += r.nodes.size();
    for (const auto& n : r.nodes) within += n.radicand_ok && n.residual <= 1e-6;
    proof = std::max(proof, r.proof_identity_max);
  }
  const double frac = static_cast<double>(within) / static_cast<double>(nodes);
  return {frac >= 0.95 && proof <= 1e-8,
          fmt("%.4f of %zu nodes within 1e-6 (>= 0.95), proof identity %.2e (<= 1e-8), %zu pole redraws", frac, nodes,
              proof, flows().redraws)};
}

Outcome lemma_sum() {
  double w = 0.0;
  for (const auto& tr : flows().trajs) w = std::max(w, hamflow::lemma_sum_check(tr));
  return {w <= 1e-8, fmt("max scaled residual %.2e over 100 trajectories (<= 1e-8)", w)};
}

Outcome tau_identity() {
  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(0.05 * i);
  double ham = 0.0;
  for (double a : {0.3, 0.7, 1.2}) ham = std::max(ham, sigma::identity_hamiltonian_check(a, grid));
  double lead = 0.0;
  for (int i = 0; i <= 290; ++i) {
    const double a = 0.1 + 0.01 * i;
    const double rhs = -2.0 * sigma::c_he(a - 0.5);
    lead = std::max(lead, std::fabs(sigma::c_ss(a) * std::pow(2.0, 2.0 * a + 1.0) - rhs) / std::fabs(rhs));
  }
  return {ham <= 1e-6 && lead <= 1e-13, fmt("Hamiltonian identity %.2e (<= 1e-6), leading constant %.2e (<= 1e-13)", ham, lead)};
}

Outcome sigma1_map() {
  double w = 0.0;
  for (double a : kA) w = std::max(w, sigma::sigma1_consistency_check(a, {kX[0], kX[1], kX[2], kX[3]}));
  return {w <= 1e-6, fmt("max scaled residual %.2e (<= 1e-6)", w)};
}

Outcome backlund_rows() {
  const auto g = backlund::group_relation_check(kSeed, 200);
  const double inv = *std::max_element(g.involution.begin(), g.involution.end());
  const auto res = backlund::resolve_time_symbol(kSeed, 50);
  double map = 0.0, other = 0.0;
  for (const auto& row : res.rows) {
    map = std::max(map, row.residual[static_cast<int>(res.winner)]);
    other = std::max(other, row.residual[1 - static_cast<int>(res.winner)]);
  }
  const bool ok = inv <= 1e-9 && res.resolved && map <= 1e-6 && g.t2_shift <= 1e-9;
  return {ok, fmt("involutions %.2e (<= 1e-9), convention %s with solution maps %.2e (<= 1e-6; other convention "
                  "worst row %.2e), T2 shift %.2e (<= 1e-9)",
                  inv, res.resolved ? backlund::to_string(res.winner).c_str() : "unresolved", map, other, g.t2_shift)};
}

Outcome series_overlap() {
  using sigma::BoundaryRegime;
  std::vector<BoundaryRegime> rs;
  for (double a : {-0.5, -0.25, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) rs.push_back(BoundaryRegime::hard_edge_plus(a));
  for (double mu : {-3.0, -2.0, -1.5, -1.0, -0.75, -0.5, 0.25, 0.5}) rs.push_back(BoundaryRegime::negative_side(mu));
  for (double a : kA) rs.push_back(BoundaryRegime::spectrum_sing(a));
  double local = 0.0, asym = 0.0;
  std::size_t asym_ok = 0;
  for (const auto& r : rs) {
    const auto o = sigma::series_overlap(r);
    local = std::max(local, std::fabs(o.slope - o.predicted_local));
    asym = std::max(asym, std::fabs(o.slope - o.predicted));
    asym_ok += std::fabs(o.slope - o.predicted) <= 0.3;
  }
  return {local <= 0.3, fmt("%zu regimes, max |slope - predicted| %.3f (<= 0.3); against the asymptotic exponent "
                            "%.3f (%zu of %zu within 0.3)",
                            rs.size(), local, asym, asym_ok, rs.size())};
}

Outcome probability_sanity() {
  std::size_t count = 0;
  bool ok = true;
  for (double a : kA) {
    for (const auto& r : all_routes(a, 0.0)) ok = ok && r.E == 1.0;
    std::vector<double> prev(4, 1.0);
    for (int i = 1; i <= 30; ++i) {
      const auto rs = all_routes(a, 0.05 * i);
      for (std::size_t m = 0; m < rs.size(); ++m) {
        ok = ok && rs[m].E > 0.0 && rs[m].E <= 1.0 && rs[m].E < prev[m];
        prev[m] = rs[m].E;
        ++count;
      }
    }
  }
  return {ok, fmt("%zu values from 4 routes on x in (0, 1.5] plus E(0) for each a", count)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"route agreement", route_agreement},       {"sine-kernel reduction", sine_reduction},
      {"classical hard edge", classical_hard_edge}, {"auxiliary Hamiltonian ODE", theorem1},
      {"Hamiltonian sum", lemma_sum},              {"tau/Hamiltonian identity", tau_identity},
      {"sigma_1 consistency", sigma1_map},         {"Backlund rows", backlund_rows},
      {"series/ODE overlap", series_overlap},      {"probability sanity", probability_sanity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %s: %s [%s] (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
