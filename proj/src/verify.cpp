#include "ssgap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "ssgap/backlund.hpp"
#include "ssgap/classical.hpp"
#include "ssgap/errors.hpp"
#include "ssgap/hamflow.hpp"
#include "ssgap/kernels.hpp"
#include "ssgap/sigma_ode.hpp"

namespace ssgap::verify {
namespace {

constexpr double kPi = 3.14159265358979323846;

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (!in || !(in >> std::ws).eof()) throw DomainError("config: bad value for " + key + ": '" + value + "'");
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * (i + 1) / n;
  return g;
}

Report theorem1_suite(const RunConfig& cfg, std::size_t trials, std::uint64_t seed) {
  using namespace hamflow;
  Report rep;
  rep.suite = "theorem1";
  std::mt19937_64 rng(seed);
  std::size_t nodes = 0, within = 0, radicand = 0, redraws = 0, degenerate = 0, scalar_skipped = 0;
  double proof = 0.0, round_trip = 0.0, scalar = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const FlowTrajectory traj = random_trajectory(rng, System::PIII, 1.0, 3.0, cfg.ode_rel_tol, &redraws);
    const Theorem1Result t1 = theorem1_residual(traj);
    nodes += t1.nodes.size();
    for (const auto& n : t1.nodes) within += n.radicand_ok && n.residual <= 1e-6;
    radicand += t1.radicand_failures;
    proof = std::max(proof, t1.proof_identity_max);
    for (std::size_t k = 0; k < traj.nodes().size(); ++k) {
      const HamState st = traj.node_state(k);
      const int eps = 4.0 * st.q * st.p - 2.0 * st.params.v1 - 1.0 >= 0.0 ? 1 : -1;
      try {
        const auto [q, p] = recover_qp(aux_h(st), st.time, st.params, eps);
        round_trip = std::max(round_trip, std::max(std::fabs(q - st.q), std::fabs(p - st.p)) /
                                              std::max({1.0, std::fabs(st.q), std::fabs(st.p)}));
      } catch (const DegenerateRecoveryError&) {
        ++degenerate;
      } catch (const DomainError&) {
        ++degenerate;  // h - t h' = 0 at this node
      }
    }
    const ScalarCheck sc = scalar_piii_residual(traj);
    scalar = std::max(scalar, sc.max_residual);
    scalar_skipped += sc.skipped;
  }
  const double frac = nodes ? static_cast<double>(within) / static_cast<double>(nodes) : 1.0;
  rep.add("theorem1.fraction_of_nodes_above_1e-6", 1.0 - frac, 0.05);
  rep.add("theorem1.radicand_failure_fraction", nodes ? static_cast<double>(radicand) / nodes : 0.0, 0.05);
  rep.add("theorem1.proof_identity", proof, 1e-8);
  rep.add("theorem1.recover_qp_round_trip", round_trip, 1e-7);
  rep.add("theorem1.scalar_piii", scalar, 1e-6);
  rep.resolved["theorem1_nodes"] = nodes;
  rep.resolved["theorem1_pole_redraws"] = redraws;
  rep.resolved["recover_qp_degenerate_nodes"] = degenerate;
  rep.resolved["scalar_piii_skipped_nodes"] = scalar_skipped;
  return rep;
}

Report lemma_suite(const RunConfig& cfg, std::size_t trials, std::uint64_t seed) {
  using namespace hamflow;
  Report rep;
  rep.suite = "lemma";
  std::mt19937_64 rng(seed);
  double sum = 0.0, first = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const FlowTrajectory traj = random_trajectory(rng, System::PIII, 1.0, 3.0, cfg.ode_rel_tol);
    sum = std::max(sum, lemma_sum_check(traj));
    first = std::max(first, lemma_first_line_check(traj));
  }
  rep.add("lemma.hamiltonian_sum", sum, 1e-8);
  rep.add("lemma.first_line", first, 1e-8);
  return rep;
}

Report backlund_suite(const RunConfig&, std::size_t trials, std::uint64_t seed) {
  using namespace backlund;
  Report rep;
  rep.suite = "backlund";
  const ConventionResolution res = resolve_time_symbol(seed, std::max<std::size_t>(1, trials / 4));
  const GroupReport g = group_relation_check(seed, trials, res.winner);
  const char* inv[4] = {"s0", "s1", "s2", "s_minus"};
  for (int k = 0; k < 4; ++k) rep.add(std::string("backlund.involution.") + inv[k], g.involution[k], 1e-9);
  rep.add("backlund.reflection_s_minus_s2", g.reflection_composite, 1e-9);
  rep.add("backlund.T2_hamiltonian_shift", g.t2_shift, 1e-9);
  const int w = static_cast<int>(res.winner);
  nlohmann::ordered_json rows = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    const std::string name = to_string(res.rows[k].kind);
    rep.add("backlund.hamiltonian_column." + name, g.column[k], 1e-9);
    rep.add("backlund.solution_map." + name, res.rows[k].residual[w], 1e-6);
    rows[name] = {{to_string(TimeSymbol::t_means_s), res.rows[k].residual[0]},
                  {to_string(TimeSymbol::t_means_sqrt_s), res.rows[k].residual[1]}};
  }
  rep.add("backlund.single_time_symbol_convention", res.resolved ? 0.0 : 1.0, 0.5);
  rep.resolved["table1_time_symbol"] = res.resolved ? to_string(res.winner) : "unresolved";
  rep.resolved["solution_map_residuals"] = rows;
  rep.resolved["group_redraws"] = g.redraws;
  return rep;
}

Report tau_identity_suite(const RunConfig& cfg, std::size_t, std::uint64_t) {
  Report rep;
  rep.suite = "tau-identity";
  const std::vector<double> grid = linspace(0.0, 5.0, 100);
  for (double a : {0.3, 0.7, 1.2}) {
    std::ostringstream name;
    name << "tau_identity.hamiltonian.a=" << a;
    rep.add(name.str(), sigma::identity_hamiltonian_check(a, grid, cfg.eps_sign, cfg.ode_rel_tol), 1e-6);
  }
  double worst = 0.0;
  for (int i = 1; i <= 30; ++i) {
    const double a = 0.1 * i;
    const double lhs = sigma::c_ss(a) * std::pow(2.0, 2.0 * a + 1.0);
    const double rhs = -2.0 * sigma::c_he(a - 0.5);
    worst = std::max(worst, std::fabs(lhs - rhs) / std::fabs(rhs));
  }
  rep.add("tau_identity.leading_constant", worst, 1e-13);
  return rep;
}

Report series_suite(const RunConfig&, std::size_t, std::uint64_t) {
  using sigma::BoundaryRegime;
  Report rep;
  rep.suite = "series";
  std::vector<std::pair<std::string, BoundaryRegime>> regimes;
  auto label = [](const char* kind, double p) {
    std::ostringstream o;
    o << kind << p;
    return o.str();
  };
  // The regimes behind the gap routes on the a grid {0, 0.25, 0.5, 1, 2.5}; the
  // exact ones (hard edge a = 0, negative side mu = 0) have no truncation error.
  for (double a : {-0.5, -0.25, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) {
    regimes.emplace_back(label("hard_edge.a=", a), BoundaryRegime::hard_edge_plus(a));
  }
  for (double mu : {-3.0, -2.0, -1.5, -1.0, -0.75, -0.5, 0.25, 0.5}) {
    regimes.emplace_back(label("negative_side.mu=", mu), BoundaryRegime::negative_side(mu));
  }
  for (double a : {0.0, 0.25, 0.5, 1.0, 2.5}) {
    regimes.emplace_back(label("spectrum_singularity.a=", a), BoundaryRegime::spectrum_sing(a));
  }
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
  for (const auto& [name, r] : regimes) {
    const sigma::SeriesOverlap o = sigma::series_overlap(r);
    rep.add("series.overlap_slope." + name, std::fabs(o.slope - o.predicted_local), 0.3);
    detail[name] = {{"lo", o.lo}, {"slope", o.slope}, {"predicted_local", o.predicted_local},
                    {"asymptotic_exponent", o.predicted}};
  }
  rep.resolved["series_overlap"] = detail;
  return rep;
}

Report classical_suite(const RunConfig& cfg, std::size_t, std::uint64_t) {
  Report rep;
  rep.suite = "classical";
  const std::vector<double> grid = linspace(0.0, 20.0, 40);
  for (int n = 1; n <= 3; ++n) {
    rep.add("classical.tau_identity.n=" + std::to_string(n), classical::classical_identity_check(n, grid), 1e-12);
    rep.add("classical.hard_edge_closed_form.n=" + std::to_string(n),
            classical::he_classical_check(n, grid, cfg.ode_rel_tol), 1e-8);
  }
  const double closed = std::exp(-2.5) * classical::tau_diag(3, 2.5);
  const double fred = std::exp(kernels::hard_edge_fredholm(3.0, 10.0, cfg.quad_order).logE);
  rep.add("classical.hard_edge_fredholm.n=3.X=10", std::fabs(fred - closed) / closed, 1e-6);
  return rep;
}

using SuiteFn = Report (*)(const RunConfig&, std::size_t, std::uint64_t);

SuiteFn lookup(const std::string& name) {
  if (name == "theorem1") return theorem1_suite;
  if (name == "lemma") return lemma_suite;
  if (name == "backlund") return backlund_suite;
  if (name == "tau-identity") return tau_identity_suite;
  if (name == "series") return series_suite;
  if (name == "classical") return classical_suite;
  throw DomainError("unknown suite '" + name + "'");
}

}  // namespace

kernels::GapMethod parse_method(const std::string& name) {
  using kernels::GapMethod;
  for (GapMethod m : {GapMethod::Fredholm, GapMethod::HardEdgeProduct, GapMethod::CrossProduct, GapMethod::Sigma1}) {
    if (kernels::to_string(m) == name) return m;
  }
  throw DomainError("unknown method '" + name + "'");
}

kernels::GapResult run_gap(kernels::GapMethod method, double a, double x, const RunConfig& cfg) {
  cfg.validate();
  switch (method) {
    case kernels::GapMethod::Fredholm: return kernels::gap_fredholm(a, x, cfg.quad_order);
    case kernels::GapMethod::HardEdgeProduct: return sigma::gap_ss_product(a, x, cfg.ode_rel_tol, cfg.series_start);
    case kernels::GapMethod::CrossProduct:
      return sigma::gap_ss_cross(a, x, cfg.eps_sign, cfg.ode_rel_tol, cfg.series_start);
    case kernels::GapMethod::Sigma1: return sigma::gap_ss_sigma1(a, x, cfg.ode_rel_tol, cfg.series_start);
  }
  throw DomainError("unknown method");
}

double max_pairwise_discrepancy(const std::vector<kernels::GapResult>& results) {
  double worst = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      const double d = std::fabs(results[i].E - results[j].E) / std::max(results[i].E, results[j].E);
      worst = std::max(worst, d);
    }
  }
  return worst;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "quad_order") {
    quad_order = parse_number<int>(key, value);
  } else if (key == "ode_rel_tol") {
    ode_rel_tol = parse_number<double>(key, value);
  } else if (key == "series_start") {
    series_start = parse_number<double>(key, value);
  } else if (key == "eps_sign" || key == "eps") {
    eps_sign = parse_number<int>(key, value);
  } else if (key == "output_format") {
    output_format = value;
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else {
    throw DomainError("config: unknown key '" + key + "'");
  }
  validate();
}

void RunConfig::validate() const {
  if (quad_order < 4 || quad_order > kernels::kMaxOrder) throw DomainError("quad_order must lie in [4, 400]");
  if (!(ode_rel_tol > 0.0 && ode_rel_tol < 1e-3)) throw DomainError("ode_rel_tol must lie in (0, 1e-3)");
  if (!(series_start >= 1e-8 && series_start <= sigma::kMaxStart)) {
    throw DomainError("series_start must lie in [1e-8, 0.5]");
  }
  if (eps_sign != 1 && eps_sign != -1) throw DomainError("eps_sign must be +1 or -1");
  if (output_format != "csv" && output_format != "json") throw DomainError("output_format must be csv or json");
}

nlohmann::ordered_json RunConfig::to_json() const {
  return {{"quad_order", quad_order}, {"ode_rel_tol", ode_rel_tol}, {"series_start", series_start},
          {"eps_sign", eps_sign},     {"output_format", output_format}, {"seed", seed}};
}

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Report::add(std::string name, double residual, double threshold) {
  checks.push_back({std::move(name), residual, threshold, std::isfinite(residual) && residual <= threshold});
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"theorem1", "lemma", "backlund", "tau-identity", "series", "classical"};
  return names;
}

std::size_t default_trials(const std::string& suite) {
  if (suite == "backlund") return 200;
  if (suite == "theorem1" || suite == "lemma" || suite == "all") return 100;
  return 1;
}

Report run_suite(const std::string& suite, const RunConfig& cfg, std::size_t trials, std::uint64_t seed) {
  cfg.validate();
  if (suite != "all") return lookup(suite)(cfg, trials ? trials : default_trials(suite), seed);
  std::vector<std::future<Report>> parts;
  for (const auto& name : suite_names()) {
    const std::size_t n = trials ? trials : default_trials(name);
    parts.push_back(std::async(std::launch::async, lookup(name), std::cref(cfg), n, seed));
  }
  Report all;
  all.suite = "all";
  for (auto& f : parts) {
    Report r = f.get();
    all.checks.insert(all.checks.end(), r.checks.begin(), r.checks.end());
    for (auto& [k, v] : r.resolved.items()) all.resolved[k] = v;
  }
  return all;
}

nlohmann::ordered_json to_json(const Report& rep, const RunConfig& cfg, std::uint64_t seed) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"residual", c.residual}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  nlohmann::ordered_json resolved = rep.resolved;
  if (!resolved.contains("table1_time_symbol")) resolved["table1_time_symbol"] = nullptr;
  return {{"suite", rep.suite}, {"checks", checks}, {"config", cfg.to_json()}, {"seed", seed}, {"resolved", resolved}};
}

}  // namespace ssgap::verify
