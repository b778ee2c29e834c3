#include "ssgap/backlund.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ssgap/errors.hpp"

namespace ssgap::backlund {
namespace {

using hamflow::HamState;
using hamflow::System;

constexpr double kSingular = 1e-10;

double hamiltonian(double v1, double v2, double q, double p, double s) {
  return hamflow::time_hamiltonian(HamState{System::PIIIprime, s, q, p, {v1, v2, 1.0, 1.0}});
}

double guard(double den, const char* what) {
  if (!std::isfinite(den) || std::fabs(den) < kSingular) {
    throw TransformSingularError(std::string("transform denominator vanishes: ") + what);
  }
  return den;
}

double time_symbol_value(TimeSymbol ts, double s) {
  if (ts == TimeSymbol::t_means_s) return s;
  if (!(s > 0.0)) throw DomainError("t = sqrt(s) needs s > 0");
  return std::sqrt(s);
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

double state_distance(const ExtendedState& a, const ExtendedState& b) {
  return std::max({rel(a.v1, b.v1), rel(a.v2, b.v2), rel(a.p, b.p), rel(a.q, b.q), rel(a.s, b.s), rel(a.sH, b.sH)});
}

}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::s0: return "s0";
    case Kind::s1: return "s1";
    case Kind::s2: return "s2";
    case Kind::s_minus: return "s_minus";
    case Kind::T2: return "T2";
  }
  return "?";
}

std::string to_string(TimeSymbol t) { return t == TimeSymbol::t_means_s ? "t_means_s" : "t_means_sqrt_s"; }

ExtendedState ExtendedState::make(double v1, double v2, double q, double p, double s) {
  return {v1, v2, p, q, s, hamiltonian(v1, v2, q, p, s)};
}

ExtendedState ExtendedState::checked(double v1, double v2, double p, double q, double s, double sH) {
  ExtendedState st{v1, v2, p, q, s, sH};
  if (!(st.hamiltonian_mismatch() <= 1e-10)) throw DomainError("ExtendedState: sH does not match the Hamiltonian");
  return st;
}

double ExtendedState::hamiltonian_mismatch() const {
  return std::fabs(sH - hamiltonian(v1, v2, q, p, s)) / std::max(1.0, std::fabs(sH));
}

HamState ExtendedState::ham_state() const { return {System::PIIIprime, s, q, p, {v1, v2, 1.0, 1.0}}; }

ExtendedState apply(const TransformId& id, const ExtendedState& x) {
  const double v1 = x.v1, v2 = x.v2, p = x.p, q = x.q, s = x.s, sH = x.sH;
  switch (id.kind) {
    case Kind::s0: {
      const double t = time_symbol_value(id.time_symbol, s);
      guard(q, "q (s0)");
      return {-1.0 - v2, -1.0 - v1, (q / t) * (q * (p - 1.0) - 0.5 * (v1 - v2)) + 1.0, -t / q, s,
              sH - q * (p - 1.0) + 0.5 * (v1 - v2) * (1.0 + 0.5 * (v1 + v2))};
    }
    case Kind::s1: {
      const double den = guard(2.0 * (p - 1.0), "p - 1 (s1)");
      return {v2, v1, p, q + (v2 - v1) / den, s, sH - 0.25 * (v2 * v2 - v1 * v1)};
    }
    case Kind::s2:
      return {v1, -v2, 1.0 - p, -q, -s, sH - s};
    case Kind::s_minus: {
      const double den = guard(p * (p - 1.0), "p(p - 1) (s_minus)");
      return {-v1, -v2, p, q - (v1 * p - 0.5 * (v1 + v2)) / den, s, sH};
    }
    case Kind::T2: {
      const double t = time_symbol_value(id.time_symbol, s);
      guard(q, "q (T2)");
      const double half = 0.5 * (v1 + v2);
      const double den = guard(q * (q * p - half) + t, "q[qp - (v1 + v2)/2] + t (T2)");
      return {v1 + 1.0, v2 - 1.0, (q / t) * (half - q * p), t / q - 0.5 * (2.0 + v1 - v2) * t / den, s, sH - q * p};
    }
  }
  throw DomainError("unknown transform");
}

double denominator_margin(const TransformId& id, const ExtendedState& x) {
  switch (id.kind) {
    case Kind::s0: return std::fabs(x.q);
    case Kind::s1: return std::fabs(2.0 * (x.p - 1.0));
    case Kind::s2: return std::numeric_limits<double>::infinity();
    case Kind::s_minus: return std::fabs(x.p * (x.p - 1.0));
    case Kind::T2: {
      const double t = time_symbol_value(id.time_symbol, x.s);
      return std::min(std::fabs(x.q), std::fabs(x.q * (x.q * x.p - 0.5 * (x.v1 + x.v2)) + t));
    }
  }
  return 0.0;
}

SolutionMapResult solution_map_check(const TransformId& id, const hamflow::FlowTrajectory& traj, double min_margin) {
  if (traj.system != System::PIIIprime) throw DomainError("solution_map_check needs a P_III' trajectory");
  SolutionMapResult out;
  for (std::size_t i = 0; i < traj.nodes().size(); ++i) {
    const HamState src = traj.node_state(i);
    ++out.nodes;
    const ExtendedState x = ExtendedState::make(src.params.v1, src.params.v2, src.q, src.p, src.time);
    if (denominator_margin(id, x) < min_margin) {
      ++out.skipped;
      continue;
    }
    // The image is differenced along the tangent line (s + e, q + e q', p + e p'),
    // which has the trajectory's first derivative at e = 0.
    const hamflow::Rates v = hamflow::vector_field(src);
    const double h = 2e-3 * std::min(1.0, denominator_margin(id, x)) * std::max(1.0, std::fabs(src.time)) /
                     std::max({1.0, std::fabs(v.dq), std::fabs(v.dp)});
    auto image = [&](double e) {
      return apply(id, ExtendedState::make(x.v1, x.v2, x.q + e * v.dq, x.p + e * v.dp, x.s + e));
    };
    try {
      const ExtendedState c = image(0.0);
      const ExtendedState m3 = image(-3.0 * h), m2 = image(-2.0 * h), m1 = image(-h);
      const ExtendedState p1 = image(h), p2 = image(2.0 * h), p3 = image(3.0 * h);
      auto d = [&](double ExtendedState::*f) {
        return (45.0 * (p1.*f - m1.*f) - 9.0 * (p2.*f - m2.*f) + (p3.*f - m3.*f)) / (60.0 * h);
      };
      const double ds = d(&ExtendedState::s);
      const double dq = d(&ExtendedState::q) / ds;
      const double dp = d(&ExtendedState::p) / ds;
      const hamflow::Rates r = hamflow::vector_field(c.ham_state());
      const double scale = std::max({1.0, std::fabs(r.dq), std::fabs(r.dp)});
      out.max_residual = std::max(out.max_residual, std::max(std::fabs(dq - r.dq), std::fabs(dp - r.dp)) / scale);
      out.max_column_mismatch = std::max(out.max_column_mismatch, c.hamiltonian_mismatch());
    } catch (const TransformSingularError&) {
      ++out.skipped;
    }
  }
  return out;
}

namespace {

ExtendedState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> par(-2.0, 2.0);
  std::uniform_real_distribution<double> time(0.5, 3.0);
  const double v1 = par(rng), v2 = par(rng), q = par(rng), p = par(rng), s = time(rng);
  return ExtendedState::make(v1, v2, q, p, s);
}

// Rejects states whose denominators are small enough to wreck the round trip.
bool well_conditioned(const ExtendedState& x) {
  return std::fabs(x.q) > 0.05 && std::fabs(x.p) > 0.05 && std::fabs(x.p - 1.0) > 0.05;
}

}  // namespace

GroupReport group_relation_check(std::uint64_t seed, std::size_t trials, TimeSymbol time_symbol) {
  std::mt19937_64 rng(seed);
  GroupReport rep;
  rep.trials = trials;
  const Kind inv[4] = {Kind::s0, Kind::s1, Kind::s2, Kind::s_minus};
  for (std::size_t done = 0; done < trials;) {
    const ExtendedState x = random_state(rng);
    if (!well_conditioned(x)) {
      ++rep.redraws;
      continue;
    }
    try {
      std::array<double, 4> r{};
      for (int k = 0; k < 4; ++k) {
        const TransformId id{inv[k], time_symbol};
        const ExtendedState y = apply(id, x);
        if (!well_conditioned(y)) throw TransformSingularError("near-singular image");
        r[k] = state_distance(apply(id, y), x);
      }
      const ExtendedState c = apply({Kind::s_minus, time_symbol}, apply({Kind::s2, time_symbol}, x));
      const ExtendedState expect{-x.v1, x.v2, c.p, c.q, -x.s, x.sH - x.s};
      const double comp = state_distance(c, expect);
      std::array<double, 5> col{};
      for (std::size_t k = 0; k < kAllKinds.size(); ++k) col[k] = apply({kAllKinds[k], time_symbol}, x).hamiltonian_mismatch();
      const ExtendedState t2 = apply({Kind::T2, time_symbol}, x);
      const double h_t2 = hamiltonian(t2.v1, t2.v2, t2.q, t2.p, t2.s);
      const double shift = std::fabs(h_t2 - (x.sH - x.q * x.p)) / std::max(1.0, std::fabs(h_t2));
      for (int k = 0; k < 4; ++k) rep.involution[k] = std::max(rep.involution[k], r[k]);
      for (std::size_t k = 0; k < col.size(); ++k) rep.column[k] = std::max(rep.column[k], col[k]);
      rep.reflection_composite = std::max(rep.reflection_composite, comp);
      rep.t2_shift = std::max(rep.t2_shift, shift);
      ++done;
    } catch (const TransformSingularError&) {
      ++rep.redraws;
    }
  }
  return rep;
}

namespace {

constexpr double kRegularBound = 50.0;

double max_magnitude(const hamflow::FlowTrajectory& traj) {
  double m = 0.0;
  for (const auto& y : traj.dense.states()) m = std::max({m, std::fabs(y[0]), std::fabs(y[1])});
  return m;
}

}  // namespace

ConventionResolution resolve_time_symbol(std::uint64_t seed, std::size_t trials, double threshold) {
  std::mt19937_64 rng(seed);
  ConventionResolution res;
  for (std::size_t k = 0; k < kAllKinds.size(); ++k) res.rows[k].kind = kAllKinds[k];
  std::size_t redraws = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    hamflow::FlowTrajectory traj = hamflow::random_trajectory(rng, System::PIIIprime, 1.0, 2.0, 1e-12, &redraws);
    // Differencing near a pole only measures roundoff; keep regular segments.
    while (max_magnitude(traj) > kRegularBound) {
      ++redraws;
      traj = hamflow::random_trajectory(rng, System::PIIIprime, 1.0, 2.0, 1e-12, &redraws);
    }
    for (std::size_t k = 0; k < kAllKinds.size(); ++k) {
      for (int c = 0; c < 2; ++c) {
        const TransformId id{kAllKinds[k], static_cast<TimeSymbol>(c)};
        const SolutionMapResult r = solution_map_check(id, traj);
        res.rows[k].residual[c] = std::max(res.rows[k].residual[c], r.max_residual);
      }
    }
  }
  res.redraws = redraws;
  bool pass[2] = {true, true};
  for (const auto& row : res.rows) {
    for (int c = 0; c < 2; ++c) pass[c] = pass[c] && row.residual[c] <= threshold;
  }
  res.resolved = pass[0] != pass[1];
  res.winner = pass[1] && !pass[0] ? TimeSymbol::t_means_sqrt_s : TimeSymbol::t_means_s;
  return res;
}

}  // namespace ssgap::backlund
