#include "ssgap/hamflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "ssgap/errors.hpp"

namespace ssgap::hamflow {
namespace {

constexpr double kPoleLimit = 1e8;

void check_time(double t) {
  if (t == 0.0 || !std::isfinite(t)) throw SingularPointError("Hamiltonian flow: time must be finite and nonzero");
}

// d(tH)/dp and d(tH)/dq.
std::pair<double, double> partials(const HamState& st) {
  const PIIIParams& v = st.params;
  const double t = st.time, q = st.q, p = st.p;
  if (st.system == System::PIII) {
    const double dp = 4.0 * q * q * p - 2.0 * v.etaInf * t * q * q - (2.0 * v.v1 + 1.0) * q + 2.0 * v.eta0 * t;
    const double dq = 4.0 * q * p * p - (4.0 * v.etaInf * t * q + 2.0 * v.v1 + 1.0) * p + v.etaInf * (v.v1 + v.v2) * t;
    return {dp, dq};
  }
  const double dp = 2.0 * q * q * p - q * q - v.v1 * q + t;
  const double dq = 2.0 * q * p * p - (2.0 * q + v.v1) * p + 0.5 * (v.v1 + v.v2);
  return {dp, dq};
}

}  // namespace

void PIIIParams::validate() const {
  if (!std::isfinite(v1) || !std::isfinite(v2)) throw DomainError("PIII parameters must be finite");
  if (eta0 * etaInf == 0.0 || !std::isfinite(eta0 * etaInf)) throw DomainError("PIII needs eta0 * etaInf != 0");
}

double time_hamiltonian(const HamState& st) {
  const PIIIParams& v = st.params;
  const double t = st.time, q = st.q, p = st.p;
  if (st.system == System::PIII) {
    return 2.0 * q * q * p * p - (2.0 * v.etaInf * t * q * q + (2.0 * v.v1 + 1.0) * q - 2.0 * v.eta0 * t) * p +
           v.etaInf * (v.v1 + v.v2) * t * q;
  }
  return q * q * p * p - (q * q + v.v1 * q - t) * p + 0.5 * (v.v1 + v.v2) * q;
}

Rates vector_field(const HamState& st) {
  check_time(st.time);
  const auto [dp, dq] = partials(st);
  return {dp / st.time, -dq / st.time};
}

double explicit_time_partial(const HamState& st) {
  const PIIIParams& v = st.params;
  if (st.system == System::PIII) {
    return -2.0 * v.etaInf * st.q * st.q * st.p + 2.0 * v.eta0 * st.p + v.etaInf * (v.v1 + v.v2) * st.q;
  }
  return st.p;
}

AuxH aux_h(const HamState& st) {
  if (st.system != System::PIII) throw DomainError("aux_h is defined for the PIII system");
  const PIIIParams& v = st.params;
  const double q = st.q, p = st.p;
  AuxH out;
  out.h = time_hamiltonian(st) + 0.125 * (2.0 * v.v1 + 1.0) * (2.0 * v.v1 + 1.0);
  // The q, p terms of d(tH)/dt cancel along Hamilton's equations.
  out.h1 = explicit_time_partial(st);
  const Rates r = vector_field(st);
  out.h2 = (-4.0 * v.etaInf * q * p + v.etaInf * (v.v1 + v.v2)) * r.dq + (-2.0 * v.etaInf * q * q + 2.0 * v.eta0) * r.dp;
  return out;
}

HamState FlowTrajectory::state(double time) const {
  if (!dense.contains(time)) throw DomainError("FlowTrajectory: time outside the trajectory");
  const ode::Vec<2> y = dense(time);
  return {system, time, y[0], y[1], params};
}

HamState FlowTrajectory::node_state(std::size_t i) const {
  const auto& y = dense.states().at(i);
  return {system, dense.times()[i], y[0], y[1], params};
}

FlowTrajectory integrate_flow(const HamState& initial, double time_end, double tol) {
  initial.params.validate();
  check_time(initial.time);
  check_time(time_end);
  if (initial.time * time_end < 0.0) throw DomainError("integrate_flow: the flow cannot cross time 0");
  if (!(tol > 0.0)) throw DomainError("integrate_flow: tolerance must be positive");

  FlowTrajectory traj;
  traj.system = initial.system;
  traj.params = initial.params;
  HamState work = initial;
  auto rhs = [&](double t, const ode::Vec<2>& y, ode::Vec<2>& dy) {
    work.time = t;
    work.q = y[0];
    work.p = y[1];
    const Rates r = vector_field(work);
    dy[0] = r.dq;
    dy[1] = r.dp;
  };
  double last_t = initial.time;
  double last_mag = std::max(std::fabs(initial.q), std::fabs(initial.p));
  auto monitor = [&](double t, const ode::Vec<2>& y) {
    last_t = t;
    last_mag = std::max(std::fabs(y[0]), std::fabs(y[1]));
    if (!(last_mag <= kPoleLimit)) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "flow reached |q|, |p| > 1e8 near time %.8g", t);
      throw PoleError(msg, t);
    }
  };
  ode::OdeOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = tol;
  try {
    traj.dense = ode::integrate<2>(rhs, initial.time, {initial.q, initial.p}, time_end, opt, monitor);
  } catch (const StiffnessError&) {
    if (last_mag > 1e3) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "flow step size collapsed approaching a pole near time %.8g", last_t);
      throw PoleError(msg, last_t);
    }
    throw;
  }
  return traj;
}

double Theorem1Result::fraction_within(double threshold) const {
  if (nodes.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& n : nodes) {
    if (n.radicand_ok && n.residual <= threshold) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(nodes.size());
}

double theorem1_point_residual(const HamState& st, int eps) {
  const AuxH a = aux_h(st);
  const PIIIParams& v = st.params;
  const double t = st.time;
  const double D = std::max(a.h - t * a.h1, 0.0);
  const double ee = v.eta0 * v.etaInf;
  const double lhs = (t * a.h2) * (t * a.h2);
  const double root = std::sqrt(2.0 * D);
  const double t1 = 4.0 * a.h1 * a.h1;
  const double t2 = 32.0 * ee * D;
  const double t3 = -16.0 * ee * eps * (v.v2 - v.v1 - 1.0) * root;
  const double t4 = -16.0 * ee * (v.v2 - 0.5) * (v.v1 + 0.5);
  const double rhs = 2.0 * D * (t1 + t2 + t3 + t4);
  const double scale =
      std::max({1.0, lhs, 2.0 * D * (std::fabs(t1) + std::fabs(t2) + std::fabs(t3) + std::fabs(t4))});
  return std::fabs(lhs - rhs) / scale;
}

Theorem1Result theorem1_residual(const FlowTrajectory& traj) {
  if (traj.system != System::PIII) throw DomainError("theorem1_residual needs a PIII trajectory");
  Theorem1Result out;
  const PIIIParams& v = traj.params;
  for (std::size_t i = 0; i < traj.nodes().size(); ++i) {
    const HamState st = traj.node_state(i);
    const AuxH a = aux_h(st);
    const double D = a.h - st.time * a.h1;
    const double w = 4.0 * st.q * st.p - 2.0 * v.v1 - 1.0;
    out.proof_identity_max = std::max(out.proof_identity_max, std::fabs(8.0 * D - w * w) / std::max(1.0, w * w));
    Theorem1Node node;
    node.t = st.time;
    // 8D is a perfect square, so only roundoff can make it negative.
    if (D < -1e-12 * std::max(1.0, std::fabs(a.h))) {
      node.radicand_ok = false;
      ++out.radicand_failures;
      out.nodes.push_back(node);
      continue;
    }
    const double rp = theorem1_point_residual(st, +1);
    const double rm = theorem1_point_residual(st, -1);
    node.eps = rp <= rm ? 1 : -1;
    node.residual = std::min(rp, rm);
    out.max_residual = std::max(out.max_residual, node.residual);
    out.nodes.push_back(node);
  }
  return out;
}

std::pair<double, double> recover_qp(const AuxH& aux, double t, const PIIIParams& params, int eps) {
  params.validate();
  if (eps != 1 && eps != -1) throw DomainError("recover_qp: eps must be +1 or -1");
  const double D = aux.h - t * aux.h1;
  if (!(D > 0.0)) throw DomainError("recover_qp: needs h - t h' > 0");
  const double k = eps * t * aux.h2 / std::sqrt(8.0 * D);
  const double p = (aux.h1 - k) / (4.0 * params.eta0);
  const double den = params.v2 - 0.5 - eps * std::sqrt(2.0 * D);
  if (std::fabs(den) < 1e-14 * std::max(1.0, std::fabs(params.v2))) {
    throw DegenerateRecoveryError("recover_qp: q denominator v2 - 1/2 - eps sqrt(2(h - t h')) vanishes");
  }
  const double q = (aux.h1 + k) / den / (2.0 * params.etaInf);
  return {q, p};
}

namespace {

struct LemmaTerms {
  double tH;
  double sH;
  double qp;
};

// Maps a PIII node to PIII' with s = t^2.
LemmaTerms lemma_terms(const HamState& st) {
  const double t = st.time;
  const HamState prime{System::PIIIprime, t * t, t * st.q, st.p / t, st.params};
  return {time_hamiltonian(st), time_hamiltonian(prime), prime.q * prime.p};
}

void check_lemma_pre(const FlowTrajectory& traj) {
  if (traj.system != System::PIII) throw DomainError("lemma checks need a PIII trajectory");
  if (traj.params.eta0 != 1.0 || traj.params.etaInf != 1.0) {
    throw DomainError("lemma checks need eta0 = etaInf = 1");
  }
}

}  // namespace

double lemma_sum_check(const FlowTrajectory& traj) {
  check_lemma_pre(traj);
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.nodes().size(); ++i) {
    const LemmaTerms l = lemma_terms(traj.node_state(i));
    const double shifted = l.sH - l.qp;  // Hamiltonian column of the T2 row
    worst = std::max(worst, std::fabs(l.tH - (l.sH + shifted)) / std::max(1.0, std::fabs(l.tH)));
  }
  return worst;
}

double lemma_first_line_check(const FlowTrajectory& traj) {
  check_lemma_pre(traj);
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.nodes().size(); ++i) {
    const LemmaTerms l = lemma_terms(traj.node_state(i));
    worst = std::max(worst, std::fabs(l.tH - (2.0 * l.sH - l.qp)) / std::max(1.0, std::fabs(l.tH)));
  }
  return worst;
}

ScalarCheck scalar_piii_residual(const FlowTrajectory& traj) {
  if (traj.system != System::PIII) throw DomainError("scalar_piii_residual needs a PIII trajectory");
  const PIIIParams& v = traj.params;
  const double alpha = -4.0 * v.etaInf * v.v2;
  const double beta = 4.0 * v.eta0 * (v.v1 + 1.0);
  const double gamma = 4.0 * v.etaInf * v.etaInf;
  const double delta = -4.0 * v.eta0 * v.eta0;
  ScalarCheck out;
  for (double t : traj.nodes()) {
    const ode::Jet<2> j = traj.dense.jet(t);
    const double q = j.value[0], q1 = j.d1[0], q2 = j.d2[0];
    if (std::fabs(q) < 1e-6) {
      ++out.skipped;
      continue;
    }
    const double terms[] = {q1 * q1 / q, -q1 / t, (alpha * q * q + beta) / t, gamma * q * q * q, delta / q};
    double rhs = 0.0, scale = std::max(1.0, std::fabs(q2));
    for (double x : terms) {
      rhs += x;
      scale = std::max(scale, std::fabs(x));
    }
    out.max_residual = std::max(out.max_residual, std::fabs(q2 - rhs) / scale);
  }
  return out;
}

FlowTrajectory random_trajectory(std::mt19937_64& rng, System system, double t0, double t1, double tol,
                                 std::size_t* redraws) {
  std::uniform_real_distribution<double> par(-2.0, 2.0);
  std::uniform_real_distribution<double> init(-1.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    HamState st;
    st.system = system;
    st.time = t0;
    st.params.v1 = par(rng);
    st.params.v2 = par(rng);
    st.q = init(rng);
    st.p = init(rng);
    try {
      return integrate_flow(st, t1, tol);
    } catch (const IntegrationError&) {
      if (redraws) ++*redraws;
    }
  }
  throw IntegrationError("random_trajectory: no regular draw in 1000 attempts");
}

}  // namespace ssgap::hamflow
