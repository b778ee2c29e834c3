#pragma once

#include <random>
#include <utility>
#include <vector>

#include "ssgap/ode.hpp"

namespace ssgap::hamflow {

struct PIIIParams {
  double v1 = 0.0;
  double v2 = 0.0;
  double eta0 = 1.0;
  double etaInf = 1.0;

  void validate() const;
};

/// PIII runs in t, PIIIprime in s.
enum class System { PIII, PIIIprime };

struct HamState {
  System system = System::PIII;
  double time = 1.0;
  double q = 0.0;
  double p = 0.0;
  PIIIParams params;
};

struct Rates {
  double dq = 0.0;
  double dp = 0.0;
};

/// time * H for the state's system (tH for PIII, sH for PIIIprime).
double time_hamiltonian(const HamState& st);

/// Hamilton's equations (dH/dp, -dH/dq) from hand-derived partials.
/// Throws SingularPointError at time 0.
Rates vector_field(const HamState& st);

/// Partial derivative of time * H with respect to time at fixed (q, p).
double explicit_time_partial(const HamState& st);

/// h = tH + (2 v1 + 1)^2 / 8 and its first two t-derivatives along the flow.
struct AuxH {
  double h = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};
AuxH aux_h(const HamState& st);

class FlowTrajectory {
 public:
  System system = System::PIII;
  PIIIParams params;
  ode::DenseTrajectory<2> dense;

  HamState state(double time) const;
  /// Accepted-step abscissae including the initial time.
  const std::vector<double>& nodes() const { return dense.times(); }
  HamState node_state(std::size_t i) const;
  double time_hamiltonian_at(double time) const { return time_hamiltonian(state(time)); }
};

/// Integrates to time_end (same sign as the initial time). Stops with
/// PoleError once |q| or |p| exceeds 1e8 or the step size collapses next to a
/// large value.
FlowTrajectory integrate_flow(const HamState& initial, double time_end, double tol = 1e-10);

struct Theorem1Node {
  double t = 0.0;
  double residual = 0.0;  ///< min over eps of the scaled residual
  int eps = 1;
  bool radicand_ok = true;
};

struct Theorem1Result {
  std::vector<Theorem1Node> nodes;
  double max_residual = 0.0;        ///< over nodes with radicand_ok
  double proof_identity_max = 0.0;  ///< max scaled |8(h - t h') - (4qp - 2v1 - 1)^2|
  std::size_t radicand_failures = 0;

  double fraction_within(double threshold) const;
};

/// (t h'')^2 = 2D {4h'^2 + 32 e0 einf D - 16 e0 einf eps (v2 - v1 - 1) sqrt(2D)
///                 - 16 e0 einf (v2 - 1/2)(v1 + 1/2)},  D = h - t h',
/// at every node, scaled by the largest term.
Theorem1Result theorem1_residual(const FlowTrajectory& traj);

/// Scaled Theorem-1 residual at a single state for a given eps.
double theorem1_point_residual(const HamState& st, int eps);

/// Canonical variables from (h, h', h'') at time t. Throws DomainError when
/// h - t h' <= 0 and DegenerateRecoveryError when the q denominator vanishes.
std::pair<double, double> recover_qp(const AuxH& aux, double t, const PIIIParams& params, int eps);

/// Max over nodes of |tH_III - (sH'|_v + sH'|_{T2 v})| / max(1, |tH_III|),
/// with s = t^2, q' = t q, p' = p / t, and sH'|_{T2 v} = sH'|_v - q'p'.
double lemma_sum_check(const FlowTrajectory& traj);

/// Same mapping, checking tH_III = 2 sH' - q'p' directly.
double lemma_first_line_check(const FlowTrajectory& traj);

struct ScalarCheck {
  double max_residual = 0.0;
  std::size_t skipped = 0;  ///< nodes with |q| < 1e-6
};

/// Scalar PIII q'' = q'^2/q - q'/t + (alpha q^2 + beta)/t + gamma q^3 + delta/q with
/// alpha = -4 einf v2, beta = 4 e0 (v1 + 1), gamma = 4 einf^2, delta = -4 e0^2,
/// using the interpolant's derivatives at the nodes.
ScalarCheck scalar_piii_residual(const FlowTrajectory& traj);

/// Draws v uniformly in [-2, 2]^2 and (q, p) in [-1, 1]^2 at t0 and integrates
/// to t1, redrawing on poles. `redraws` counts the rejected draws.
FlowTrajectory random_trajectory(std::mt19937_64& rng, System system, double t0, double t1,
                                 double tol, std::size_t* redraws = nullptr);

}  // namespace ssgap::hamflow
