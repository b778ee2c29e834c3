#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ssgap::kernels {

enum class KernelKind { SpectrumSingularity, HardEdge, Sine };

struct KernelSpec {
  KernelKind kind = KernelKind::Sine;
  double a = 0.0;

  static KernelSpec spectrum_singularity(double a) { return {KernelKind::SpectrumSingularity, a}; }
  static KernelSpec hard_edge(double a) { return {KernelKind::HardEdge, a}; }
  static KernelSpec sine() { return {KernelKind::Sine, 0.0}; }

  /// Throws DomainError when a is out of range for the kind.
  void validate() const;
};

/// K(u, v). Diagonal values come from the analytic limit.
double eval_kernel(const KernelSpec& spec, double u, double v);

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<Panel> panels;

  std::size_t size() const { return nodes.size(); }
  double weight_sum() const;
};

/// Gauss-Legendre rule of the given order on [-1, 1].
QuadratureRule gauss_legendre(int order);

/// Gauss-Legendre on (lo, hi); two panels split at 0 when requested and 0 is
/// interior.
QuadratureRule build_rule(double lo, double hi, int order, bool split_at_zero);

/// Rule on (0, hi) with panels shrinking geometrically toward 0, for integrands
/// behaving like t^exponent there. The outermost panel gets `order` nodes,
/// the inner ones max(10, order / 3).
QuadratureRule build_graded_rule(double hi, int order, double exponent);

/// The rule reflected onto (-hi, 0) and joined with the original.
QuadratureRule mirrored(const QuadratureRule& half);

struct LogDet {
  double log_abs = 0.0;
  int sign = 1;
};

using KernelFn = std::function<double(double, double)>;

/// log det(I - D K D) with D = diag(sqrt(w)), by partial-pivoting LU.
LogDet fredholm_log_det(const KernelFn& kernel, const QuadratureRule& rule);
LogDet fredholm_log_det(const KernelSpec& spec, const QuadratureRule& rule);

/// det(1 - K) on the rule.
double fredholm_det(const KernelSpec& spec, const QuadratureRule& rule);

/// R(point, point) for the resolvent K (1 - K)^{-1}, via the Nystrom
/// interpolation formula.
double resolvent_diag(const KernelFn& kernel, const QuadratureRule& rule, double point);
double resolvent_diag(const KernelSpec& spec, const QuadratureRule& rule, double point);

/// Even/odd pieces of the spectrum-singularity determinant on (-x, x):
/// det(1 - K_+) and det(1 - K_-) with K_pm(u, v) = K(u, v) pm K(u, -v) on (0, x).
struct ParityLogDets {
  LogDet plus;
  LogDet minus;
};
ParityLogDets parity_log_dets(double a, double x, int order);

enum class GapMethod { Fredholm, Sigma1, HardEdgeProduct, CrossProduct };
std::string to_string(GapMethod m);

struct GapResult {
  double a = 0.0;
  double x = 0.0;
  GapMethod method = GapMethod::Fredholm;
  double E = 1.0;
  double logE = 0.0;
  double err_est = 0.0;
};

constexpr int kDefaultOrder = 60;
constexpr int kMaxOrder = 400;

/// Spectrum-singularity gap on (-x, x). err_est is |log E(order) - log E(2 order)|
/// (order doubling capped at kMaxOrder); the reported value is the finer one.
GapResult gap_fredholm(double a, double x, int order = kDefaultOrder);

/// log det(1 - K) for the hard-edge kernel on (0, X); err_est as above.
struct HardEdgeFredholm {
  double logE = 0.0;
  double err_est = 0.0;
};
HardEdgeFredholm hard_edge_fredholm(double a, double X, int order = kDefaultOrder);

/// The spectrum-singularity rule used by gap_fredholm on (0, x) (half line).
QuadratureRule ss_half_rule(double a, double x, int order);

}  // namespace ssgap::kernels
