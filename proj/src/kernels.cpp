#include "ssgap/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ssgap/errors.hpp"
#include "ssgap/specfun.hpp"

namespace ssgap::kernels {
namespace {

constexpr double kPi = std::numbers::pi;
using specfun::bessel_j;

// phi(u) = sgn(u) sqrt(pi|u|) J_{a+1/2}(pi|u|), psi(u) = sqrt(pi|u|) J_{a-1/2}(pi|u|)
struct SsFns {
  double phi = 0.0;
  double psi = 0.0;
  double diag = 0.0;
};

SsFns ss_fns(double a, double u) {
  const double z = kPi * std::fabs(u);
  SsFns f;
  if (z == 0.0) {
    f.phi = 0.0;
    f.psi = (a == 0.0) ? std::sqrt(2.0 / kPi) : 0.0;
    if (a < 0.0) f.psi = std::numeric_limits<double>::infinity();
    f.diag = (a == 0.0) ? 1.0 : (a > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return f;
  }
  const double jp = bessel_j(a + 0.5, z);
  const double jm = bessel_j(a - 0.5, z);
  const double rz = std::sqrt(z);
  f.phi = (u < 0.0 ? -1.0 : 1.0) * rz * jp;
  f.psi = rz * jm;
  f.diag = 0.5 * kPi * (z * (jm * jm + jp * jp) - 2.0 * a * jm * jp);
  return f;
}

double ss_offdiag(const SsFns& fu, const SsFns& fv, double u, double v) {
  return (fu.phi * fv.psi - fv.phi * fu.psi) / (2.0 * (u - v));
}

// Hard edge: f(u) = sqrt(u) J_{a+1}(sqrt u), g(u) = J_a(sqrt u).
struct HeFns {
  double f = 0.0;
  double g = 0.0;
  double diag = 0.0;
};

HeFns he_fns(double a, double u) {
  const double z = std::sqrt(u);
  const double ja = bessel_j(a, z);
  const double ja1 = bessel_j(a + 1.0, z);
  HeFns h;
  h.f = z * ja1;
  h.g = ja;
  h.diag = 0.25 * (ja * ja + ja1 * ja1 - (2.0 * a / z) * ja * ja1);
  return h;
}

double sine_kernel(double u, double v) {
  const double d = kPi * (u - v);
  if (d == 0.0) return 1.0;
  return std::sin(d) / d;
}

bool is_nonneg_integer(double x) { return x >= 0.0 && x == std::nearbyint(x); }

LogDet log_det_of(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw NumericError("fredholm: non-finite matrix entry");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::MatrixXd& u = lu.matrixLU();
  LogDet out;
  out.sign = static_cast<int>(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double d = u(i, i);
    if (d == 0.0) throw NumericError("fredholm: singular matrix");
    if (d < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::fabs(d));
  }
  return out;
}

// I - D K D from a kernel matrix.
Eigen::MatrixXd nystrom(const Eigen::MatrixXd& k, const QuadratureRule& rule) {
  const Eigen::Index n = static_cast<Eigen::Index>(rule.size());
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(rule.weights[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd m = -(sw.asDiagonal() * k * sw.asDiagonal());
  m.diagonal().array() += 1.0;
  return m;
}

Eigen::MatrixXd kernel_matrix(const KernelFn& kernel, const QuadratureRule& rule) {
  const Eigen::Index n = static_cast<Eigen::Index>(rule.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel(rule.nodes[static_cast<std::size_t>(i)], rule.nodes[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

// Kernel matrix built from per-node function values; avoids re-evaluating
// Bessel functions for every pair.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const QuadratureRule& rule) {
  const std::size_t n = rule.size();
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto& x = rule.nodes;
  switch (spec.kind) {
    case KernelKind::Sine:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sine_kernel(x[i], x[j]);
      break;
    case KernelKind::SpectrumSingularity: {
      std::vector<SsFns> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = ss_fns(spec.a, x[i]);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              (x[i] == x[j]) ? f[i].diag : ss_offdiag(f[i], f[j], x[i], x[j]);
        }
      }
      break;
    }
    case KernelKind::HardEdge: {
      std::vector<HeFns> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = he_fns(spec.a, x[i]);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              (x[i] == x[j]) ? f[i].diag
                             : (f[i].f * f[j].g - f[j].f * f[i].g) / (2.0 * (x[i] - x[j]));
        }
      }
      break;
    }
  }
  return k;
}

}  // namespace

void KernelSpec::validate() const {
  switch (kind) {
    case KernelKind::SpectrumSingularity:
      if (!(a > -0.5)) throw DomainError("spectrum-singularity kernel needs a > -1/2");
      break;
    case KernelKind::HardEdge:
      if (!(a > -1.0)) throw DomainError("hard-edge kernel needs a > -1");
      break;
    case KernelKind::Sine:
      break;
  }
}

double eval_kernel(const KernelSpec& spec, double u, double v) {
  spec.validate();
  switch (spec.kind) {
    case KernelKind::Sine:
      return sine_kernel(u, v);
    case KernelKind::SpectrumSingularity: {
      if (spec.a < 0.0 && (u == 0.0 || v == 0.0)) {
        throw SingularPointError("spectrum-singularity kernel is unbounded at 0 for a < 0");
      }
      const SsFns fu = ss_fns(spec.a, u);
      if (u == v) return fu.diag;
      return ss_offdiag(fu, ss_fns(spec.a, v), u, v);
    }
    case KernelKind::HardEdge: {
      if (!(u > 0.0 && v > 0.0)) throw DomainError("hard-edge kernel needs u, v > 0");
      const HeFns fu = he_fns(spec.a, u);
      if (u == v) return fu.diag;
      const HeFns fv = he_fns(spec.a, v);
      return (fu.f * fv.g - fv.f * fu.g) / (2.0 * (u - v));
    }
  }
  return 0.0;
}

double QuadratureRule::weight_sum() const {
  long double s = 0.0L;
  for (double w : weights) s += w;
  return static_cast<double>(s);
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  const int n = order;
  QuadratureRule r;
  r.nodes.assign(static_cast<std::size_t>(n), 0.0);
  r.weights.assign(static_cast<std::size_t>(n), 0.0);
  r.panels.push_back({-1.0, 1.0});
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

namespace {

void append_panel(QuadratureRule& out, const QuadratureRule& ref, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.nodes.push_back(mid + half * ref.nodes[i]);
    out.weights.push_back(half * ref.weights[i]);
  }
  out.panels.push_back({lo, hi});
}

}  // namespace

QuadratureRule build_rule(double lo, double hi, int order, bool split_at_zero) {
  if (!(lo < hi)) throw DomainError("build_rule: need lo < hi");
  if (order < 1) throw DomainError("build_rule: order must be positive");
  const QuadratureRule ref = gauss_legendre(order);
  QuadratureRule out;
  if (split_at_zero && lo < 0.0 && hi > 0.0) {
    append_panel(out, ref, lo, 0.0);
    append_panel(out, ref, 0.0, hi);
  } else {
    append_panel(out, ref, lo, hi);
  }
  return out;
}

QuadratureRule build_graded_rule(double hi, int order, double exponent) {
  if (!(hi > 0.0)) throw DomainError("build_graded_rule: need hi > 0");
  if (!(exponent > -1.0)) throw DomainError("build_graded_rule: exponent must exceed -1");
  constexpr double kRatio = 0.15;
  // Stop once the innermost panel contributes below ~1e-16.
  const double target = std::log(1e-16) / (exponent + 1.0);
  int levels = static_cast<int>(std::ceil((target - std::log(hi)) / std::log(kRatio)));
  levels = std::clamp(levels, 1, 60);
  const QuadratureRule outer = gauss_legendre(order);
  const QuadratureRule inner = gauss_legendre(std::max(10, order / 3));
  QuadratureRule out;
  double top = hi;
  append_panel(out, outer, top * kRatio, top);
  top *= kRatio;
  for (int l = 1; l < levels; ++l) {
    append_panel(out, inner, top * kRatio, top);
    top *= kRatio;
  }
  append_panel(out, inner, 0.0, top);
  return out;
}

QuadratureRule mirrored(const QuadratureRule& half) {
  QuadratureRule out;
  for (std::size_t i = half.size(); i-- > 0;) {
    out.nodes.push_back(-half.nodes[i]);
    out.weights.push_back(half.weights[i]);
  }
  for (std::size_t p = half.panels.size(); p-- > 0;) out.panels.push_back({-half.panels[p].hi, -half.panels[p].lo});
  out.nodes.insert(out.nodes.end(), half.nodes.begin(), half.nodes.end());
  out.weights.insert(out.weights.end(), half.weights.begin(), half.weights.end());
  out.panels.insert(out.panels.end(), half.panels.begin(), half.panels.end());
  return out;
}

LogDet fredholm_log_det(const KernelFn& kernel, const QuadratureRule& rule) {
  return log_det_of(nystrom(kernel_matrix(kernel, rule), rule));
}

LogDet fredholm_log_det(const KernelSpec& spec, const QuadratureRule& rule) {
  spec.validate();
  return log_det_of(nystrom(kernel_matrix(spec, rule), rule));
}

double fredholm_det(const KernelSpec& spec, const QuadratureRule& rule) {
  const LogDet d = fredholm_log_det(spec, rule);
  return d.sign * std::exp(d.log_abs);
}

namespace {

double resolvent_from(const Eigen::MatrixXd& k, const Eigen::VectorXd& col, double k_pp,
                      const QuadratureRule& rule) {
  const Eigen::Index n = static_cast<Eigen::Index>(rule.size());
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(rule.weights[static_cast<std::size_t>(i)]);
  const Eigen::MatrixXd m = nystrom(k, rule);
  if (!m.allFinite() || !col.allFinite()) throw NumericError("resolvent: non-finite entry");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::VectorXd rhs = sw.cwiseProduct(col);
  const Eigen::VectorXd g = lu.solve(rhs);
  if (!g.allFinite()) throw NumericError("resolvent: singular system");
  return k_pp + sw.cwiseProduct(col).dot(g);
}

}  // namespace

double resolvent_diag(const KernelFn& kernel, const QuadratureRule& rule, double point) {
  const Eigen::Index n = static_cast<Eigen::Index>(rule.size());
  Eigen::VectorXd col(n);
  for (Eigen::Index i = 0; i < n; ++i) col(i) = kernel(rule.nodes[static_cast<std::size_t>(i)], point);
  return resolvent_from(kernel_matrix(kernel, rule), col, kernel(point, point), rule);
}

double resolvent_diag(const KernelSpec& spec, const QuadratureRule& rule, double point) {
  spec.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(rule.size());
  Eigen::VectorXd col(n);
  for (Eigen::Index i = 0; i < n; ++i) col(i) = eval_kernel(spec, rule.nodes[static_cast<std::size_t>(i)], point);
  return resolvent_from(kernel_matrix(spec, rule), col, eval_kernel(spec, point, point), rule);
}

QuadratureRule ss_half_rule(double a, double x, int order) {
  // The determinant sees the kernel through |u|^{2a}; graded panels only
  // when that power is not a polynomial.
  if (is_nonneg_integer(2.0 * a)) return build_rule(0.0, x, order, false);
  return build_graded_rule(x, order, 2.0 * a);
}

ParityLogDets parity_log_dets(double a, double x, int order) {
  KernelSpec::spectrum_singularity(a).validate();
  if (!(x > 0.0)) throw DomainError("parity_log_dets: need x > 0");
  const QuadratureRule rule = ss_half_rule(a, x, order);
  const std::size_t n = rule.size();
  std::vector<SsFns> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = ss_fns(a, rule.nodes[i]);
  Eigen::MatrixXd kp(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd km(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto& u = rule.nodes;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double direct = (i == j) ? f[i].diag : ss_offdiag(f[i], f[j], u[i], u[j]);
      // K(u, -v) for u, v > 0: phi odd, psi even.
      const double reflected = (f[i].phi * f[j].psi + f[j].phi * f[i].psi) / (2.0 * (u[i] + u[j]));
      kp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = direct + reflected;
      km(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = direct - reflected;
    }
  }
  return {log_det_of(nystrom(kp, rule)), log_det_of(nystrom(km, rule))};
}

std::string to_string(GapMethod m) {
  switch (m) {
    case GapMethod::Fredholm: return "fredholm";
    case GapMethod::Sigma1: return "sigma1";
    case GapMethod::HardEdgeProduct: return "hard-edge";
    case GapMethod::CrossProduct: return "cross";
  }
  return "unknown";
}

namespace {

std::pair<int, int> doubling_orders(int order) {
  if (order < 4 || order > kMaxOrder) throw DomainError("quadrature order must lie in [4, 400]");
  const int fine = std::min(2 * order, kMaxOrder);
  if (fine == order) return {order / 2, order};
  return {order, fine};
}

double ss_log_det(double a, double x, int order) {
  const ParityLogDets p = parity_log_dets(a, x, order);
  if (p.plus.sign * p.minus.sign <= 0) throw NumericError("fredholm: determinant is not positive");
  return p.plus.log_abs + p.minus.log_abs;
}

}  // namespace

GapResult gap_fredholm(double a, double x, int order) {
  KernelSpec::spectrum_singularity(a).validate();
  if (!(x >= 0.0)) throw DomainError("gap_fredholm: need x >= 0");
  GapResult r;
  r.a = a;
  r.x = x;
  r.method = GapMethod::Fredholm;
  const auto [coarse, fine] = doubling_orders(order);
  if (x == 0.0) return r;
  const double l1 = ss_log_det(a, x, coarse);
  const double l2 = ss_log_det(a, x, fine);
  r.logE = l2;
  r.E = std::exp(l2);
  r.err_est = std::fabs(l2 - l1);
  return r;
}

HardEdgeFredholm hard_edge_fredholm(double a, double X, int order) {
  const KernelSpec spec = KernelSpec::hard_edge(a);
  spec.validate();
  if (!(X >= 0.0)) throw DomainError("hard_edge_fredholm: need X >= 0");
  HardEdgeFredholm out;
  if (X == 0.0) return out;
  const auto [coarse, fine] = doubling_orders(order);
  auto rule_for = [&](int n) {
    return is_nonneg_integer(a) ? build_rule(0.0, X, n, false) : build_graded_rule(X, n, a);
  };
  const LogDet d1 = fredholm_log_det(spec, rule_for(coarse));
  const LogDet d2 = fredholm_log_det(spec, rule_for(fine));
  if (d2.sign <= 0) throw NumericError("fredholm: determinant is not positive");
  out.logE = d2.log_abs;
  out.err_est = std::fabs(d2.log_abs - d1.log_abs);
  return out;
}

}  // namespace ssgap::kernels
