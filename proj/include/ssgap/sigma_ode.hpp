#pragma once

#include <vector>

#include "ssgap/kernels.hpp"
#include "ssgap/ode.hpp"

namespace ssgap::sigma {

struct SigmaParams {
  double v1 = 0.0;
  double v2 = 0.0;
};

enum class RegimeKind { HardEdgePlus, NegativeSide, SpectrumSing };

/// Small-coordinate boundary behaviour. `param` is a (hard edge and
/// spectrum singularity) or mu (negative side).
struct BoundaryRegime {
  RegimeKind kind = RegimeKind::HardEdgePlus;
  double param = 0.0;

  static BoundaryRegime hard_edge_plus(double a) { return {RegimeKind::HardEdgePlus, a}; }
  static BoundaryRegime negative_side(double mu) { return {RegimeKind::NegativeSide, mu}; }
  static BoundaryRegime spectrum_sing(double a) { return {RegimeKind::SpectrumSing, a}; }

  void validate() const;
  /// Sign of the coordinate on which the series lives.
  double side() const { return kind == RegimeKind::NegativeSide ? -1.0 : 1.0; }
  /// v for the sigma-form (hard edge: (a, a); negative side: (mu, -mu)).
  SigmaParams sigma_params() const;
};

double c_ss(double a);
double c_he(double a);
double c_tilde(double mu);

/// Truncated boundary series at `coord` and its derivatives.
struct SeriesValue {
  double sigma = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  /// Integral from 0 to coord of (sigma - c0 - c1 coord) / coord, where c0 + c1 coord
  /// is the polynomial part of the series (zero except on the negative side).
  double log_integral = 0.0;
  /// Size of the leading omitted term relative to the leading retained
  /// non-polynomial term.
  double rel_tail = 0.0;
};

/// Evaluates the series. Throws AccuracyError when rel_tail exceeds
/// `target_rel_err` (pass a negative target to skip the check).
SeriesValue bc_eval(const BoundaryRegime& regime, double coord, double target_rel_err = 1e-12);

/// Largest |coord| in {start, start/10, ...} >= floor meeting the target.
double choose_start(const BoundaryRegime& regime, double target_rel_err = 1e-12,
                    double start = 1e-3, double floor = 1e-8);

/// sigma(coord) = c0 + c1 coord + sum_k coefs[k] y^exponents[k], y = side * coord.
struct PowerSeries {
  double side = 1.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double lead_coef = 0.0;
  double lead_power = 0.0;
  std::vector<double> exponents;
  std::vector<double> coefs;
  /// Largest retained exponent; terms beyond it are treated as the tail.
  double max_power = 0.0;

  SeriesValue eval(double coord) const;
  /// Size of the highest retained shell (exponents within 1 of max_power)
  /// relative to the leading term; a proxy for the omitted tail.
  double rel_tail(double coord) const;
};

/// The printed series continued to relative order y^order by the coefficient
/// recursion of the third-order form.
PowerSeries extended_series(const BoundaryRegime& regime, double order = 8.0);

/// Value and coordinate derivatives at a point of a trajectory.
struct SigmaPoint {
  double coord = 0.0;
  double sigma = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Dense solution of a sigma-form (or sigma_1) ODE. Integration runs in
/// tau = ln|coord| on y = (u, |c| u_y, c^2 u_yy, running integral of u), where
/// u = sigma - c0 - c1 coord and y = |coord|.
class SigmaTrajectory {
 public:
  SigmaParams params;
  BoundaryRegime regime;
  double start = 0.0;  ///< signed coordinate where the series hands over
  double end = 0.0;
  PowerSeries series;
  SeriesValue start_series;
  ode::DenseTrajectory<4> dense;
  double max_residual = 0.0;  ///< monitored invariant over accepted steps

  bool contains(double coord) const;
  /// Uses the series below |start| and the dense output above.
  SigmaPoint at(double coord) const;
  /// Integral from 0 to coord of (sigma - c0 - c1 c) / c dc.
  double log_integral(double coord) const;
  /// Accepted-step abscissae (coordinates) and values.
  std::vector<SigmaPoint> grid() const;
};

/// Left side of the sigma-form, divided by max(1, (s sigma'')^2, sigma'^2).
double residual_sigma_form(const SigmaParams& p, double s, double sig, double d1, double d2);

/// Left side of the sigma_1 ODE with root sgn(a) sqrt(a^2 + sigma - r sigma')
/// (the nonnegative root for a >= 0), scaled like residual_sigma_form.
/// Throws BranchError when the radicand is negative.
double residual_ss_ode(double a, double r, double sig, double d1, double d2);

/// Integrates from the series at `start` to `end` (same sign).
SigmaTrajectory integrate_sigma_form(const SigmaParams& params, const BoundaryRegime& regime,
                                     double start, double end, double tol = 1e-12);

SigmaTrajectory integrate_sigma1(double a, double r_start, double r_end, double tol = 1e-12);

struct LogGap {
  double E = 1.0;
  double logE = 0.0;
};

/// Upper bound for the series/ODE switch point |coord|.
inline constexpr double kMaxStart = 0.5;

/// Hard-edge gap on (0, X) from the sigma-form at v = (a, a). Below the
/// switch point (the largest |coord| <= max_start where the series tail is
/// negligible) the series is used directly.
LogGap gap_hard_edge(double a, double X, double tol = 1e-12, double max_start = kMaxStart);

kernels::GapResult gap_ss_product(double a, double x, double tol = 1e-12, double max_start = kMaxStart);
kernels::GapResult gap_ss_cross(double a, double x, int eps = +1, double tol = 1e-12,
                                double max_start = kMaxStart);
kernels::GapResult gap_ss_sigma1(double a, double x, double tol = 1e-12, double max_start = kMaxStart);

/// The two mu values of the cross route; throws RouteValidityError if any mu >= 1.
std::vector<double> cross_mus(double a, int eps);

/// uH(u) = -sigma(4u) - v1 (v1 - v2) / 4 + u.
double hamiltonian_from_sigma(const SigmaParams& params, double u, const SigmaTrajectory& traj);

/// Max over the grid of the residual of
///   sH(s)|_(a-1/2) + sH(s)|_(a+1/2) - 2s = sH(-s)|_mu1 + sH(-s)|_mu2 + const,
/// written through sigma. Grid points must lie in (0, s_max].
double identity_hamiltonian_check(double a, const std::vector<double>& s_grid, int eps = +1,
                                  double tol = 1e-12);

/// Max over the grid of |sigma_1(2 pi x) + 2 [sigma^(a-1/2) + sigma^(a+1/2)](pi^2 x^2)| / max(1, |sigma_1|).
double sigma1_consistency_check(double a, const std::vector<double>& x_grid, double tol = 1e-12);

/// Lowest power at which the printed series differs from the recursion
/// series. Infinity if none.
double truncation_exponent(const BoundaryRegime& regime);

struct SeriesOverlap {
  double lo = 0.0;  ///< |coord| decade [lo, 10 lo] of the comparison
  double hi = 0.0;
  double slope = 0.0;  ///< least-squares slope of log|series - trajectory| (deviations) vs log|coord|
  double predicted = 0.0;  ///< truncation_exponent
  /// Slope of |printed - recursion series| over the same points.
  double predicted_local = 0.0;
  double max_abs_err = 0.0;
};

/// Compares the printed series with a trajectory started well below the decade
/// at `points` log-spaced |coord|. lo <= 0 picks the lowest decade on a 1-2-5
/// ladder where the relative discrepancy clears the integration error by 1e3.
SeriesOverlap series_overlap(const BoundaryRegime& regime, double lo = 0.0, int points = 11,
                             double tol = 1e-13);

}  // namespace ssgap::sigma
