#include "ssgap/sigma_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <string>

#include "ssgap/errors.hpp"
#include "ssgap/specfun.hpp"

namespace ssgap::sigma {
namespace {

constexpr double kPi = std::numbers::pi;
using specfun::gamma;

// sigma = c0 + c1 coord + sum_j b_j y^{p_j}, y = side * coord.
struct Term {
  double b;
  double p;
};

struct Series {
  double side = 1.0;
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<Term> terms;
  double lead_coef = 0.0;  // |b| of the leading non-polynomial term
  double lead_power = 0.0;
  // Leading omitted terms, as (|coefficient|, power).
  std::vector<Term> omitted;
};

// Adds b y^p (inner_0 + inner_1 coord^step + inner_2 coord^{2 step} + ...),
// converting coord^k to side^k y^k.
void add_block(Series& s, double b, double p, const std::vector<double>& inner, int step) {
  for (std::size_t k = 0; k < inner.size(); ++k) {
    const int deg = static_cast<int>(k) * step;
    const double sgn = (deg % 2 == 0) ? 1.0 : s.side;
    if (inner[k] != 0.0) s.terms.push_back({b * inner[k] * sgn, p + deg});
  }
}

Series make_series(const BoundaryRegime& r) {
  Series s;
  s.side = r.side();
  switch (r.kind) {
    case RegimeKind::HardEdgePlus: {
      const double a = r.param;
      const double C = c_he(a);
      add_block(s, C, a + 1.0,
                {1.0, -1.0 / (2.0 * (a + 2.0)), (2.0 * a + 3.0) / (16.0 * (a + 3.0) * (a + 2.0) * (a + 1.0))}, 1);
      const double b2 = C * C / (a + 1.0);
      add_block(s, b2, 2.0 * a + 2.0, {1.0, -(2.0 * a + 3.0) / (2.0 * (a + 2.0) * (a + 2.0))}, 1);
      const double b3 = C * C * C / ((a + 1.0) * (a + 1.0));
      add_block(s, b3, 3.0 * a + 3.0, {1.0}, 1);
      s.lead_coef = std::fabs(C);
      s.lead_power = a + 1.0;
      const double b4 = b3 * C / (a + 1.0);
      s.omitted = {{std::fabs(C), a + 4.0}, {std::fabs(b2), 2.0 * a + 4.0},
                   {std::fabs(b3), 3.0 * a + 4.0}, {std::fabs(b4), 4.0 * a + 4.0}};
      break;
    }
    case RegimeKind::NegativeSide: {
      const double mu = r.param;
      const double C = c_tilde(mu);
      s.c0 = -0.5 * mu * mu;
      s.c1 = 0.25;
      add_block(s, C, 1.0 - mu,
                {1.0, -1.0 / (2.0 * (mu - 2.0)), (2.0 * mu - 3.0) / (16.0 * (mu - 3.0) * (mu - 2.0) * (mu - 1.0))}, 1);
      const double b2 = -C * C / (mu - 1.0);
      add_block(s, b2, 2.0 - 2.0 * mu, {1.0, -(2.0 * mu - 3.0) / (2.0 * (mu - 2.0) * (mu - 2.0))}, 1);
      const double b3 = C * C * C / ((mu - 1.0) * (mu - 1.0));
      add_block(s, b3, 3.0 - 3.0 * mu, {1.0}, 1);
      s.lead_coef = std::fabs(C);
      s.lead_power = 1.0 - mu;
      const double b4 = b3 * C / (1.0 - mu);
      s.omitted = {{std::fabs(C), 4.0 - mu}, {std::fabs(b2), 4.0 - 2.0 * mu},
                   {std::fabs(b3), 4.0 - 3.0 * mu}, {std::fabs(b4), 4.0 - 4.0 * mu}};
      break;
    }
    case RegimeKind::SpectrumSing: {
      const double a = r.param;
      const double C = c_ss(a);
      const double q = 2.0 * a + 1.0;
      add_block(s, C, q,
                {1.0, -a / (2.0 * (2.0 * a + 3.0) * q), a / (16.0 * (2.0 * a + 5.0) * (2.0 * a + 3.0) * q)}, 2);
      const double b2 = -C * C / q;
      add_block(s, b2, 2.0 * q, {1.0, -(a + 1.0) / ((2.0 * a + 3.0) * (2.0 * a + 3.0))}, 2);
      const double b3 = C * C * C / (q * q);
      add_block(s, b3, 3.0 * q, {1.0}, 1);
      s.lead_coef = std::fabs(C);
      s.lead_power = q;
      const double b4 = b3 * C / q;
      s.omitted = {{std::fabs(C), q + 6.0}, {std::fabs(b2), 2.0 * q + 4.0},
                   {std::fabs(b3), 3.0 * q + 2.0}, {std::fabs(b4), 4.0 * q}};
      break;
    }
  }
  return s;
}

// sigma_1: r^2 sigma''' = -r sigma'' - 2 r (sigma'^2 - a^2) + 4 r w + 4 w sigma' - 6 a r root,
// w = a^2 + sigma - r sigma', root = sgn(a) sqrt(w); multiplied by r. With
// d = sigma - r sigma' the r^2 terms collapse to r^2 d (4 - 6|a| / (sqrt(w) + |a|)),
// so no O(a^2 r^2) pieces cancel against each other.
double r3_sigma1(double a, double r, double y0, double y1, double y2, double sqrt_w) {
  const double d = y0 - y1;
  const double den = sqrt_w + std::fabs(a);
  const double r2part = den > 0.0 ? r * r * d * (4.0 - 6.0 * std::fabs(a) / den) : 0.0;
  return -y2 - 2.0 * y1 * y1 + 4.0 * (a * a + d) * y1 + r2part;
}

double radicand_sqrt(double w, double scale, double where) {
  if (w >= 0.0) return std::sqrt(w);
  // Roundoff around an identically vanishing radicand (a = 0 at small r).
  if (w > -1e-13 * std::max(1.0, scale)) return 0.0;
  throw BranchError("sigma_1: radicand a^2 + sigma - r sigma' became negative", where);
}

}  // namespace

void BoundaryRegime::validate() const {
  switch (kind) {
    case RegimeKind::HardEdgePlus:
      if (!(param > -1.0)) throw DomainError("hard-edge regime needs a > -1");
      break;
    case RegimeKind::NegativeSide:
      if (!(param < 1.0)) throw RouteValidityError("negative-side regime needs mu < 1");
      break;
    case RegimeKind::SpectrumSing:
      if (!(param > -0.5)) throw DomainError("spectrum-singularity regime needs a > -1/2");
      break;
  }
}

SigmaParams BoundaryRegime::sigma_params() const {
  switch (kind) {
    case RegimeKind::HardEdgePlus: return {param, param};
    case RegimeKind::NegativeSide: return {param, -param};
    case RegimeKind::SpectrumSing: break;
  }
  throw DomainError("sigma_1 regime has no (v1, v2)");
}

double c_ss(double a) {
  return -2.0 / (std::pow(4.0, 2.0 * a + 1.0) * gamma(a + 0.5) * gamma(a + 1.5));
}

double c_he(double a) {
  return 1.0 / (std::pow(2.0, 2.0 * a + 2.0) * gamma(a + 2.0) * gamma(a + 1.0));
}

double c_tilde(double mu) {
  return 1.0 / (std::pow(4.0, 1.0 - mu) * gamma(2.0 - mu) * gamma(1.0 - mu));
}

SeriesValue bc_eval(const BoundaryRegime& regime, double coord, double target_rel_err) {
  regime.validate();
  const Series s = make_series(regime);
  const double y = s.side * coord;
  if (y < 0.0) throw DomainError("bc_eval: coordinate on the wrong side of 0");
  SeriesValue out;
  out.sigma = s.c0 + s.c1 * coord;
  out.d1 = s.c1;
  if (y == 0.0) return out;
  long double v = 0.0L, d1 = 0.0L, d2 = 0.0L, li = 0.0L;
  for (const Term& t : s.terms) {
    const long double yp = std::pow(static_cast<long double>(y), static_cast<long double>(t.p));
    v += t.b * yp;
    d1 += t.b * t.p * yp / y;
    d2 += t.b * t.p * (t.p - 1.0) * yp / (static_cast<long double>(y) * y);
    li += t.b * yp / t.p;
  }
  out.sigma += static_cast<double>(v);
  out.d1 += s.side * static_cast<double>(d1);
  out.d2 = static_cast<double>(d2);
  out.log_integral = static_cast<double>(li);
  double tail = 0.0;
  for (const Term& t : s.omitted) tail = std::max(tail, t.b * std::pow(y, t.p));
  const double lead = s.lead_coef * std::pow(y, s.lead_power);
  out.rel_tail = lead > 0.0 ? tail / lead : 0.0;
  if (target_rel_err >= 0.0 && out.rel_tail > target_rel_err) {
    throw AccuracyError("bc_eval: coordinate too large for the truncated series (tail " +
                            std::to_string(out.rel_tail) + ")",
                        out.rel_tail);
  }
  return out;
}

double choose_start(const BoundaryRegime& regime, double target_rel_err, double start, double floor) {
  double c = start;
  while (c > floor) {
    if (bc_eval(regime, regime.side() * c, -1.0).rel_tail <= target_rel_err) return c;
    c *= 0.1;
  }
  return floor;
}

double residual_sigma_form(const SigmaParams& p, double s, double sig, double d1, double d2) {
  const double a = s * d2;
  const double f = a * a - p.v1 * p.v2 * d1 * d1 + d1 * (4.0 * d1 - 1.0) * (sig - s * d1) -
                   (p.v1 - p.v2) * (p.v1 - p.v2) / 64.0;
  return f / std::max({1.0, a * a, d1 * d1});
}

double residual_ss_ode(double a, double r, double sig, double d1, double d2) {
  const double w = a * a + sig - r * d1;
  const double root = (a < 0.0 ? -1.0 : 1.0) * radicand_sqrt(w, a * a + std::fabs(sig), r);
  const double rs = r * d2;
  // a - root = -sgn(a) (sigma - r sigma') / (sqrt(w) + |a|)
  const double den = std::fabs(root) + std::fabs(a);
  const double am = den > 0.0 ? -(a < 0.0 ? -1.0 : 1.0) * (sig - r * d1) / den : 0.0;
  const double f = rs * rs - 4.0 * w * (d1 * d1 - am * am);
  return f / std::max({1.0, rs * rs, d1 * d1});
}

namespace {

constexpr double kExpTol = 1e-9;

std::size_t find_exponent(const std::vector<double>& ex, double e) {
  auto it = std::lower_bound(ex.begin(), ex.end(), e - kExpTol);
  if (it != ex.end() && std::fabs(*it - e) <= kExpTol) return static_cast<std::size_t>(it - ex.begin());
  return ex.size();
}

// Printed terms merged by exponent.
PowerSeries to_power_series(const Series& s) {
  PowerSeries ps;
  ps.side = s.side;
  ps.c0 = s.c0;
  ps.c1 = s.c1;
  ps.lead_coef = s.lead_coef;
  ps.lead_power = s.lead_power;
  std::vector<Term> t = s.terms;
  std::sort(t.begin(), t.end(), [](const Term& x, const Term& y) { return x.p < y.p; });
  for (const Term& term : t) {
    if (!ps.exponents.empty() && std::fabs(ps.exponents.back() - term.p) <= kExpTol) {
      ps.coefs.back() += term.b;
    } else {
      ps.exponents.push_back(term.p);
      ps.coefs.push_back(term.b);
    }
  }
  ps.max_power = ps.exponents.empty() ? 0.0 : ps.exponents.back();
  return ps;
}

// Start of the dense integration: largest |coord| <= max_start on a 1-2-5
// ladder whose series tail is below 1e-16 relative.
double series_start(const PowerSeries& ps, double max_start = kMaxStart) {
  constexpr double kLadder[] = {0.5, 0.2, 0.1};
  for (double scale = 1.0; scale >= 1e-8; scale *= 0.1) {
    for (double m : kLadder) {
      const double y = m * scale;
      if (y > max_start * (1.0 + 1e-12)) continue;
      if (ps.rel_tail(ps.side * y) <= 1e-16) return y;
    }
  }
  return 1e-8;
}

}  // namespace

SeriesValue PowerSeries::eval(double coord) const {
  const double y = side * coord;
  if (y < 0.0) throw DomainError("series: coordinate on the wrong side of 0");
  SeriesValue out;
  out.sigma = c0 + c1 * coord;
  out.d1 = c1;
  if (y == 0.0) return out;
  const long double Y = y;
  long double v = 0.0L, d1 = 0.0L, d2 = 0.0L, li = 0.0L;
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    const long double p = exponents[k];
    const long double yp = coefs[k] * std::pow(Y, p);
    v += yp;
    d1 += p * yp / Y;
    d2 += p * (p - 1.0L) * yp / (Y * Y);
    li += yp / p;
  }
  out.sigma += static_cast<double>(v);
  out.d1 += side * static_cast<double>(d1);
  out.d2 = static_cast<double>(d2);
  out.log_integral = static_cast<double>(li);
  out.rel_tail = rel_tail(coord);
  return out;
}

double PowerSeries::rel_tail(double coord) const {
  const double y = side * coord;
  if (!(y > 0.0)) return 0.0;
  double top = 0.0;
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    if (exponents[k] > max_power - 1.0 + kExpTol) top += std::fabs(coefs[k]) * std::pow(y, exponents[k]);
  }
  const double lead = lead_coef * std::pow(y, lead_power);
  return lead > 0.0 ? top / lead : 0.0;
}

// Hard edge and negative side: the coefficients of u = sum c_e y^e solve
//   2e((e-1)^2 - alpha^2) c_e + (2e - 3) c_{e-1} + sum_{e1+e2=e} (8 e1 - 12 e1 e2) c_e1 c_e2 = 0
// on exponents k e0 + j.
// Spectrum singularity: with d = sigma - r sigma' the third-order form gives
//   e((e-1)^2 - 4a^2) c_e = [-2 (r sigma')^2 + 4 d r sigma' + r^2 d g(d)]_e,
// g = 4 - 6|a| / (sqrt(a^2 + d) + |a|), on exponents k e0 + 2j; g is expanded
// in d / a^2 through (sqrt(1 + t) - 1) / t = sum_n binom(1/2, n + 1) t^n.
// In both cases the coefficient at the resonance e = 2 - e0 is free and is
// taken from the printed terms.
PowerSeries extended_series(const BoundaryRegime& regime, double order) {
  regime.validate();
  const Series printed = make_series(regime);
  PowerSeries ps = to_power_series(printed);
  if (!(order >= 1.0)) throw DomainError("extended_series: order must be at least 1");

  const bool ss = regime.kind == RegimeKind::SpectrumSing;
  const double alpha = regime.param;
  const double e0 = printed.lead_power;
  const double lead = regime.kind == RegimeKind::HardEdgePlus ? c_he(alpha)
                      : ss                                    ? c_ss(alpha)
                                                              : c_tilde(alpha);
  const int step = ss ? 2 : 1;
  const double emax = e0 + order;

  std::vector<double> ex;
  for (int k = 1; k * e0 <= emax + kExpTol; ++k) {
    for (int j = 0; k * e0 + j * step <= emax + kExpTol; ++j) ex.push_back(k * e0 + j * step);
  }
  std::sort(ex.begin(), ex.end());
  std::vector<double> merged;
  for (double e : ex) {
    if (merged.empty() || e - merged.back() > kExpTol) merged.push_back(e);
  }
  ex = std::move(merged);
  const std::size_t n = ex.size();

  double min_omitted = std::numeric_limits<double>::infinity();
  for (const Term& t : printed.omitted) min_omitted = std::min(min_omitted, t.p);

  // Coefficient at ex[i] of the product of two series on the grid.
  auto conv_at = [&](const std::vector<double>& f, const std::vector<double>& g, std::size_t i) {
    double acc = 0.0;
    for (std::size_t i1 = 0; i1 < i; ++i1) {
      const std::size_t i2 = find_exponent(ex, ex[i] - ex[i1]);
      if (i2 < i) acc += f[i1] * g[i2];
    }
    return acc;
  };

  const double a2 = alpha * alpha;
  const int max_pow = static_cast<int>(std::ceil(emax / e0)) + 1;
  std::vector<double> phi(max_pow + 1);  // binom(1/2, m + 1)
  {
    double b = 0.5;  // binom(1/2, 1)
    for (int m = 0; m <= max_pow; ++m) {
      phi[m] = b;
      b *= (0.5 - (m + 1)) / (m + 2);
    }
  }

  std::vector<double> c(n, 0.0);
  c[0] = lead;
  for (std::size_t i = 1; i < n; ++i) {
    const double e = ex[i];
    double rhs = 0.0;
    double D = 0.0;
    if (!ss) {
      const std::size_t im1 = find_exponent(ex, e - 1.0);
      if (im1 < i) rhs -= (2.0 * e - 3.0) * c[im1];
      for (std::size_t i1 = 0; i1 < i; ++i1) {
        const std::size_t i2 = find_exponent(ex, e - ex[i1]);
        if (i2 < i) rhs -= (8.0 * ex[i1] - 12.0 * ex[i1] * ex[i2]) * c[i1] * c[i2];
      }
      D = 2.0 * e * ((e - 1.0) * (e - 1.0) - a2);
    } else {
      std::vector<double> y1(n), d(n);
      for (std::size_t k = 0; k < i; ++k) {
        y1[k] = ex[k] * c[k];
        d[k] = (1.0 - ex[k]) * c[k];
      }
      rhs = -2.0 * conv_at(y1, y1, i) + 4.0 * conv_at(d, y1, i);
      const std::size_t im2 = find_exponent(ex, e - 2.0);
      if (im2 < i) {
        if (alpha == 0.0) {
          rhs += 4.0 * d[im2];
        } else {
          // d g(d) = d - 6 sum_{m>=1} phi_m d^{m+1} / a^{2m}
          double acc = d[im2];
          std::vector<double> pw = d;  // d^{m+1}, filled up to index im2
          double scale = 1.0;
          for (int m = 1; m <= max_pow; ++m) {
            std::vector<double> next(n, 0.0);
            for (std::size_t k = 0; k <= im2; ++k) next[k] = conv_at(pw, d, k);
            pw = std::move(next);
            scale /= a2;
            if (pw[im2] == 0.0 && (m + 1) * e0 > ex[im2] + kExpTol) break;
            acc -= 6.0 * phi[m] * scale * pw[im2];
          }
          rhs += acc;
        }
      }
      D = e * ((e - 1.0) * (e - 1.0) - 4.0 * a2);
    }
    if (std::fabs(e - (2.0 - e0)) <= kExpTol) {
      const std::size_t ip = find_exponent(ps.exponents, e);
      if (ip < ps.exponents.size()) {
        c[i] = ps.coefs[ip];
      } else if (e < min_omitted - kExpTol) {
        c[i] = 0.0;
      } else {
        throw RouteValidityError("extended_series: free coefficient beyond the printed terms");
      }
    } else {
      c[i] = rhs / D;
    }
  }

  ps.exponents = ex;
  ps.coefs = c;
  ps.max_power = ex.back();
  return ps;
}

bool SigmaTrajectory::contains(double coord) const {
  if (coord == 0.0) return true;
  const double side = regime.side();
  return side * coord > 0.0 && std::fabs(coord) <= std::fabs(end) * (1.0 + 1e-12);
}

SigmaPoint SigmaTrajectory::at(double coord) const {
  if (!contains(coord)) throw DomainError("SigmaTrajectory: coordinate outside the trajectory");
  SigmaPoint out;
  out.coord = coord;
  if (std::fabs(coord) <= std::fabs(start)) {
    const SeriesValue v = series.eval(coord);
    out.sigma = v.sigma;
    out.d1 = v.d1;
    out.d2 = v.d2;
    return out;
  }
  const double y = std::fabs(coord);
  const ode::Vec<4> st = dense(std::log(y));
  out.sigma = series.c0 + series.c1 * coord + st[0];
  out.d1 = series.c1 + series.side * st[1] / y;
  out.d2 = st[2] / (y * y);
  return out;
}

double SigmaTrajectory::log_integral(double coord) const {
  if (!contains(coord)) throw DomainError("SigmaTrajectory: coordinate outside the trajectory");
  if (std::fabs(coord) <= std::fabs(start)) return series.eval(coord).log_integral;
  return start_series.log_integral + dense(std::log(std::fabs(coord)))[3];
}

std::vector<SigmaPoint> SigmaTrajectory::grid() const {
  std::vector<SigmaPoint> out;
  for (std::size_t i = 0; i < dense.times().size(); ++i) {
    const double y = std::exp(dense.times()[i]);
    const double c = series.side * y;
    const auto& st = dense.states()[i];
    out.push_back({c, series.c0 + series.c1 * c + st[0], series.c1 + series.side * st[1] / y, st[2] / (y * y)});
  }
  return out;
}

namespace {

SigmaTrajectory integrate_impl(const BoundaryRegime& regime, double start, double end, double tol) {
  regime.validate();
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const double side = regime.side();
  if (!(side * start > 0.0) || !(side * end > 0.0)) {
    throw DomainError("start and end must lie on the regime's side of 0");
  }
  if (!(std::fabs(end) >= std::fabs(start))) throw DomainError("|end| must be at least |start|");

  const bool ss = regime.kind == RegimeKind::SpectrumSing;
  SigmaTrajectory traj;
  if (!ss) traj.params = regime.sigma_params();
  traj.regime = regime;
  traj.start = start;
  traj.end = end;
  traj.series = extended_series(regime);
  traj.start_series = traj.series.eval(start);
  if (traj.start_series.rel_tail > 1e-12) {
    throw AccuracyError("start coordinate too large for the boundary series", traj.start_series.rel_tail);
  }
  const double y_start = std::fabs(start);
  // The deviation alone; sigma itself can be dominated by the polynomial part.
  PowerSeries dev = traj.series;
  dev.c0 = 0.0;
  dev.c1 = 0.0;
  const SeriesValue sv = dev.eval(start);
  const ode::Vec<4> y0 = {sv.sigma, y_start * side * sv.d1, y_start * y_start * sv.d2, 0.0};
  const double a = regime.param;
  const double a2 = a * a;

  // State (u, Y u', Y^2 u'', int u dtau) in tau = ln Y. For sigma_1, u = sigma.
  auto rhs = [&](double tau, const ode::Vec<4>& y, ode::Vec<4>& dy) {
    const double Y = std::exp(tau);
    double third;
    if (ss) {
      const double w = a2 + y[0] - y[1];
      // Clamp tiny negative roundoff; genuine sign changes are caught by the monitor.
      third = r3_sigma1(a, Y, y[0], y[1], y[2], std::sqrt(std::max(w, 0.0)));
    } else {
      third = -y[2] + a2 * y[1] - 0.5 * (8.0 * y[1] - Y) * (y[0] - y[1]) + 0.5 * y[1] * (4.0 * y[1] - Y);
    }
    dy[0] = y[1];
    dy[1] = y[1] + y[2];
    dy[2] = 2.0 * y[2] + third;
    dy[3] = y[0];
  };

  const double limit = std::max(100.0 * tol, 1e-12);
  double max_res = 0.0;
  auto monitor = [&](double tau, const ode::Vec<4>& y) {
    const double Y = std::exp(tau);
    double res;
    if (ss) {
      res = residual_ss_ode(a, Y, y[0], y[1] / Y, y[2] / (Y * Y));
    } else {
      // Y^2 times the sigma-form in deviation variables, over the size of its terms
      // (with a y1^2 floor for the exactly linear solution at a = 0).
      const double d = y[0] - y[1];
      const double f = y[2] * y[2] - a2 * y[1] * y[1] + y[1] * (4.0 * y[1] - Y) * d;
      const double scale = y[2] * y[2] + a2 * y[1] * y[1] + std::fabs(y[1] * d) * (4.0 * std::fabs(y[1]) + Y) +
                           y[1] * y[1] * (1.0 + Y);
      res = scale > 0.0 ? f / scale : 0.0;
    }
    max_res = std::max(max_res, std::fabs(res));
    if (!(std::fabs(res) <= limit)) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "sigma ODE invariant drifted to %.3e at coordinate %.6g", res, side * Y);
      throw IntegrationError(msg);
    }
  };

  ode::OdeOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = 0.0;
  opt.shared_scale = 3;
  traj.dense = ode::integrate<4>(rhs, std::log(y_start), y0, std::log(std::fabs(end)), opt, monitor);
  traj.max_residual = max_res;
  return traj;
}

kernels::GapResult make_result(double a, double x, kernels::GapMethod m, double logE, double err) {
  kernels::GapResult r;
  r.a = a;
  r.x = x;
  r.method = m;
  r.logE = logE;
  r.E = std::exp(logE);
  r.err_est = err;
  return r;
}

void check_max_start(double m) {
  if (!(m >= 1e-8)) throw DomainError("series start cap must be >= 1e-8");
}

void check_x(double a, double x) {
  if (!(a > -0.5)) throw DomainError("spectrum-singularity gap needs a > -1/2");
  if (!(x >= 0.0)) throw DomainError("gap needs x >= 0");
}

// log_integral of a regime at coord, using the series alone when coord is
// inside its accuracy window.
double regime_log_integral(const BoundaryRegime& regime, double coord, double tol, double max_start) {
  const PowerSeries ps = extended_series(regime);
  const double c = series_start(ps, max_start);
  if (std::fabs(coord) <= c) return ps.eval(coord).log_integral;
  return integrate_impl(regime, regime.side() * c, coord, tol).log_integral(coord);
}

// The trajectory covering (0, end], possibly entirely inside the series window.
SigmaTrajectory trajectory_to(const BoundaryRegime& regime, double end, double tol) {
  const double c = series_start(extended_series(regime));
  return integrate_impl(regime, regime.side() * std::min(c, std::fabs(end)), end, tol);
}

double ss_product_log(double a, double x, double tol, double max_start) {
  const double X = kPi * kPi * x * x;
  return gap_hard_edge(a - 0.5, X, tol, max_start).logE + gap_hard_edge(a + 0.5, X, tol, max_start).logE;
}

double ss_cross_log(double a, double x, int eps, double tol, double max_start) {
  const double S = kPi * kPi * x * x;
  double total = 0.0;
  for (double mu : cross_mus(a, eps)) {
    total -= regime_log_integral(BoundaryRegime::negative_side(mu), -S, tol, max_start);
  }
  return total;
}

double ss_sigma1_log(double a, double x, double tol, double max_start) {
  return regime_log_integral(BoundaryRegime::spectrum_sing(a), 2.0 * kPi * x, tol, max_start);
}

}  // namespace

SigmaTrajectory integrate_sigma_form(const SigmaParams& params, const BoundaryRegime& regime, double start,
                                     double end, double tol) {
  if (regime.kind == RegimeKind::SpectrumSing) {
    throw DomainError("integrate_sigma_form: use integrate_sigma1 for the spectrum-singularity regime");
  }
  regime.validate();
  const SigmaParams rp = regime.sigma_params();
  if (params.v1 != rp.v1 || params.v2 != rp.v2) {
    throw DomainError("integrate_sigma_form: parameters do not match the boundary regime");
  }
  return integrate_impl(regime, start, end, tol);
}

SigmaTrajectory integrate_sigma1(double a, double r_start, double r_end, double tol) {
  if (!(r_start > 0.0 && r_start <= r_end)) throw DomainError("integrate_sigma1: need 0 < r_start <= r_end");
  return integrate_impl(BoundaryRegime::spectrum_sing(a), r_start, r_end, tol);
}

LogGap gap_hard_edge(double a, double X, double tol, double max_start) {
  BoundaryRegime::hard_edge_plus(a).validate();
  if (!(X >= 0.0)) throw DomainError("gap_hard_edge: need X >= 0");
  check_max_start(max_start);
  LogGap g;
  if (X == 0.0) return g;
  g.logE = -regime_log_integral(BoundaryRegime::hard_edge_plus(a), X, tol, max_start);
  g.E = std::exp(g.logE);
  return g;
}

std::vector<double> cross_mus(double a, int eps) {
  if (eps != 1 && eps != -1) throw DomainError("eps must be +1 or -1");
  const std::vector<double> mus = {-eps * a - 0.5, -eps * a + 0.5};
  for (double mu : mus) {
    if (!(mu < 1.0)) {
      throw RouteValidityError("cross route needs mu < 1 (got mu = " + std::to_string(mu) + ")");
    }
  }
  return mus;
}

// Error estimates: difference against a run at 100x looser tolerance.
kernels::GapResult gap_ss_product(double a, double x, double tol, double max_start) {
  check_x(a, x);
  check_max_start(max_start);
  if (x == 0.0) return make_result(a, x, kernels::GapMethod::HardEdgeProduct, 0.0, 0.0);
  const double l = ss_product_log(a, x, tol, max_start);
  const double l2 = ss_product_log(a, x, 100.0 * tol, max_start);
  return make_result(a, x, kernels::GapMethod::HardEdgeProduct, l, std::fabs(l - l2));
}

kernels::GapResult gap_ss_cross(double a, double x, int eps, double tol, double max_start) {
  check_x(a, x);
  check_max_start(max_start);
  cross_mus(a, eps);
  if (x == 0.0) return make_result(a, x, kernels::GapMethod::CrossProduct, 0.0, 0.0);
  const double l = ss_cross_log(a, x, eps, tol, max_start);
  const double l2 = ss_cross_log(a, x, eps, 100.0 * tol, max_start);
  return make_result(a, x, kernels::GapMethod::CrossProduct, l, std::fabs(l - l2));
}

kernels::GapResult gap_ss_sigma1(double a, double x, double tol, double max_start) {
  check_x(a, x);
  check_max_start(max_start);
  if (x == 0.0) return make_result(a, x, kernels::GapMethod::Sigma1, 0.0, 0.0);
  const double l = ss_sigma1_log(a, x, tol, max_start);
  const double l2 = ss_sigma1_log(a, x, 100.0 * tol, max_start);
  return make_result(a, x, kernels::GapMethod::Sigma1, l, std::fabs(l - l2));
}

double hamiltonian_from_sigma(const SigmaParams& params, double u, const SigmaTrajectory& traj) {
  const double s = 4.0 * u;
  if (!traj.contains(s)) throw DomainError("hamiltonian_from_sigma: 4u outside the trajectory");
  return -traj.at(s).sigma - 0.25 * params.v1 * (params.v1 - params.v2) + u;
}

double identity_hamiltonian_check(double a, const std::vector<double>& s_grid, int eps, double tol) {
  if (s_grid.empty()) return 0.0;
  const double smax = *std::max_element(s_grid.begin(), s_grid.end());
  if (!(*std::min_element(s_grid.begin(), s_grid.end()) > 0.0)) {
    throw DomainError("identity_hamiltonian_check: grid must be positive");
  }
  const double S = 4.0 * smax;
  const BoundaryRegime d1 = BoundaryRegime::hard_edge_plus(a - 0.5);
  const BoundaryRegime d2 = BoundaryRegime::hard_edge_plus(a + 0.5);
  const std::vector<double> mus = cross_mus(a, eps);
  const BoundaryRegime n1 = BoundaryRegime::negative_side(mus[0]);
  const BoundaryRegime n2 = BoundaryRegime::negative_side(mus[1]);
  const SigmaTrajectory t1 = trajectory_to(d1, S, tol);
  const SigmaTrajectory t2 = trajectory_to(d2, S, tol);
  const SigmaTrajectory t3 = trajectory_to(n1, -S, tol);
  const SigmaTrajectory t4 = trajectory_to(n2, -S, tol);
  double worst = 0.0;
  for (double u : s_grid) {
    const double lhs = -2.0 * u + hamiltonian_from_sigma(d1.sigma_params(), u, t1) +
                       hamiltonian_from_sigma(d2.sigma_params(), u, t2);
    const double rhs = hamiltonian_from_sigma(n1.sigma_params(), -u, t3) +
                       hamiltonian_from_sigma(n2.sigma_params(), -u, t4);
    worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs)));
  }
  return worst;
}

double sigma1_consistency_check(double a, const std::vector<double>& x_grid, double tol) {
  if (x_grid.empty()) return 0.0;
  const double xmax = *std::max_element(x_grid.begin(), x_grid.end());
  if (!(*std::min_element(x_grid.begin(), x_grid.end()) > 0.0)) {
    throw DomainError("sigma1_consistency_check: grid must be positive");
  }
  const SigmaTrajectory s1 = trajectory_to(BoundaryRegime::spectrum_sing(a), 2.0 * kPi * xmax, tol);
  const SigmaTrajectory hm = trajectory_to(BoundaryRegime::hard_edge_plus(a - 0.5), kPi * kPi * xmax * xmax, tol);
  const SigmaTrajectory hp = trajectory_to(BoundaryRegime::hard_edge_plus(a + 0.5), kPi * kPi * xmax * xmax, tol);
  double worst = 0.0;
  for (double x : x_grid) {
    const double lhs = s1.at(2.0 * kPi * x).sigma;
    const double X = kPi * kPi * x * x;
    const double rhs = -2.0 * (hm.at(X).sigma + hp.at(X).sigma);
    worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs)));
  }
  return worst;
}

double truncation_exponent(const BoundaryRegime& regime) {
  regime.validate();
  const PowerSeries pr = to_power_series(make_series(regime));
  const PowerSeries ext = extended_series(regime);
  for (std::size_t i = 0; i < ext.exponents.size(); ++i) {
    const std::size_t ip = find_exponent(pr.exponents, ext.exponents[i]);
    const double cp = ip < pr.exponents.size() ? pr.coefs[ip] : 0.0;
    if (std::fabs(ext.coefs[i] - cp) > 1e-10 * std::max(std::fabs(ext.coefs[i]), std::fabs(cp))) {
      return ext.exponents[i];
    }
  }
  return std::numeric_limits<double>::infinity();
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

SeriesOverlap series_overlap(const BoundaryRegime& regime, double lo, int points, double tol) {
  regime.validate();
  if (points < 3) throw DomainError("series_overlap: need at least 3 points");
  SeriesOverlap out;
  out.predicted = truncation_exponent(regime);
  if (!std::isfinite(out.predicted)) {
    throw DomainError("series_overlap: the printed series is exact for this regime");
  }
  const double side = regime.side();
  // Deviations from the polynomial part; on the negative side it can swamp sigma.
  PowerSeries printed = to_power_series(make_series(regime));
  printed.c0 = 0.0;
  printed.c1 = 0.0;
  const PowerSeries ext = extended_series(regime);
  PowerSeries ext_dev = ext;
  ext_dev.c0 = 0.0;
  ext_dev.c1 = 0.0;

  if (lo <= 0.0) {
    constexpr double kTop = 5.0;
    auto rel_err = [&](double y) {
      const double u = ext_dev.eval(side * y).sigma;
      return std::fabs(printed.eval(side * y).sigma - u) / std::fabs(u);
    };
    // Lowest 1-2-5 decade whose lower end clears the integration error by three
    // orders, so the leading omitted powers dominate as far as doubles allow.
    constexpr double kLadder[] = {1.0, 2.0, 5.0};
    for (double scale = 1e-5; scale < kTop && lo <= 0.0; scale *= 10.0) {
      for (double m : kLadder) {
        if (10.0 * m * scale > kTop) break;
        if (rel_err(m * scale) >= 1e3 * std::max(tol, 1e-13)) {
          lo = m * scale;
          break;
        }
      }
    }
    if (lo <= 0.0) throw AccuracyError("series_overlap: truncation error stays below the noise floor", 0.0);
  }
  const double start = std::min(series_start(ext), 0.01 * lo);
  const SigmaTrajectory traj = integrate_impl(regime, side * start, side * 10.0 * lo, tol);
  out.lo = lo;
  out.hi = 10.0 * lo;
  std::vector<double> ys, errs, trunc;
  for (int i = 0; i < points; ++i) {
    const double y = lo * std::pow(10.0, static_cast<double>(i) / (points - 1));
    const double pv = printed.eval(side * y).sigma;
    const double err = std::fabs(pv - traj.dense(std::log(y))[0]);
    if (!(err > 0.0)) throw AccuracyError("series_overlap: series and trajectory coincide exactly", 0.0);
    out.max_abs_err = std::max(out.max_abs_err, err);
    ys.push_back(y);
    errs.push_back(err);
    trunc.push_back(std::fabs(pv - ext_dev.eval(side * y).sigma));
  }
  out.slope = ls_slope(ys, errs);
  out.predicted_local = ls_slope(ys, trunc);
  return out;
}

}  // namespace ssgap::sigma
