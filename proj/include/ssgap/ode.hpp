#pragma once

// Adaptive Dormand-Prince 8(5,3) integrator with the seventh-order continuous
// extension (DOP853 of Hairer, Norsett and Wanner), for small fixed-size
// systems. The trajectory keeps every accepted step's dense-output
// coefficients so it can be evaluated and differentiated anywhere.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ssgap/errors.hpp"

namespace ssgap::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  /// The largest magnitude among the first `shared_scale` components floors
  /// every component's error scale, so components that vanish identically do
  /// not demand absolute accuracy at the roundoff level.
  std::size_t shared_scale = 0;
  double h_init = 0.0;
  double h_max = 0.0;
  std::size_t max_steps = 500000;
};

template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 8> rc{};
};

/// Value and first two time derivatives of the interpolant.
template <std::size_t N>
struct Jet {
  Vec<N> value{};
  Vec<N> d1{};
  Vec<N> d2{};
};

template <std::size_t N>
class DenseTrajectory {
 public:
  DenseTrajectory() = default;

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  bool contains(double t) const {
    const double lo = std::min(t_begin(), t_end());
    const double hi = std::max(t_begin(), t_end());
    const double slack = 1e-12 * std::max(1.0, std::max(std::fabs(lo), std::fabs(hi)));
    return t >= lo - slack && t <= hi + slack;
  }

  /// Accepted step abscissae, including the initial point.
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec<N>>& states() const { return states_; }
  std::size_t steps() const { return segments_.size(); }

  Vec<N> operator()(double t) const { return jet(t).value; }

  Jet<N> jet(double t) const {
    if (segments_.empty()) {
      Jet<N> out;
      out.value = states_.front();
      return out;
    }
    const DenseSegment<N>& seg = segments_[locate(t)];
    const double th = (t - seg.t0) / seg.h;
    const double th1 = 1.0 - th;
    // Horner-like nesting rc1 + th(rc2 + th1(rc3 + th(rc4 + th1(rc5 + th(rc6 + th1(rc7 + th rc8)))))),
    // carrying first and second theta-derivatives along.
    Jet<N> out;
    for (std::size_t i = 0; i < N; ++i) {
      double v = seg.rc[7][i];
      double d = 0.0;
      double dd = 0.0;
      for (int k = 6; k >= 0; --k) {
        // Multiplier for rc[k] + m * (inner): theta for even k, 1-theta for odd k.
        const bool use_theta = (k % 2 == 0);
        const double m = use_theta ? th : th1;
        const double dm = use_theta ? 1.0 : -1.0;
        const double nv = seg.rc[static_cast<std::size_t>(k)][i] + m * v;
        const double nd = dm * v + m * d;
        const double ndd = 2.0 * dm * d + m * dd;
        v = nv;
        d = nd;
        dd = ndd;
      }
      out.value[i] = v;
      out.d1[i] = d / seg.h;
      out.d2[i] = dd / (seg.h * seg.h);
    }
    return out;
  }

  void push_initial(double t, const Vec<N>& y) {
    times_.push_back(t);
    states_.push_back(y);
  }
  void push_step(const DenseSegment<N>& seg, double t, const Vec<N>& y) {
    segments_.push_back(seg);
    times_.push_back(t);
    states_.push_back(y);
  }

 private:
  std::size_t locate(double t) const {
    const bool forward = times_.back() >= times_.front();
    // First node strictly beyond t in the direction of integration.
    auto it = forward ? std::upper_bound(times_.begin(), times_.end(), t)
                      : std::upper_bound(times_.begin(), times_.end(), t,
                                         [](double a, double b) { return a > b; });
    std::size_t idx = static_cast<std::size_t>(it - times_.begin());
    if (idx == 0) return 0;
    idx -= 1;
    return std::min(idx, segments_.size() - 1);
  }

  std::vector<double> times_;
  std::vector<Vec<N>> states_;
  std::vector<DenseSegment<N>> segments_;
};

namespace detail {

struct Dop853Tableau {
  static constexpr double c2 = 0.526001519587677318785587544488E-01;
  static constexpr double c3 = 0.789002279381515978178381316732E-01;
  static constexpr double c4 = 0.118350341907227396726757197510E+00;
  static constexpr double c5 = 0.281649658092772603273242802490E+00;
  static constexpr double c6 = 0.333333333333333333333333333333E+00;
  static constexpr double c7 = 0.25E+00;
  static constexpr double c8 = 0.307692307692307692307692307692E+00;
  static constexpr double c9 = 0.651282051282051282051282051282E+00;
  static constexpr double c10 = 0.6E+00;
  static constexpr double c11 = 0.857142857142857142857142857142E+00;
  static constexpr double c14 = 0.1E+00;
  static constexpr double c15 = 0.2E+00;
  static constexpr double c16 = 0.777777777777777777777777777778E+00;

  static constexpr double b1 = 5.42937341165687622380535766363E-2;
  static constexpr double b6 = 4.45031289275240888144113950566E0;
  static constexpr double b7 = 1.89151789931450038304281599044E0;
  static constexpr double b8 = -5.8012039600105847814672114227E0;
  static constexpr double b9 = 3.1116436695781989440891606237E-1;
  static constexpr double b10 = -1.52160949662516078556178806805E-1;
  static constexpr double b11 = 2.01365400804030348374776537501E-1;
  static constexpr double b12 = 4.47106157277725905176885569043E-2;

  static constexpr double bhh1 = 0.244094488188976377952755905512E+00;
  static constexpr double bhh2 = 0.733846688281611857341361741547E+00;
  static constexpr double bhh3 = 0.220588235294117647058823529412E-01;

  static constexpr double er1 = 0.1312004499419488073250102996E-01;
  static constexpr double er6 = -0.1225156446376204440720569753E+01;
  static constexpr double er7 = -0.4957589496572501915214079952E+00;
  static constexpr double er8 = 0.1664377182454986536961530415E+01;
  static constexpr double er9 = -0.3503288487499736816886487290E+00;
  static constexpr double er10 = 0.3341791187130174790297318841E+00;
  static constexpr double er11 = 0.8192320648511571246570742613E-01;
  static constexpr double er12 = -0.2235530786388629525884427845E-01;

  static constexpr double a21 = 5.26001519587677318785587544488E-2;
  static constexpr double a31 = 1.97250569845378994544595329183E-2;
  static constexpr double a32 = 5.91751709536136983633785987549E-2;
  static constexpr double a41 = 2.95875854768068491816892993775E-2;
  static constexpr double a43 = 8.87627564304205475450678981324E-2;
  static constexpr double a51 = 2.41365134159266685502369798665E-1;
  static constexpr double a53 = -8.84549479328286085344864962717E-1;
  static constexpr double a54 = 9.24834003261792003115737966543E-1;
  static constexpr double a61 = 3.7037037037037037037037037037E-2;
  static constexpr double a64 = 1.70828608729473871279604482173E-1;
  static constexpr double a65 = 1.25467687566822425016691814123E-1;
  static constexpr double a71 = 3.7109375E-2;
  static constexpr double a74 = 1.70252211019544039314978060272E-1;
  static constexpr double a75 = 6.02165389804559606850219397283E-2;
  static constexpr double a76 = -1.7578125E-2;
  static constexpr double a81 = 3.70920001185047927108779319836E-2;
  static constexpr double a84 = 1.70383925712239993810214054705E-1;
  static constexpr double a85 = 1.07262030446373284651809199168E-1;
  static constexpr double a86 = -1.53194377486244017527936158236E-2;
  static constexpr double a87 = 8.27378916381402288758473766002E-3;
  static constexpr double a91 = 6.24110958716075717114429577812E-1;
  static constexpr double a94 = -3.36089262944694129406857109825E0;
  static constexpr double a95 = -8.68219346841726006818189891453E-1;
  static constexpr double a96 = 2.75920996994467083049415600797E1;
  static constexpr double a97 = 2.01540675504778934086186788979E1;
  static constexpr double a98 = -4.34898841810699588477366255144E1;
  static constexpr double a101 = 4.77662536438264365890433908527E-1;
  static constexpr double a104 = -2.48811461997166764192642586468E0;
  static constexpr double a105 = -5.90290826836842996371446475743E-1;
  static constexpr double a106 = 2.12300514481811942347288949897E1;
  static constexpr double a107 = 1.52792336328824235832596922938E1;
  static constexpr double a108 = -3.32882109689848629194453265587E1;
  static constexpr double a109 = -2.03312017085086261358222928593E-2;
  static constexpr double a111 = -9.3714243008598732571704021658E-1;
  static constexpr double a114 = 5.18637242884406370830023853209E0;
  static constexpr double a115 = 1.09143734899672957818500254654E0;
  static constexpr double a116 = -8.14978701074692612513997267357E0;
  static constexpr double a117 = -1.85200656599969598641566180701E1;
  static constexpr double a118 = 2.27394870993505042818970056734E1;
  static constexpr double a119 = 2.49360555267965238987089396762E0;
  static constexpr double a1110 = -3.0467644718982195003823669022E0;
  static constexpr double a121 = 2.27331014751653820792359768449E0;
  static constexpr double a124 = -1.05344954667372501984066689879E1;
  static constexpr double a125 = -2.00087205822486249909675718444E0;
  static constexpr double a126 = -1.79589318631187989172765950534E1;
  static constexpr double a127 = 2.79488845294199600508499808837E1;
  static constexpr double a128 = -2.85899827713502369474065508674E0;
  static constexpr double a129 = -8.87285693353062954433549289258E0;
  static constexpr double a1210 = 1.23605671757943030647266201528E1;
  static constexpr double a1211 = 6.43392746015763530355970484046E-1;

  static constexpr double a141 = 5.61675022830479523392909219681E-2;
  static constexpr double a147 = 2.53500210216624811088794765333E-1;
  static constexpr double a148 = -2.46239037470802489917441475441E-1;
  static constexpr double a149 = -1.24191423263816360469010140626E-1;
  static constexpr double a1410 = 1.5329179827876569731206322685E-1;
  static constexpr double a1411 = 8.20105229563468988491666602057E-3;
  static constexpr double a1412 = 7.56789766054569976138603589584E-3;
  static constexpr double a1413 = -8.298E-3;
  static constexpr double a151 = 3.18346481635021405060768473261E-2;
  static constexpr double a156 = 2.83009096723667755288322961402E-2;
  static constexpr double a157 = 5.35419883074385676223797384372E-2;
  static constexpr double a158 = -5.49237485713909884646569340306E-2;
  static constexpr double a1511 = -1.08347328697249322858509316994E-4;
  static constexpr double a1512 = 3.82571090835658412954920192323E-4;
  static constexpr double a1513 = -3.40465008687404560802977114492E-4;
  static constexpr double a1514 = 1.41312443674632500278074618366E-1;
  static constexpr double a161 = -4.28896301583791923408573538692E-1;
  static constexpr double a166 = -4.69762141536116384314449447206E0;
  static constexpr double a167 = 7.68342119606259904184240953878E0;
  static constexpr double a168 = 4.06898981839711007970213554331E0;
  static constexpr double a169 = 3.56727187455281109270669543021E-1;
  static constexpr double a1613 = -1.39902416515901462129418009734E-3;
  static constexpr double a1614 = 2.9475147891527723389556272149E0;
  static constexpr double a1615 = -9.15095847217987001081870187138E0;

  static constexpr double d41 = -0.84289382761090128651353491142E+01;
  static constexpr double d46 = 0.56671495351937776962531783590E+00;
  static constexpr double d47 = -0.30689499459498916912797304727E+01;
  static constexpr double d48 = 0.23846676565120698287728149680E+01;
  static constexpr double d49 = 0.21170345824450282767155149946E+01;
  static constexpr double d410 = -0.87139158377797299206789907490E+00;
  static constexpr double d411 = 0.22404374302607882758541771650E+01;
  static constexpr double d412 = 0.63157877876946881815570249290E+00;
  static constexpr double d413 = -0.88990336451333310820698117400E-01;
  static constexpr double d414 = 0.18148505520854727256656404962E+02;
  static constexpr double d415 = -0.91946323924783554000451984436E+01;
  static constexpr double d416 = -0.44360363875948939664310572000E+01;
  static constexpr double d51 = 0.10427508642579134603413151009E+02;
  static constexpr double d56 = 0.24228349177525818288430175319E+03;
  static constexpr double d57 = 0.16520045171727028198505394887E+03;
  static constexpr double d58 = -0.37454675472269020279518312152E+03;
  static constexpr double d59 = -0.22113666853125306036270938578E+02;
  static constexpr double d510 = 0.77334326684722638389603898808E+01;
  static constexpr double d511 = -0.30674084731089398182061213626E+02;
  static constexpr double d512 = -0.93321305264302278729567221706E+01;
  static constexpr double d513 = 0.15697238121770843886131091075E+02;
  static constexpr double d514 = -0.31139403219565177677282850411E+02;
  static constexpr double d515 = -0.93529243588444783865713862664E+01;
  static constexpr double d516 = 0.35816841486394083752465898540E+02;
  static constexpr double d61 = 0.19985053242002433820987653617E+02;
  static constexpr double d66 = -0.38703730874935176555105901742E+03;
  static constexpr double d67 = -0.18917813819516756882830838328E+03;
  static constexpr double d68 = 0.52780815920542364900561016686E+03;
  static constexpr double d69 = -0.11573902539959630126141871134E+02;
  static constexpr double d610 = 0.68812326946963000169666922661E+01;
  static constexpr double d611 = -0.10006050966910838403183860980E+01;
  static constexpr double d612 = 0.77771377980534432092869265740E+00;
  static constexpr double d613 = -0.27782057523535084065932004339E+01;
  static constexpr double d614 = -0.60196695231264120758267380846E+02;
  static constexpr double d615 = 0.84320405506677161018159903784E+02;
  static constexpr double d616 = 0.11992291136182789328035130030E+02;
  static constexpr double d71 = -0.25693933462703749003312586129E+02;
  static constexpr double d76 = -0.15418974869023643374053993627E+03;
  static constexpr double d77 = -0.23152937917604549567536039109E+03;
  static constexpr double d78 = 0.35763911791061412378285349910E+03;
  static constexpr double d79 = 0.93405324183624310003907691704E+02;
  static constexpr double d710 = -0.37458323136451633156875139351E+02;
  static constexpr double d711 = 0.10409964950896230045147246184E+03;
  static constexpr double d712 = 0.29840293426660503123344363579E+02;
  static constexpr double d713 = -0.43533456590011143754432175058E+02;
  static constexpr double d714 = 0.96324553959188282948394950600E+02;
  static constexpr double d715 = -0.39177261675615439165231486172E+02;
  static constexpr double d716 = -0.14972683625798562581422125276E+03;
};

struct NoMonitor {
  template <class V>
  void operator()(double, const V&) const {}
};

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1. `f` has signature
/// `void(double t, const Vec<N>& y, Vec<N>& dy)`; `monitor(t, y)` is called
/// after every accepted step and may throw to abort.
template <std::size_t N, class Rhs, class Monitor = detail::NoMonitor>
DenseTrajectory<N> integrate(Rhs&& f, double t0, const Vec<N>& y0, double t1,
                             const OdeOptions& opt, Monitor&& monitor = {}) {
  using T = detail::Dop853Tableau;
  if (!(opt.rel_tol > 0.0)) throw DomainError("ode: rel_tol must be positive");

  DenseTrajectory<N> traj;
  traj.push_initial(t0, y0);
  if (t1 == t0) return traj;

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::fabs(t1 - t0);
  const double h_max = opt.h_max > 0.0 ? std::min(opt.h_max, span) : span;
  constexpr double kUround = 2.3e-16;
  constexpr double kSafe = 0.9;
  constexpr double kFacMin = 1.0 / 3.0;  // fac1
  constexpr double kFacMax = 6.0;        // fac2
  constexpr double kExpo = 1.0 / 8.0;

  auto scale = [&](const Vec<N>& a, const Vec<N>& b) {
    double floor = 0.0;
    for (std::size_t j = 0; j < std::min(opt.shared_scale, N); ++j) {
      floor = std::max({floor, std::fabs(a[j]), std::fabs(b[j])});
    }
    Vec<N> sk{};
    for (std::size_t i = 0; i < N; ++i) {
      const double m = std::max({std::fabs(a[i]), std::fabs(b[i]), floor});
      sk[i] = std::max(opt.abs_tol + opt.rel_tol * m, 1e-300);
    }
    return sk;
  };

  Vec<N> y = y0;
  double t = t0;
  Vec<N> k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, k8{}, k9{}, k10{}, w1{};
  f(t, y, k1);

  // Initial step (hinit of DOP853).
  double h = opt.h_init;
  if (h <= 0.0) {
    const Vec<N> sk = scale(y, y);
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      dnf += (k1[i] / sk[i]) * (k1[i] / sk[i]);
      dny += (y[i] / sk[i]) * (y[i] / sk[i]);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, h_max);
    for (std::size_t i = 0; i < N; ++i) w1[i] = y[i] + dir * h * k1[i];
    f(t + dir * h, w1, k2);
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double q = (k2[i] - k1[i]) / sk[i];
      der2 += q * q;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::fabs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
    h = std::min({100.0 * h, h1, h_max});
  }
  h = std::min(h, h_max) * dir;

  double facold = 1e-4;
  bool reject = false;
  bool last = false;
  std::size_t nstep = 0;
  Vec<N> ynew{}, kn{};

  while (true) {
    if (nstep++ > opt.max_steps) throw IntegrationError("ode: maximum number of steps exceeded");
    if (0.1 * std::fabs(h) <= std::fabs(t) * kUround || std::fabs(h) < 1e-300) {
      throw StiffnessError("ode: step size underflow at t = " + std::to_string(t));
    }
    if ((t + 1.01 * h - t1) * dir > 0.0) {
      h = t1 - t;
      last = true;
    }

    for (std::size_t i = 0; i < N; ++i) w1[i] = y[i] + h * T::a21 * k1[i];
    f(t + T::c2 * h, w1, k2);
    for (std::size_t i = 0; i < N; ++i) w1[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
    f(t + T::c3 * h, w1, k3);
    for (std::size_t i = 0; i < N; ++i) w1[i] = y[i] + h * (T::a41 * k1[i] + T::a43 * k3[i]);
    f(t + T::c4 * h, w1, k4);
    for (std::size_t i = 0; i < N; ++i)
      w1[i] = y[i] + h * (T::a51 * k1[i] + T::a53 * k3[i] + T::a54 * k4[i]);
    f(t + T::c5 * h, w1, k5);
    for (std::size_t i = 0; i < N; ++i)
      w1[i] = y[i] + h * (T::a61 * k1[i] + T::a64 * k4[i] + T::a65 * k5[i]);
    f(t + T::c6 * h, w1, k6);
    for (std::size_t i = 0; i < N; ++i)
      w1[i] = y[i] + h * (T::a71 * k1[i] + T::a74 * k4[i] + T::a75 * k5[i] + T::a76 * k6[i]);
    f(t + T::c7 * h, w1, k7);
    for (std::size_t i = 0; i < N; ++i)
      w1[i] = y[i] + h * (T::a81 * k1[i] + T::a84 * k4[i] + T::a85 * k5[i] + T::a86 * k6[i] +
                          T::a87 * k7[i]);
    f(t + T::c8 * h, w1, k8);
    for (std::size_t i = 0; i < N; ++i)
      w1[i] = y[i] + h * (T::a91 * k1[i] + T::a94 * k4[i] + T::a95 * k5[i] + T::a96 * k6[i] +
                          T::a97 * k7[i] + T::a98 * k8[i]);
    f(t + T::c9 * h, w1, k9);
    for (std::size_t i = 0; i < N; ++i)
      w1[i] = y[i] + h * (T::a101 * k1[i] + T::a104 * k4[i] + T::a105 * k5[i] + T::a106 * k6[i] +
                          T::a107 * k7[i] + T::a108 * k8[i] + T::a109 * k9[i]);
    f(t + T::c10 * h, w1, k10);
    for (std::size_t i = 0; i < N; ++i)
      w1[i] = y[i] + h * (T::a111 * k1[i] + T::a114 * k4[i] + T::a115 * k5[i] + T::a116 * k6[i] +
                          T::a117 * k7[i] + T::a118 * k8[i] + T::a119 * k9[i] + T::a1110 * k10[i]);
    f(t + T::c11 * h, w1, k2);
    const double tph = t + h;
    for (std::size_t i = 0; i < N; ++i)
      w1[i] = y[i] + h * (T::a121 * k1[i] + T::a124 * k4[i] + T::a125 * k5[i] + T::a126 * k6[i] +
                          T::a127 * k7[i] + T::a128 * k8[i] + T::a129 * k9[i] +
                          T::a1210 * k10[i] + T::a1211 * k2[i]);
    f(tph, w1, k3);
    for (std::size_t i = 0; i < N; ++i) {
      k4[i] = T::b1 * k1[i] + T::b6 * k6[i] + T::b7 * k7[i] + T::b8 * k8[i] + T::b9 * k9[i] +
              T::b10 * k10[i] + T::b11 * k2[i] + T::b12 * k3[i];
      ynew[i] = y[i] + h * k4[i];
    }

    // Error estimate: fifth- and third-order embedded formulas.
    const Vec<N> sk = scale(y, ynew);
    double err = 0.0, err2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double q = (k4[i] - T::bhh1 * k1[i] - T::bhh2 * k9[i] - T::bhh3 * k3[i]) / sk[i];
      err2 += q * q;
      q = (T::er1 * k1[i] + T::er6 * k6[i] + T::er7 * k7[i] + T::er8 * k8[i] + T::er9 * k9[i] +
           T::er10 * k10[i] + T::er11 * k2[i] + T::er12 * k3[i]) /
          sk[i];
      err += q * q;
    }
    double deno = err + 0.01 * err2;
    if (deno <= 0.0) deno = 1.0;
    err = std::fabs(h) * err * std::sqrt(1.0 / (deno * static_cast<double>(N)));
    if (!std::isfinite(err)) err = 1e10;

    const double fac11 = std::pow(err, kExpo);
    double fac = fac11 / std::pow(facold, 0.0);
    fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafe));
    double hnew = h / fac;

    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      f(tph, ynew, kn);

      // Dense output (three extra stages).
      DenseSegment<N> seg;
      seg.t0 = t;
      seg.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        seg.rc[0][i] = y[i];
        const double ydiff = ynew[i] - y[i];
        seg.rc[1][i] = ydiff;
        const double bspl = h * k1[i] - ydiff;
        seg.rc[2][i] = bspl;
        seg.rc[3][i] = ydiff - h * kn[i] - bspl;
        seg.rc[4][i] = T::d41 * k1[i] + T::d46 * k6[i] + T::d47 * k7[i] + T::d48 * k8[i] +
                       T::d49 * k9[i] + T::d410 * k10[i] + T::d411 * k2[i] + T::d412 * k3[i];
        seg.rc[5][i] = T::d51 * k1[i] + T::d56 * k6[i] + T::d57 * k7[i] + T::d58 * k8[i] +
                       T::d59 * k9[i] + T::d510 * k10[i] + T::d511 * k2[i] + T::d512 * k3[i];
        seg.rc[6][i] = T::d61 * k1[i] + T::d66 * k6[i] + T::d67 * k7[i] + T::d68 * k8[i] +
                       T::d69 * k9[i] + T::d610 * k10[i] + T::d611 * k2[i] + T::d612 * k3[i];
        seg.rc[7][i] = T::d71 * k1[i] + T::d76 * k6[i] + T::d77 * k7[i] + T::d78 * k8[i] +
                       T::d79 * k9[i] + T::d710 * k10[i] + T::d711 * k2[i] + T::d712 * k3[i];
      }
      Vec<N> s10{}, s2{}, s3{};
      for (std::size_t i = 0; i < N; ++i)
        w1[i] = y[i] + h * (T::a141 * k1[i] + T::a147 * k7[i] + T::a148 * k8[i] + T::a149 * k9[i] +
                            T::a1410 * k10[i] + T::a1411 * k2[i] + T::a1412 * k3[i] +
                            T::a1413 * kn[i]);
      f(t + T::c14 * h, w1, s10);
      for (std::size_t i = 0; i < N; ++i)
        w1[i] = y[i] + h * (T::a151 * k1[i] + T::a156 * k6[i] + T::a157 * k7[i] + T::a158 * k8[i] +
                            T::a1511 * k2[i] + T::a1512 * k3[i] + T::a1513 * kn[i] +
                            T::a1514 * s10[i]);
      f(t + T::c15 * h, w1, s2);
      for (std::size_t i = 0; i < N; ++i)
        w1[i] = y[i] + h * (T::a161 * k1[i] + T::a166 * k6[i] + T::a167 * k7[i] + T::a168 * k8[i] +
                            T::a169 * k9[i] + T::a1613 * kn[i] + T::a1614 * s10[i] +
                            T::a1615 * s2[i]);
      f(t + T::c16 * h, w1, s3);
      for (std::size_t i = 0; i < N; ++i) {
        seg.rc[4][i] = h * (seg.rc[4][i] + T::d413 * kn[i] + T::d414 * s10[i] + T::d415 * s2[i] +
                            T::d416 * s3[i]);
        seg.rc[5][i] = h * (seg.rc[5][i] + T::d513 * kn[i] + T::d514 * s10[i] + T::d515 * s2[i] +
                            T::d516 * s3[i]);
        seg.rc[6][i] = h * (seg.rc[6][i] + T::d613 * kn[i] + T::d614 * s10[i] + T::d615 * s2[i] +
                            T::d616 * s3[i]);
        seg.rc[7][i] = h * (seg.rc[7][i] + T::d713 * kn[i] + T::d714 * s10[i] + T::d715 * s2[i] +
                            T::d716 * s3[i]);
      }

      k1 = kn;
      y = ynew;
      t = last ? t1 : tph;
      traj.push_step(seg, t, y);
      monitor(t, y);
      if (last) return traj;

      if (std::fabs(hnew) > h_max) hnew = dir * h_max;
      if (reject) hnew = dir * std::min(std::fabs(hnew), std::fabs(h));
      reject = false;
    } else {
      hnew = h / std::min(1.0 / kFacMin, fac11 / kSafe);
      reject = true;
      last = false;
    }
    h = hnew;
  }
}

}  // namespace ssgap::ode
