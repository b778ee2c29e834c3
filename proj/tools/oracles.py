#!/usr/bin/env python3
"""Regenerates the frozen reference values in tests/unit/oracles.hpp with mpmath.

The Fredholm values use an arbitrary-precision Nystrom discretization that
shares no code with the C++ library: substitution u = x t^4 on (0, x) to
smooth the endpoint behaviour, Gauss-Legendre in t, order doubling until the
log-determinant settles.
"""

import sys

import mpmath as mp

mp.mp.dps = 30


def ss_fns(a, u):
    z = mp.pi * abs(u)
    jp = mp.besselj(a + mp.mpf(1) / 2, z)
    jm = mp.besselj(a - mp.mpf(1) / 2, z)
    rz = mp.sqrt(z)
    return mp.sign(u) * rz * jp, rz * jm, mp.pi / 2 * (z * (jm**2 + jp**2) - 2 * a * jm * jp)


def ss_log_det(a, x, n):
    t, w = gauss_legendre(n)
    p = 4
    nodes = [x * ti**p for ti in t]
    weights = [x * p * ti ** (p - 1) * wi for ti, wi in zip(t, w)]
    f = [ss_fns(a, u) for u in nodes]
    total = mp.mpf(0)
    for parity in (1, -1):
        m = mp.matrix(n, n)
        for i in range(n):
            phi_i, psi_i, d_i = f[i]
            for j in range(n):
                phi_j, psi_j, _ = f[j]
                if i == j:
                    k = d_i
                else:
                    k = (phi_i * psi_j - phi_j * psi_i) / (2 * (nodes[i] - nodes[j]))
                # K(u, -v): phi(-v) = -phi(v), psi(-v) = psi(v)
                k_refl = (phi_i * psi_j + phi_j * psi_i) / (2 * (nodes[i] + nodes[j]))
                m[i, j] = (1 if i == j else 0) - mp.sqrt(weights[i] * weights[j]) * (k + parity * k_refl)
        total += mp.log(mp.det(m))
    return total


_gl_cache = {}


def gauss_legendre(n):
    if n not in _gl_cache:
        nodes, weights = [], []
        for k in range(1, n + 1):
            x = mp.cos(mp.pi * (k - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mp.mpf(1), x
                for j in range(2, n + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mp.mpf(10) ** (-mp.mp.dps + 2):
                    break
            nodes.append((x + 1) / 2)
            weights.append(1 / ((1 - x * x) * dp * dp))
        _gl_cache[n] = (nodes, weights)
    return _gl_cache[n]


def fredholm(a, x):
    prev = None
    for n in (24, 36, 54, 80):
        cur = ss_log_det(mp.mpf(a), mp.mpf(x), n)
        if prev is not None and abs(cur - prev) < mp.mpf(10) ** -15 * max(1, abs(cur)):
            return cur
        prev = cur
    raise RuntimeError("no convergence for a=%s x=%s" % (a, x))


def emit(name, values):
    print("inline constexpr double %s[] = {" % name)
    for v in values:
        print("    %s," % mp.nstr(v, 17, min_fixed=-100, max_fixed=100))
    print("};")


def main():
    print("#pragma once\n")
    print("// Generated by tools/oracles.py (mpmath, %d digits)." % mp.mp.dps)
    g_args = [0.5, 1.0, 2.5, 7.25, 0.1, -0.5, -2.7, 12.0]
    print("inline constexpr double kGammaArgs[] = {%s};" % ", ".join(repr(x) for x in g_args))
    emit("kGamma", [mp.gamma(x) for x in g_args])
    bess = [(0.0, 0.1), (0.0, 5.0), (0.5, 1.0), (1.3, 12.5), (2.5, 30.0), (-0.3, 2.0), (-0.5, 80.0), (3.0, 60.0)]
    print("inline constexpr double kBesselArgs[][2] = {%s};" % ", ".join("{%r, %r}" % b for b in bess))
    emit("kBesselJ", [mp.besselj(nu, z) for nu, z in bess])
    ibess = [(0.0, 0.1), (1.0, 5.0), (0.5, 1.0), (1.3, 12.5), (2.5, 29.0), (-0.3, 2.0), (0.0, 45.0), (3.0, 60.0)]
    print("inline constexpr double kBesselIArgs[][2] = {%s};" % ", ".join("{%r, %r}" % b for b in ibess))
    emit("kBesselI", [mp.besseli(nu, z) for nu, z in ibess])
    he = [1.0, 4.0, 10.0, 20.0]
    print("inline constexpr double kHardEdgeX[] = {%s};" % ", ".join(repr(x) for x in he))
    # a = 1 hard edge in closed form: e^{-X/4} I_0(sqrt X)
    emit("kHardEdgeA1", [mp.exp(-mp.mpf(x) / 4) * mp.besseli(0, mp.sqrt(x)) for x in he])
    z = 2 * mp.sqrt(mp.mpf("1.5"))
    i0, i1, i2 = (mp.besseli(k, z) for k in range(3))
    j0, j1, j2 = (mp.besselj(k, z) for k in range(3))
    # n = 3 Toeplitz determinants at X = 1.5 by direct expansion
    tau_diag3 = mp.det(mp.matrix([[i0, i1, i2], [i1, i0, i1], [i2, i1, i0]]))
    tau_cross3 = mp.exp(mp.mpf("1.5")) * mp.det(mp.matrix([[j0, -j1, j2], [j1, j0, -j1], [j2, j1, j0]]))
    emit("kTauAt1p5", [i0**2 - i1**2, tau_diag3, mp.exp(mp.mpf("1.5")) * (j0**2 + j1**2), tau_cross3])
    a_grid = [0.0, 0.25, 0.5, 1.0, 2.5]
    x_grid = [0.25, 0.5, 1.0, 1.5]
    vals = []
    for a in a_grid:
        for x in x_grid:
            vals.append(fredholm(a, x))
            print("// a=%s x=%s done" % (a, x), file=sys.stderr)
    emit("kFredholmLogE", vals)


if __name__ == "__main__":
    main()
