"""Compiled inner loops for the hard-sphere collision integral.

Every kernel works in the sigma form of the collision integral: for a pre-collision
pair (xi, xi_*) with relative speed |V| the post-collision velocities are
``m +- |V| sigma / 2`` with ``m`` the midpoint and ``sigma`` on the unit sphere,
and the kernel ``|V . Omega|`` over the hemisphere becomes ``|V| / 4`` over the
full sphere.  Values between nodes come from one of three interpolants:

* mode 0: quadratic Lagrange on ``log f`` (exact for Maxwellians)
* mode 1: trilinear on ``f``
* mode 2: quadratic Lagrange on ``f / E`` times an analytic Gaussian envelope ``E``

Points outside the box carry zero.
"""
from __future__ import annotations

import numba
import numpy as np

LOG, TRILINEAR, RATIO = 0, 1, 2


@numba.njit(cache=True, inline="always")
def _axis(s, n, mode, wts):
    """Stencil start and weights along one axis for fractional index ``s``."""
    if mode == TRILINEAR:
        i0 = int(np.floor(s))
        if i0 < 0:
            i0 = 0
        elif i0 > n - 2:
            i0 = n - 2
        t = s - i0
        wts[0] = 1.0 - t
        wts[1] = t
        return i0, 2
    c = int(np.floor(s + 0.5))
    if c < 1:
        c = 1
    elif c > n - 2:
        c = n - 2
    t = s - c
    wts[0] = 0.5 * t * (t - 1.0)
    wts[1] = 1.0 - t * t
    wts[2] = 0.5 * t * (t + 1.0)
    return c - 1, 3


@numba.njit(cache=True)
def _envelope(E, p0, p1, p2):
    d0 = p0 - E[1]
    d1 = p1 - E[2]
    d2 = p2 - E[3]
    return E[0] * np.exp(-(d0 * d0 + d1 * d1 + d2 * d2) / E[4])


@numba.njit(cache=True)
def _interp2(fd, gd, Ef, Eg, mode, n, o, h, p0, p1, p2, wx, wy, wz):
    """Interpolate two nodal arrays at one point (shared stencil)."""
    ix, kx = _axis((p0 - o[0]) / h, n, mode, wx)
    iy, ky = _axis((p1 - o[1]) / h, n, mode, wy)
    iz, kz = _axis((p2 - o[2]) / h, n, mode, wz)
    sf = 0.0
    sg = 0.0
    for a in range(kx):
        for b in range(ky):
            wab = wx[a] * wy[b]
            base = ((ix + a) * n + (iy + b)) * n + iz
            for c in range(kz):
                wt = wab * wz[c]
                sf += wt * fd[base + c]
                sg += wt * gd[base + c]
    if mode == LOG:
        return np.exp(sf), np.exp(sg)
    if mode == RATIO:
        return sf * _envelope(Ef, p0, p1, p2), sg * _envelope(Eg, p0, p1, p2)
    return sf, sg


@numba.njit(cache=True, parallel=True)
def collision_kernel(fd, gd, fv, gv, Ef, Eg, mode, nodes, act_i, act_j, wj, d2,
                     o, h, n, sig, wsig, r2max, sym, half):
    """Nodal values of Q(f, g), and of Q(g, f) when ``sym`` (else zeros).

    With ``half`` the directions cover one hemisphere of an antipodally
    symmetric rule: swapping ``sigma -> -sigma`` swaps the post-collision pair,
    so both orderings come from the same two interpolations and the gain
    terms of Q(f, g) and Q(g, f) coincide.
    """
    N = nodes.shape[0]
    out = np.zeros(N)
    out2 = np.zeros(N)
    K = sig.shape[0]
    lo0, lo1, lo2 = o[0], o[1], o[2]
    hi0, hi1, hi2 = o[0] + (n - 1) * h, o[1] + (n - 1) * h, o[2] + (n - 1) * h
    for ii in numba.prange(act_i.shape[0]):
        # per-target scratch so that targets can run on separate threads
        wx = np.zeros(3)
        wy = np.zeros(3)
        wz = np.zeros(3)
        i = act_i[ii]
        x0 = nodes[i, 0]
        x1 = nodes[i, 1]
        x2 = nodes[i, 2]
        gain = 0.0
        gain2 = 0.0
        lf = 0.0
        lg = 0.0
        for jj in range(act_j.shape[0]):
            j = act_j[jj]
            V0 = x0 - nodes[j, 0]
            V1 = x1 - nodes[j, 1]
            V2 = x2 - nodes[j, 2]
            Vn = np.sqrt(V0 * V0 + V1 * V1 + V2 * V2)
            lf += wj[jj] * gv[j] * Vn
            if sym:
                lg += wj[jj] * fv[j] * Vn
            if Vn == 0.0 or d2[i] + d2[j] > r2max:
                continue
            m0 = x0 - 0.5 * V0
            m1 = x1 - 0.5 * V1
            m2 = x2 - 0.5 * V2
            r = 0.5 * Vn
            acc = 0.0
            acc2 = 0.0
            for k in range(K):
                s0 = r * sig[k, 0]
                s1 = r * sig[k, 1]
                s2 = r * sig[k, 2]
                p0 = m0 + s0
                p1 = m1 + s1
                p2 = m2 + s2
                q0 = m0 - s0
                q1 = m1 - s1
                q2 = m2 - s2
                if p0 < lo0 or p0 > hi0 or p1 < lo1 or p1 > hi1 or p2 < lo2 or p2 > hi2:
                    continue
                if q0 < lo0 or q0 > hi0 or q1 < lo1 or q1 > hi1 or q2 < lo2 or q2 > hi2:
                    continue
                fa, ga = _interp2(fd, gd, Ef, Eg, mode, n, o, h, p0, p1, p2, wx, wy, wz)
                fb, gb = _interp2(fd, gd, Ef, Eg, mode, n, o, h, q0, q1, q2, wx, wy, wz)
                if half:
                    acc += wsig[k] * (fa * gb + fb * ga)
                else:
                    acc += wsig[k] * fa * gb
                    if sym:
                        acc2 += wsig[k] * ga * fb
            if half:
                acc2 = acc
            gain += wj[jj] * 0.25 * Vn * acc
            gain2 += wj[jj] * 0.25 * Vn * acc2
        out[i] = 0.5 * gain - 0.5 * np.pi * fv[i] * lf
        if sym:
            out2[i] = 0.5 * gain2 - 0.5 * np.pi * gv[i] * lg
    return out, out2


@numba.njit(cache=True)
def _scatter(A, row, base, p0, p1, p2, o, h, n, loc, minv, wx, wy, wz):
    ix, kx = _axis((p0 - o[0]) / h, n, RATIO, wx)
    iy, ky = _axis((p1 - o[1]) / h, n, RATIO, wy)
    iz, kz = _axis((p2 - o[2]) / h, n, RATIO, wz)
    for a in range(kx):
        for b in range(ky):
            wab = base * wx[a] * wy[b]
            g0 = ((ix + a) * n + (iy + b)) * n + iz
            for c in range(kz):
                col = loc[g0 + c]
                if col >= 0:
                    A[row, col] += wab * wz[c] * minv[g0 + c]


@numba.njit(cache=True)
def linearized_kernel(nodes, w, act, loc, Mv, minv, d2, o, h, n, sig, wsig, r2max):
    """Dense pieces of the operators linearised about a Maxwellian ``M``.

    Returns ``(Ap, Aq, B, nu)`` with ``2Q(g, M) = Ap g - nu g`` and
    ``2Q(M, g) = Aq g - B g`` on the active nodes.  Post-collision values of
    ``g`` use quadratic interpolation of ``g / M``; because ``M(xi')M(xi_*') =
    M(xi)M(xi_*)`` the envelope factors collapse onto the pre-collision pair.
    """
    Na = act.shape[0]
    Ap = np.zeros((Na, Na))
    Aq = np.zeros((Na, Na))
    B = np.zeros((Na, Na))
    nu = np.zeros(Na)
    wx = np.zeros(3)
    wy = np.zeros(3)
    wz = np.zeros(3)
    K = sig.shape[0]
    lo0, lo1, lo2 = o[0], o[1], o[2]
    hi0, hi1, hi2 = o[0] + (n - 1) * h, o[1] + (n - 1) * h, o[2] + (n - 1) * h
    for a in range(Na):
        i = act[a]
        x0 = nodes[i, 0]
        x1 = nodes[i, 1]
        x2 = nodes[i, 2]
        for b in range(Na):
            j = act[b]
            V0 = x0 - nodes[j, 0]
            V1 = x1 - nodes[j, 1]
            V2 = x2 - nodes[j, 2]
            Vn = np.sqrt(V0 * V0 + V1 * V1 + V2 * V2)
            B[a, b] = np.pi * Mv[i] * w[j] * Vn
            nu[a] += np.pi * w[j] * Mv[j] * Vn
            if Vn == 0.0 or d2[i] + d2[j] > r2max:
                continue
            base = w[j] * 0.25 * Vn * Mv[i] * Mv[j]
            m0 = x0 - 0.5 * V0
            m1 = x1 - 0.5 * V1
            m2 = x2 - 0.5 * V2
            r = 0.5 * Vn
            for k in range(K):
                s0 = r * sig[k, 0]
                s1 = r * sig[k, 1]
                s2 = r * sig[k, 2]
                p0 = m0 + s0
                p1 = m1 + s1
                p2 = m2 + s2
                q0 = m0 - s0
                q1 = m1 - s1
                q2 = m2 - s2
                if p0 < lo0 or p0 > hi0 or p1 < lo1 or p1 > hi1 or p2 < lo2 or p2 > hi2:
                    continue
                if q0 < lo0 or q0 > hi0 or q1 < lo1 or q1 > hi1 or q2 < lo2 or q2 > hi2:
                    continue
                bk = base * wsig[k]
                _scatter(Ap, a, bk, p0, p1, p2, o, h, n, loc, minv, wx, wy, wz)
                _scatter(Aq, a, bk, q0, q1, q2, o, h, n, loc, minv, wx, wy, wz)
    return Ap, Aq, B, nu
