"""Compiled inner loops for the method-of-lines reactor model.

State arrays always hold every grid node. Boundary nodes are algebraic: their
values follow from the interior through the Danckwerts closure, so the stored
boundary entries never feed back into the interior derivatives.
"""
import math

import numba
import numpy as np


@numba.njit(cache=True)
def inlet_closure(u1, u2, pe, h):
    # u(0) = (1/Pe) du/dxi with du/dxi = (-3u0 + 4u1 - u2) / (2h)
    return (4.0 * u1 - u2) / (2.0 * h * pe + 3.0)


@numba.njit(cache=True)
def outlet_closure(um2, um3):
    # du/dxi = (3u_n - 4u_{n-1} + u_{n-2}) / (2h) = 0
    return (4.0 * um2 - um3) / 3.0


@numba.njit(cache=True)
def reaction_rate(alpha, theta, gamma, beta, m, da):
    den = 1.0 + beta * theta
    if not den > 0.0:
        return np.nan
    base = 1.0 - alpha
    if base < 0.0:
        base = 0.0
    if m == 1.5:
        pw = base * math.sqrt(base)
    elif m == 1.0:
        pw = base
    else:
        pw = base ** m
    return da * pw * math.exp(gamma * beta * theta / den)


@numba.njit(cache=True)
def rhs(a, t, fa, ft, prm, h):
    """Fill (fa, ft) with d(alpha)/dtau and d(theta)/dtau.

    ``prm`` packs (gamma, beta, m, delta, theta_h, pe_m, pe_h, le, da).
    """
    gamma, beta, m, delta, th = prm[0], prm[1], prm[2], prm[3], prm[4]
    pem, peh, le, da = prm[5], prm[6], prm[7], prm[8]
    n = a.shape[0]
    cm = 1.0 / (pem * h * h)
    ch = 1.0 / (peh * h * h)
    ih = 1.0 / h
    inv_le = 1.0 / le
    am = inlet_closure(a[1], a[2], pem, h)
    tm = inlet_closure(t[1], t[2], peh, h)
    an = outlet_closure(a[n - 2], a[n - 3])
    tn = outlet_closure(t[n - 2], t[n - 3])
    for i in range(1, n - 1):
        if i == n - 2:
            ap = an
            tp = tn
        else:
            ap = a[i + 1]
            tp = t[i + 1]
        ai = a[i]
        ti = t[i]
        r = reaction_rate(ai, ti, gamma, beta, m, da)
        fa[i] = cm * (ap - 2.0 * ai + am) - ih * (ai - am) + r
        ft[i] = (ch * (tp - 2.0 * ti + tm) - ih * (ti - tm) + r + delta * (th - ti)) * inv_le
        am = ai
        tm = ti
    # boundary values are linear in the interior, so are their derivatives
    fa[0] = inlet_closure(fa[1], fa[2], pem, h)
    ft[0] = inlet_closure(ft[1], ft[2], peh, h)
    fa[n - 1] = outlet_closure(fa[n - 2], fa[n - 3])
    ft[n - 1] = outlet_closure(ft[n - 2], ft[n - 3])


@numba.njit(cache=True)
def apply_closure(a, t, prm, h):
    n = a.shape[0]
    a[0] = inlet_closure(a[1], a[2], prm[5], h)
    t[0] = inlet_closure(t[1], t[2], prm[6], h)
    a[n - 1] = outlet_closure(a[n - 2], a[n - 3])
    t[n - 1] = outlet_closure(t[n - 2], t[n - 3])


@numba.njit(cache=True)
def rk4_advance(a, t, nsteps, dt, prm, h):
    """Advance (a, t) in place by ``nsteps`` classical RK4 steps."""
    n = a.shape[0]
    k1a = np.empty(n)
    k1t = np.empty(n)
    k2a = np.empty(n)
    k2t = np.empty(n)
    k3a = np.empty(n)
    k3t = np.empty(n)
    k4a = np.empty(n)
    k4t = np.empty(n)
    wa = np.empty(n)
    wt = np.empty(n)
    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(nsteps):
        rhs(a, t, k1a, k1t, prm, h)
        for i in range(n):
            wa[i] = a[i] + half * k1a[i]
            wt[i] = t[i] + half * k1t[i]
        rhs(wa, wt, k2a, k2t, prm, h)
        for i in range(n):
            wa[i] = a[i] + half * k2a[i]
            wt[i] = t[i] + half * k2t[i]
        rhs(wa, wt, k3a, k3t, prm, h)
        for i in range(n):
            wa[i] = a[i] + dt * k3a[i]
            wt[i] = t[i] + dt * k3t[i]
        rhs(wa, wt, k4a, k4t, prm, h)
        for i in range(n):
            a[i] += sixth * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i])
            t[i] += sixth * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i])
        apply_closure(a, t, prm, h)
