"""Ideal-gas Euler physics in 1D and 2D.

State arrays carry the variables on axis 0:

    1D conservative (rho, rho*u, E)          primitive (rho, u, p)
    2D conservative (rho, rho*u, rho*v, E)   primitive (rho, u, v, p)

``axis`` selects the flux direction (0 = x, 1 = y); only 0 is valid in 1D.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import njit

DEFAULT_ENTROPY_FIX = 0.1


class NonPhysicalStateError(ArithmeticError):
    """Raised when density or pressure is not strictly positive."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")


def _momentum_slot(nvar: int, axis: int) -> int:
    if nvar == 3 and axis != 0:
        raise ValueError("1D states only have an x flux")
    if axis not in (0, 1):
        raise ValueError(f"axis must be 0 (x) or 1 (y), got {axis}")
    return 1 + axis


def _first_bad(mask) -> tuple:
    idx = np.argwhere(np.asarray(mask))
    return tuple(int(i) for i in idx[0]) if idx.size else ()


def pressure(w, gas: GasModel = GasModel()):
    w = np.asarray(w, dtype=float)
    kinetic = 0.5 * np.sum(w[1:-1] ** 2, axis=0) / w[0]
    return (gas.gamma - 1.0) * (w[-1] - kinetic)


def cons_to_prim(w, gas: GasModel = GasModel(), check: bool = True):
    """Conservative -> primitive.  Raises NonPhysicalStateError with the cell index."""
    w = np.asarray(w, dtype=float)
    rho = w[0]
    if check and not np.all(rho > 0):
        idx = _first_bad(~(rho > 0))
        raise NonPhysicalStateError(f"non-positive density at cell {idx}", idx)
    vel = w[1:-1] / rho
    p = (gas.gamma - 1.0) * (w[-1] - 0.5 * rho * np.sum(vel ** 2, axis=0))
    if check and not np.all(p > 0):
        idx = _first_bad(~(p > 0))
        raise NonPhysicalStateError(f"non-positive pressure at cell {idx}", idx)
    return np.concatenate([rho[None], vel, p[None]], axis=0)


def prim_to_cons(q, gas: GasModel = GasModel()):
    q = np.asarray(q, dtype=float)
    rho, vel, p = q[0], q[1:-1], q[-1]
    E = p / (gas.gamma - 1.0) + 0.5 * rho * np.sum(vel ** 2, axis=0)
    return np.concatenate([rho[None], rho * vel, E[None]], axis=0)


def physical_flux(w, gas: GasModel = GasModel(), axis: int = 0):
    w = np.asarray(w, dtype=float)
    m = _momentum_slot(w.shape[0], axis)
    q = cons_to_prim(w, gas)
    un = q[m]
    p = q[-1]
    f = w * un
    f[m] = f[m] + p
    f[-1] = un * (w[-1] + p)
    return f


def sound_speed(w, gas: GasModel = GasModel()):
    q = cons_to_prim(w, gas)
    return np.sqrt(gas.gamma * q[-1] / q[0])


def max_wave_speed(w, gas: GasModel = GasModel(), axis: int | None = None):
    """|u_n| + c; with ``axis=None`` the largest over all directions."""
    w = np.asarray(w, dtype=float)
    q = cons_to_prim(w, gas)
    c = np.sqrt(gas.gamma * q[-1] / q[0])
    if axis is None:
        return np.max(np.abs(q[1:-1]), axis=0) + c
    return np.abs(q[_momentum_slot(w.shape[0], axis)]) + c


# ---------------------------------------------------------------------------
# Roe solver


@njit
def roe_scalar(rl, ml, tl, el, rr, mr, tr, er, gamma, efix):
    """Roe flux for one face in the face-normal frame.

    Inputs are conservative (rho, normal momentum, tangential momentum,
    energy) on each side; pass tangential momentum 0 in 1D.  Returns the four
    flux components and a status flag (0 ok, 1 non-physical input, 2
    imaginary Roe sound speed).  ``efix`` > 0 turns on Harten-Hyman smoothing
    of the acoustic eigenvalues: the threshold is the larger of
    ``efix * (|u| + c)`` and the spread between the Roe eigenvalue and the
    one-sided ones.  ``efix = 0`` gives the raw Roe flux.
    """
    gm1 = gamma - 1.0
    if not (rl > 0.0 and rr > 0.0):
        return 0.0, 0.0, 0.0, 0.0, 1
    ul = ml / rl
    vl = tl / rl
    ur = mr / rr
    vr = tr / rr
    pl = gm1 * (el - 0.5 * rl * (ul * ul + vl * vl))
    pr = gm1 * (er - 0.5 * rr * (ur * ur + vr * vr))
    if not (pl > 0.0 and pr > 0.0):
        return 0.0, 0.0, 0.0, 0.0, 1
    hl = (el + pl) / rl
    hr = (er + pr) / rr

    sl = math.sqrt(rl)
    sr = math.sqrt(rr)
    inv = 1.0 / (sl + sr)
    u = (sl * ul + sr * ur) * inv
    v = (sl * vl + sr * vr) * inv
    h = (sl * hl + sr * hr) * inv
    q2 = 0.5 * (u * u + v * v)
    a2 = gm1 * (h - q2)
    if not (a2 > 0.0):
        return 0.0, 0.0, 0.0, 0.0, 2
    a = math.sqrt(a2)
    rho = sl * sr

    dr = rr - rl
    du = ur - ul
    dv = vr - vl
    dp = pr - pl
    a1 = (dp - rho * a * du) / (2.0 * a2)
    a2w = dr - dp / a2
    a3 = (dp + rho * a * du) / (2.0 * a2)
    a4 = rho * dv

    l1 = abs(u - a)
    l2 = abs(u)
    l3 = abs(u + a)
    if efix > 0.0:
        base = efix * (abs(u) + a)
        al = math.sqrt(gamma * pl / rl)
        ar = math.sqrt(gamma * pr / rr)
        d1 = max(base, (u - a) - (ul - al), (ur - ar) - (u - a))
        d3 = max(base, (u + a) - (ul + al), (ur + ar) - (u + a))
        if l1 < d1:
            l1 = (l1 * l1 + d1 * d1) / (2.0 * d1)
        if l3 < d3:
            l3 = (l3 * l3 + d3 * d3) / (2.0 * d3)

    c1 = l1 * a1
    c2 = l2 * a2w
    c3 = l3 * a3
    c4 = l2 * a4
    d0 = c1 + c2 + c3
    d1 = c1 * (u - a) + c2 * u + c3 * (u + a)
    d2 = (c1 + c2 + c3) * v + c4
    d3 = c1 * (h - u * a) + c2 * q2 + c3 * (h + u * a) + c4 * v

    f0 = 0.5 * (ml + mr) - 0.5 * d0
    f1 = 0.5 * (ml * ul + pl + mr * ur + pr) - 0.5 * d1
    f2 = 0.5 * (ml * vl + mr * vr) - 0.5 * d2
    f3 = 0.5 * (ul * (el + pl) + ur * (er + pr)) - 0.5 * d3
    return f0, f1, f2, f3, 0


def roe_flux_np(wl, wr, gamma, axis=0, efix=DEFAULT_ENTROPY_FIX):
    """Vectorised Roe flux; ``wl``, ``wr`` shaped (nvar, ...).  Returns (flux, status)."""
    wl = np.asarray(wl, dtype=float)
    wr = np.asarray(wr, dtype=float)
    nvar = wl.shape[0]
    m = _momentum_slot(nvar, axis)
    gm1 = gamma - 1.0
    rl, rr = wl[0], wr[0]
    ml, mr = wl[m], wr[m]
    if nvar == 4:
        t = 2 if m == 1 else 1
        tl, tr = wl[t], wr[t]
    else:
        tl = tr = np.zeros_like(rl)
    el, er = wl[-1], wr[-1]
    status = np.zeros(rl.shape, dtype=np.int64)
    with np.errstate(all="ignore"):
        ul, vl, ur, vr = ml / rl, tl / rl, mr / rr, tr / rr
        pl = gm1 * (el - 0.5 * rl * (ul * ul + vl * vl))
        pr = gm1 * (er - 0.5 * rr * (ur * ur + vr * vr))
        status[~((rl > 0) & (rr > 0) & (pl > 0) & (pr > 0))] = 1
        hl, hr = (el + pl) / rl, (er + pr) / rr
        sl, sr = np.sqrt(rl), np.sqrt(rr)
        inv = 1.0 / (sl + sr)
        u = (sl * ul + sr * ur) * inv
        v = (sl * vl + sr * vr) * inv
        h = (sl * hl + sr * hr) * inv
        q2 = 0.5 * (u * u + v * v)
        asq = gm1 * (h - q2)
        status[(status == 0) & ~(asq > 0)] = 2
        a = np.sqrt(asq)
        rho = sl * sr
        dr, du, dv, dp = rr - rl, ur - ul, vr - vl, pr - pl
        a1 = (dp - rho * a * du) / (2.0 * asq)
        a2w = dr - dp / asq
        a3 = (dp + rho * a * du) / (2.0 * asq)
        a4 = rho * dv
        l1, l2, l3 = np.abs(u - a), np.abs(u), np.abs(u + a)
        if efix > 0.0:
            base = efix * (np.abs(u) + a)
            al, ar = np.sqrt(gamma * pl / rl), np.sqrt(gamma * pr / rr)
            d1 = np.maximum(base, np.maximum((u - a) - (ul - al), (ur - ar) - (u - a)))
            d3 = np.maximum(base, np.maximum((u + a) - (ul + al), (ur + ar) - (u + a)))
            l1 = np.where(l1 < d1, (l1 * l1 + d1 * d1) / (2.0 * d1), l1)
            l3 = np.where(l3 < d3, (l3 * l3 + d3 * d3) / (2.0 * d3), l3)
        c1, c2, c3, c4 = l1 * a1, l2 * a2w, l3 * a3, l2 * a4
        d0 = c1 + c2 + c3
        d1 = c1 * (u - a) + c2 * u + c3 * (u + a)
        d2 = (c1 + c2 + c3) * v + c4
        d3 = c1 * (h - u * a) + c2 * q2 + c3 * (h + u * a) + c4 * v
        flux = np.empty_like(wl)
        flux[0] = 0.5 * (ml + mr) - 0.5 * d0
        flux[m] = 0.5 * (ml * ul + pl + mr * ur + pr) - 0.5 * d1
        if nvar == 4:
            flux[t] = 0.5 * (ml * vl + mr * vr) - 0.5 * d2
        flux[-1] = 0.5 * (ul * (el + pl) + ur * (er + pr)) - 0.5 * d3
    return flux, status


def roe_flux(wl, wr, gas: GasModel = GasModel(), axis: int = 0,
             entropy_fix: float = DEFAULT_ENTROPY_FIX):
    """Roe numerical flux between conservative states ``wl`` | ``wr``."""
    flux, status = roe_flux_np(wl, wr, gas.gamma, axis, entropy_fix)
    if np.any(status):
        idx = _first_bad(status != 0)
        raise NonPhysicalStateError(f"non-physical Riemann data at face {idx}", idx)
    return flux


def roe_matrix(wl, wr, gas: GasModel = GasModel(), axis: int = 0):
    """Roe-averaged flux Jacobian R |diag(lambda)| R^-1 without the absolute value.

    Satisfies ``roe_matrix(wl, wr) @ (wr - wl) == f(wr) - f(wl)`` and reduces
    to the exact Jacobian when ``wl == wr``.
    """
    wl = np.asarray(wl, dtype=float)
    wr = np.asarray(wr, dtype=float)
    nvar = wl.shape[0]
    m = _momentum_slot(nvar, axis)
    g = gas.gamma
    ql, qr = cons_to_prim(wl, gas), cons_to_prim(wr, gas)
    sl, sr = math.sqrt(ql[0]), math.sqrt(qr[0])
    vel = (sl * ql[1:-1] + sr * qr[1:-1]) / (sl + sr)
    hl = (wl[-1] + ql[-1]) / ql[0]
    hr = (wr[-1] + qr[-1]) / qr[0]
    h = (sl * hl + sr * hr) / (sl + sr)
    q2 = 0.5 * float(vel @ vel)
    un = vel[m - 1]
    d = nvar - 2
    J = np.zeros((nvar, nvar))
    J[0, m] = 1.0
    for a in range(d):
        row = 1 + a
        J[row, 0] = -vel[a] * un + (g - 1.0) * q2 * (row == m)
        for b in range(d):
            col = 1 + b
            J[row, col] = un * (a == b) + vel[a] * (m == col) - (g - 1.0) * vel[b] * (row == m)
        J[row, -1] = (g - 1.0) * (row == m)
    J[-1, 0] = un * ((g - 1.0) * q2 - h)
    for b in range(d):
        J[-1, 1 + b] = h * ((1 + b) == m) - (g - 1.0) * vel[b] * un
    J[-1, -1] = g * un
    return J
