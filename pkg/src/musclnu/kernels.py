"""Fused MUSCL reconstruction + Roe flux over a batch of grid lines.

Input ``W`` has shape (nvar, n + 4, L): L lines of n active cells, each
padded with two ghost cells per end.  The slope in padded cell p is
sigma_p = phi_p(theta_p) (w[p+1] - w[p]) / dx_p, so the half-cell jump
sigma_p dx_p / 2 needs only phi and never the cell size itself.

Returned fluxes have shape (nvar, n + 1, L) for the n+1 faces of the
active segment, plus a per-line status (0 ok, 1 non-physical face state,
2 imaginary Roe sound speed) and the first failing face.
"""
from __future__ import annotations

import numpy as np

from ._backend import USE_NUMBA, njit
from .euler import roe_flux_np, roe_scalar
from .limiters import NONE, _phi_array_np, phi_scalar


@njit
def _to_prim_line(W, l, m, t, gm1, V):
    nvar, Mp = W.shape[0], W.shape[1]
    for p in range(Mp):
        r = W[0, p, l]
        un = W[m, p, l] / r
        ut = W[t, p, l] / r if nvar == 4 else 0.0
        V[0, p] = r
        V[m, p] = un
        if nvar == 4:
            V[t, p] = ut
        V[nvar - 1, p] = gm1 * (W[nvar - 1, p, l] - 0.5 * r * (un * un + ut * ut))


@njit
def _to_cons_col(S, f, m, t, gm1):
    nvar = S.shape[0]
    r = S[0, f]
    un = S[m, f]
    ut = S[t, f] if nvar == 4 else 0.0
    S[m, f] = r * un
    if nvar == 4:
        S[t, f] = r * ut
    S[nvar - 1, f] = S[nvar - 1, f] / gm1 + 0.5 * r * (un * un + ut * ut)


@njit
def muscl_roe_lines_nb(W, pA, pB, pk, kind, m, gamma, efix, prim):
    nvar, Mp, L = W.shape
    nf = Mp - 3
    t = 3 - m if nvar == 4 else 0
    gm1 = gamma - 1.0
    F = np.empty((nvar, nf, L))
    status = np.zeros(L, dtype=np.int64)
    where = np.full(L, -1, dtype=np.int64)
    V = np.empty((nvar, Mp))
    SL = np.empty((nvar, nf))
    SR = np.empty((nvar, nf))
    for l in range(L):
        if prim:
            _to_prim_line(W, l, m, t, gm1, V)
        else:
            for v in range(nvar):
                for p in range(Mp):
                    V[v, p] = W[v, p, l]
        for v in range(nvar):
            for p in range(1, Mp - 1):
                dp = V[v, p + 1] - V[v, p]
                half = 0.0
                if kind != NONE and dp != 0.0:
                    dm = V[v, p] - V[v, p - 1]
                    half = 0.5 * phi_scalar(kind, dm / dp, pA[p], pB[p], pk[p]) * dp
                if p <= nf:
                    SL[v, p - 1] = V[v, p] + half
                if p >= 2:
                    SR[v, p - 2] = V[v, p] - half
        if prim:
            for f in range(nf):
                _to_cons_col(SL, f, m, t, gm1)
                _to_cons_col(SR, f, m, t, gm1)
        for f in range(nf):
            tl = SL[t, f] if nvar == 4 else 0.0
            tr = SR[t, f] if nvar == 4 else 0.0
            f0, f1, f2, f3, st = roe_scalar(SL[0, f], SL[m, f], tl, SL[nvar - 1, f],
                                            SR[0, f], SR[m, f], tr, SR[nvar - 1, f],
                                            gamma, efix)
            if st != 0 and status[l] == 0:
                status[l] = st
                where[l] = f
            F[0, f, l] = f0
            F[m, f, l] = f1
            if nvar == 4:
                F[t, f, l] = f2
            F[nvar - 1, f, l] = f3
    return F, status, where


def _prim_np(W, m):
    """Conservative -> primitive with the normal/tangential slots kept in place."""
    V = W.copy()
    V[1:-1] = W[1:-1] / W[0]
    return V


def reconstruct_np(W, pA, pB, pk, kind, m=1, gamma=1.4, prim=False):
    """Left/right face states (nvar, n+1, L) from a padded batch of lines."""
    gm1 = gamma - 1.0
    if prim:
        V = _prim_np(W, m)
        V[-1] = gm1 * (W[-1] - 0.5 * np.sum(W[1:-1] * V[1:-1], axis=0))
    else:
        V = W
    d = np.diff(V, axis=1)                     # d[:, j] = V[j+1] - V[j]
    dm, dp = d[:, :-1], d[:, 1:]               # for padded cells 1..Mp-2
    if kind == NONE:
        half = np.zeros_like(dp)
    else:
        nz = dp != 0.0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            theta = np.where(nz, dm / np.where(nz, dp, 1.0), 0.0)
        shape = (1, -1, 1)
        phi = _phi_array_np(kind, theta, pA[1:-1].reshape(shape), pB[1:-1].reshape(shape),
                            pk[1:-1].reshape(shape))
        half = 0.5 * phi * dp
    core = V[:, 1:-1]
    SL = (core + half)[:, :-1]
    SR = (core - half)[:, 1:]
    if prim:
        out = []
        for S in (SL, SR):
            C = S.copy()
            C[1:-1] = S[0] * S[1:-1]
            C[-1] = S[-1] / gm1 + 0.5 * S[0] * np.sum(S[1:-1] ** 2, axis=0)
            out.append(C)
        SL, SR = out
    return SL, SR


def muscl_roe_lines_np(W, pA, pB, pk, kind, m, gamma, efix, prim):
    SL, SR = reconstruct_np(W, pA, pB, pk, kind, m, gamma, prim)
    F, st = roe_flux_np(SL, SR, gamma, axis=m - 1, efix=efix)
    bad = st != 0
    L = W.shape[2]
    status = np.zeros(L, dtype=np.int64)
    where = np.full(L, -1, dtype=np.int64)
    if np.any(bad):
        any_bad = bad.any(axis=0)
        first = np.argmax(bad, axis=0)
        status[any_bad] = st[first[any_bad], np.nonzero(any_bad)[0]]
        where[any_bad] = first[any_bad]
    return F, status, where


def muscl_roe_lines(W, pA, pB, pk, kind, m, gamma, efix, prim, backend=None):
    """Dispatch to the numba or numpy kernel (``backend`` overrides the env flag)."""
    use_nb = USE_NUMBA if backend is None else backend == "numba"
    if use_nb:
        return muscl_roe_lines_nb(np.ascontiguousarray(W), pA, pB, pk, int(kind), int(m),
                                  float(gamma), float(efix), bool(prim))
    return muscl_roe_lines_np(W, pA, pB, pk, int(kind), int(m), float(gamma), float(efix),
                              bool(prim))
