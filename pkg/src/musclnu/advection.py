"""Scalar linear advection u_t + c u_x = 0 by exact reconstruct-evolve-project.

Everything here is periodic and small; it serves as an oracle for the
limiters (TVD, symmetry, linearity) rather than as a production solver.
The Harten coefficients use the convention

    c > 0:  u_i^{n+1} = u_i - C[i] (u_i - u_{i-1})
    c < 0:  u_i^{n+1} = u_i + D[i] (u_{i+1} - u_i)

so ``C[i]`` multiplies the backward difference into cell i (often written C_{i-1})
and ``D[i]`` the forward one.  Face arrays
(``flux_limiter``, ``B_face``) are indexed by the left cell: entry i is
face i+1/2, with the last one being the periodic wrap face.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .limiters import CONVENTIONAL, NONE, LimiterSpec, conventional_params, family_k_array, phi_array
from .mesh import Grid1D, cell_params, make_grid
from .rng import derive_seed


class RepError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RepState:
    grid: Grid1D
    u: np.ndarray
    c: float
    dt: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.shape != (self.grid.n,):
            raise RepError(f"u has shape {u.shape}, grid has {self.grid.n} cells")
        if self.dt < 0:
            raise RepError("dt must be non-negative")
        object.__setattr__(self, "u", u)

    @property
    def lam(self) -> np.ndarray:
        return abs(self.c) * self.dt / self.grid.sizes


@dataclass
class RepDiagnostics:
    C: np.ndarray
    D: np.ndarray
    tv_before: float
    tv_after: float
    flux_limiter: np.ndarray
    B_face: np.ndarray


PhiLike = Union[LimiterSpec, str, Callable, None]


def total_variation(u, periodic: bool = True) -> float:
    u = np.asarray(u, dtype=float)
    tv = float(np.abs(np.diff(u)).sum())
    if periodic and u.size > 1:
        tv += abs(float(u[0] - u[-1]))
    return tv


def _neighbour_sizes(dx):
    return np.roll(dx, 1), dx, np.roll(dx, -1)


def limiter_values(state: RepState, spec: PhiLike):
    """(phi, dplus) per cell on the periodic grid.

    ``spec`` may be a LimiterSpec, a name like ``"van_leer:enhanced"``, a
    plain callable ``phi(theta)`` applied in every cell, or None (phi = 0).
    """
    u = state.u
    dplus = np.roll(u, -1) - u
    dminus = u - np.roll(u, 1)
    nz = dplus != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(nz, dminus / np.where(nz, dplus, 1.0), 0.0)
    if spec is None:
        return np.zeros_like(u), dplus
    if callable(spec) and not isinstance(spec, LimiterSpec):
        phi = np.asarray(spec(theta), dtype=float) * np.ones_like(theta)
    else:
        if isinstance(spec, str):
            spec = LimiterSpec.parse(spec)
        if spec.kind == NONE:
            return np.zeros_like(u), dplus
        if spec.flavor == CONVENTIONAL:
            p = conventional_params(spec.kind)
            A, B, k = p.A, p.B, p.k
        else:
            A, B = cell_params(*_neighbour_sizes(state.grid.sizes))
            k = family_k_array(spec.kind, A, B)
        phi = phi_array(spec.kind, theta, A, B, k)
    phi = np.where(nz, phi, 0.0)
    return phi, dplus


def limited_slopes(state: RepState, spec: PhiLike) -> np.ndarray:
    """sigma_i = phi_i(theta_i) (u_{i+1} - u_i) / dx_i, zero on flat data."""
    phi, dplus = limiter_values(state, spec)
    return phi * dplus / state.grid.sizes


def _check_lambda(lam):
    # a unit Courant number computed as |c| dt / dx can land an ulp above 1
    bad = (lam < 0.0) | (lam > 1.0 + 1e-12) | ~np.isfinite(lam)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise RepError(f"Courant number {lam[i]!r} at cell {i} is outside [0, 1]")


def face_coefficient_B(grid: Grid1D, i: int, sign_of_c: int) -> float:
    """B at face i+1/2 (periodic indexing)."""
    dx = grid.sizes
    n = dx.size
    if sign_of_c >= 0:
        a, b = dx[i % n], dx[(i + 1) % n]
    else:
        a, b = dx[(i + 1) % n], dx[(i + 2) % n]
    return 2.0 * a / (a + b)


def face_B_array(grid: Grid1D, sign_of_c: int) -> np.ndarray:
    dx = grid.sizes
    if sign_of_c >= 0:
        return 2.0 * dx / (dx + np.roll(dx, -1))
    nxt = np.roll(dx, -1)
    return 2.0 * nxt / (nxt + np.roll(dx, -2))


def equivalent_flux_limiter(grid: Grid1D, phi_value: float, i: int, sign_of_c: int) -> float:
    """Flux limiter at face i+1/2 that reproduces the slope limiter ``phi_value``.

    ``phi_value`` belongs to the upwind cell: i for c > 0, i+1 for c < 0.
    """
    return float(phi_value) / face_coefficient_B(grid, i, sign_of_c)


def rep_step(state: RepState, sigma) -> tuple[np.ndarray, RepDiagnostics]:
    """One exact REP step from the limited slopes ``sigma``."""
    u = state.u
    n = u.size
    dx = state.grid.sizes
    lam = state.lam
    _check_lambda(lam)
    sigma = np.asarray(sigma, dtype=float)
    zeros = np.zeros(n)
    tv0 = total_variation(u)
    if state.c == 0.0 or state.dt == 0.0:
        diag = RepDiagnostics(zeros, zeros.copy(), tv0, tv0, zeros.copy(), face_B_array(state.grid, 1))
        return u.copy(), diag

    jump = sigma * dx                      # phi_i * (u_{i+1} - u_i)
    dplus = np.roll(u, -1) - u
    dminus = np.roll(dplus, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(dplus != 0.0, jump / np.where(dplus != 0.0, dplus, 1.0), 0.0)
        # phi_i / theta_i, i.e. phi_i dplus_i / dminus_i
        phi_over_theta = np.where(dminus != 0.0, jump / np.where(dminus != 0.0, dminus, 1.0), 0.0)

    C = zeros.copy()
    D = zeros.copy()
    if state.c > 0:
        lm = np.roll(lam, 1)
        jm = np.roll(jump, 1)
        u_next = u - lam * dminus - 0.5 * lam * ((1.0 - lam) * jump - (1.0 - lm) * jm)
        C = lam + 0.5 * lam * (1.0 - lam) * phi_over_theta - 0.5 * lam * (1.0 - lm) * np.roll(phi, 1)
        sign = 1
        face_phi = phi
    else:
        lp = np.roll(lam, -1)
        jp = np.roll(jump, -1)
        u_next = u + lam * dplus + 0.5 * lam * ((1.0 - lam) * jump - (1.0 - lp) * jp)
        D = lam + 0.5 * lam * (1.0 - lam) * phi - 0.5 * lam * (1.0 - lp) * np.roll(phi_over_theta, -1)
        sign = -1
        face_phi = np.roll(phi, -1)
    B_face = face_B_array(state.grid, sign)
    diag = RepDiagnostics(C, D, tv0, total_variation(u_next), face_phi / B_face, B_face)
    return u_next, diag


def flux_form_step(state: RepState, phi) -> np.ndarray:
    """The same update written as F^L + flux_limiter (F^H - F^L) per face."""
    u = state.u
    dx = state.grid.sizes
    lam = state.lam
    _check_lambda(lam)
    c = state.c
    if c == 0.0 or state.dt == 0.0:
        return u.copy()
    phi = np.asarray(phi, dtype=float)
    dplus = np.roll(u, -1) - u
    if c > 0:
        B = face_B_array(state.grid, 1)
        f_low = c * u
        f_high = c * (u + 0.5 * (1.0 - lam) * B * dplus)
        lim = phi / B
    else:
        B = face_B_array(state.grid, -1)
        up, lp, dp = np.roll(u, -1), np.roll(lam, -1), np.roll(dplus, -1)
        f_low = c * up
        f_high = c * (up - 0.5 * (1.0 - lp) * B * dp)
        lim = np.roll(phi, -1) / B
    F = f_low + lim * (f_high - f_low)     # F[i] is the flux at face i+1/2
    return u - state.dt / dx * (F - np.roll(F, 1))


def symmetry_pair_check(state: RepState, spec: PhiLike) -> float:
    """max |u^{n+1} - mirror(v^{n+1})| for the mirrored problem (sizes/data reversed, -c)."""
    mirrored = RepState(state.grid.reversed(), state.u[::-1].copy(), -state.c, state.dt)
    u_next, _ = rep_step(state, limited_slopes(state, spec))
    v_next, _ = rep_step(mirrored, limited_slopes(mirrored, spec))
    return float(np.max(np.abs(u_next - v_next[::-1])))


def linear_cell_averages(grid: Grid1D, slope: float, offset: float, shift: float = 0.0):
    """Cell averages of x -> offset + slope (x - shift)."""
    return offset + slope * (grid.centers - shift)


# ---------------------------------------------------------------------------
# randomized trials (used by the CLI and the tests)


@dataclass
class TrialResult:
    trial: int
    seed: int
    kind: str
    c: float
    tv_before: float
    tv_after: float
    defect: float
    coef_min: float
    coef_max: float


def random_state(rng: np.random.Generator, seed: int, n_min=6, n_max=40, r_max=0.45) -> RepState:
    n = int(rng.integers(n_min, n_max + 1))
    r = float(rng.uniform(0.0, r_max))
    grid = make_grid(0.0, 1.0, n, r, seed)
    style = rng.integers(3)
    if style == 0:
        u = rng.normal(size=n)
    elif style == 1:           # piecewise constant with a few jumps
        u = np.repeat(rng.normal(size=4), -(-n // 4))[:n]
    else:                      # smooth plus noise
        u = np.sin(2 * np.pi * grid.centers + rng.uniform(0, 6)) + 0.1 * rng.normal(size=n)
    c = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 3.0))
    lam_max = float(rng.uniform(0.0, 1.0))
    dt = lam_max * grid.sizes.min() / abs(c)
    return RepState(grid, u, c, dt)


def run_trials(n_trials: int, seed: int, specs) -> list[TrialResult]:
    """TVD / Harten / symmetry checks for each trial and each limiter spec."""
    out = []
    for t in range(n_trials):
        tseed = derive_seed(seed, t)
        rng = np.random.default_rng(tseed)
        state = random_state(rng, tseed)
        for spec in specs:
            u_next, diag = rep_step(state, limited_slopes(state, spec))
            coef = diag.C if state.c > 0 else diag.D
            out.append(TrialResult(t, tseed, str(spec), state.c, diag.tv_before, diag.tv_after,
                                   symmetry_pair_check(state, spec),
                                   float(coef.min()), float(coef.max())))
    return out
