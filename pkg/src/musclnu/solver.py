"""MUSCL finite-volume solver for the Euler equations on tensor-product grids.

The semi-discretisation is unsplit: x- and y-flux differences are summed
into one residual and fed to TVD RK2.  Each axis is processed as a batch
of grid lines; lines that share an active segment and boundary treatment
form a group whose padded geometry and limiter parameters are computed
once at setup.

1D fields are stored as (3, N), 2D fields as (4, nx, ny).
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .euler import DEFAULT_ENTROPY_FIX, GasModel, NonPhysicalStateError, cons_to_prim, prim_to_cons
from .kernels import muscl_roe_lines
from .limiters import CONVENTIONAL, NONE, LimiterSpec, conventional_params, family_k_array
from .mesh import Grid1D, Grid2D, make_grid, make_grid_2d, params_from_padded_sizes
from .problems import (DirichletExact, NeumannOutflow, Periodic, ProblemSpec, ReflectiveWall,
                       SplitBC, SupersonicInflow)

log = logging.getLogger(__name__)

PERIODIC, WALL, NEUMANN, FIXED = 0, 1, 2, 3

_SIDES = (("x_lo", "x_hi"), ("y_lo", "y_hi"))


class SolverError(RuntimeError):
    pass


def _bc_code(bc) -> int:
    if isinstance(bc, Periodic):
        return PERIODIC
    if isinstance(bc, ReflectiveWall):
        return WALL
    if isinstance(bc, NeumannOutflow):
        return NEUMANN
    if isinstance(bc, (SupersonicInflow, DirichletExact)):
        return FIXED
    raise SolverError(f"unsupported boundary condition {bc!r}")


_WALL = ReflectiveWall()


@dataclass
class Field:
    grid: object                         # Grid1D or Grid2D
    values: np.ndarray                   # conservative variables
    t: float = 0.0
    mask: Optional[np.ndarray] = None    # True = active

    @property
    def dim(self) -> int:
        return 1 if isinstance(self.grid, Grid1D) else 2

    def active(self) -> np.ndarray:
        shape = self.values.shape[1:]
        return np.ones(shape, dtype=bool) if self.mask is None else self.mask

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.t, self.mask)


@dataclass(frozen=True)
class TimeControls:
    cfl: float = 0.6
    t_end: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise SolverError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.t_end < 0:
            raise SolverError("t_end must be non-negative")


@dataclass
class _Group:
    axis: int
    lo: int
    hi: int
    codes: tuple
    leaves: tuple
    lines: object            # slice or index array across the axis
    coords: np.ndarray       # across-axis coordinates of the lines
    dx: np.ndarray           # active sizes along the axis
    pA: np.ndarray
    pB: np.ndarray
    pk: np.ndarray
    n_lines: int


def _segments(active_line):
    """[lo, hi) runs of True in a boolean vector."""
    a = np.concatenate([[False], active_line, [False]]).astype(np.int8)
    d = np.diff(a)
    return list(zip(np.nonzero(d == 1)[0], np.nonzero(d == -1)[0]))


def _padded_sizes(dx_axis, lo, hi, codes):
    seg = dx_axis[lo:hi]
    pdx = np.empty(seg.size + 4)
    pdx[2:-2] = seg
    second_lo = seg[1] if seg.size > 1 else seg[0]
    second_hi = seg[-2] if seg.size > 1 else seg[-1]
    if codes[0] == PERIODIC:
        pdx[0], pdx[1] = dx_axis[hi - 2], dx_axis[hi - 1]
    elif codes[0] == WALL:
        pdx[0], pdx[1] = second_lo, seg[0]
    else:
        pdx[0] = pdx[1] = seg[0]
    if codes[1] == PERIODIC:
        pdx[-2], pdx[-1] = dx_axis[lo], dx_axis[lo + 1]
    elif codes[1] == WALL:
        pdx[-2], pdx[-1] = seg[-1], second_hi
    else:
        pdx[-2] = pdx[-1] = seg[-1]
    return pdx


class Scheme:
    """Spatial operator: ghost filling, reconstruction, Roe fluxes, residual."""

    def __init__(self, grid, bcs: dict, gas: GasModel = GasModel(),
                 spec: Optional[LimiterSpec] = None, mask=None,
                 entropy_fix: float = DEFAULT_ENTROPY_FIX, limit_vars: str = "conservative",
                 backend: Optional[str] = None):
        if limit_vars not in ("conservative", "primitive"):
            raise SolverError(f"limit_vars must be conservative|primitive, got {limit_vars!r}")
        self.grid = grid
        self.dim = 1 if isinstance(grid, Grid1D) else 2
        self.axes = [grid] if self.dim == 1 else [grid.x_axis, grid.y_axis]
        self.nvar = 3 if self.dim == 1 else 4
        self.shape = (grid.n, 1) if self.dim == 1 else grid.shape
        self.gas = gas
        self.spec = spec
        self.kind = NONE if spec is None else spec.kind
        self.entropy_fix = float(entropy_fix)
        self.prim = limit_vars == "primitive"
        self.backend = backend
        if mask is None:
            mask = np.ones(self.shape, dtype=bool)
        self.mask = np.asarray(mask, dtype=bool).reshape(self.shape)
        for side in [s for pair in _SIDES[:self.dim] for s in pair]:
            if side not in bcs:
                raise SolverError(f"missing boundary condition for side {side}")
        self.bcs = bcs
        self.groups = [g for a in range(self.dim) for g in self._build_groups(a)]

    # -- setup -------------------------------------------------------------

    def _leaf(self, side, s):
        bc = self.bcs[side]
        return bc.leaf(s) if isinstance(bc, SplitBC) else bc

    def _build_groups(self, axis):
        along = self.axes[axis]
        across = self.axes[1 - axis].centers if self.dim == 2 else np.zeros(1)
        mask = self.mask if axis == 0 else self.mask.T      # (along, across)
        M = along.n
        lo_side, hi_side = _SIDES[axis]
        buckets: dict = {}
        for j in range(mask.shape[1]):
            s = across[j]
            for lo, hi in _segments(mask[:, j]):
                leaf_lo = self._leaf(lo_side, s) if lo == 0 else _WALL
                leaf_hi = self._leaf(hi_side, s) if hi == M else _WALL
                codes = (_bc_code(leaf_lo), _bc_code(leaf_hi))
                if PERIODIC in codes and not (codes == (PERIODIC, PERIODIC) and lo == 0 and hi == M):
                    raise SolverError("periodic boundaries need periodic on both sides and no blanking")
                if hi - lo < 2:
                    raise SolverError(f"active segment of one cell on line {j} (axis {axis})")
                key = (lo, hi, codes, id(leaf_lo), id(leaf_hi))
                buckets.setdefault(key, (leaf_lo, leaf_hi, []))[2].append(j)
        groups = []
        for (lo, hi, codes, _, _), (leaf_lo, leaf_hi, js) in buckets.items():
            js = np.asarray(js)
            lines = slice(js[0], js[-1] + 1) if np.all(np.diff(js) == 1) else js
            pdx = _padded_sizes(along.sizes, lo, hi, codes)
            pA, pB, pk = self._limiter_params(pdx)
            groups.append(_Group(axis, int(lo), int(hi), codes, (leaf_lo, leaf_hi), lines,
                                 across[js], along.sizes[lo:hi].copy(), pA, pB, pk, js.size))
        return groups

    def _limiter_params(self, pdx):
        n = pdx.size
        if self.spec is None or self.kind == NONE:
            return np.ones(n), np.ones(n), np.ones(n, dtype=np.int64)
        if self.spec.flavor == CONVENTIONAL:
            k = conventional_params(self.kind).k
            return np.ones(n), np.ones(n), np.full(n, k, dtype=np.int64)
        A, B = params_from_padded_sizes(pdx)
        return A, B, family_k_array(self.kind, A, B)

    # -- spatial operator ----------------------------------------------------

    def _view3(self, U):
        return U[:, :, None] if self.dim == 1 else U

    def _take(self, U3, g):
        if g.axis == 0:
            return U3[:, g.lo:g.hi, g.lines]
        return U3[:, g.lines, g.lo:g.hi].transpose(0, 2, 1)

    def _ghost_cons(self, leaf, t, coords):
        return prim_to_cons(leaf.ghost_prim(t, coords), self.gas)

    def padded_lines(self, U, g: _Group, t: float) -> np.ndarray:
        """Active segment of a group's lines with two ghost cells per end."""
        seg = self._take(self._view3(U), g)
        nv, n, L = seg.shape
        W = np.empty((nv, n + 4, L))
        W[:, 2:-2] = seg
        m = 1 + g.axis
        code_lo, code_hi = g.codes
        if code_lo == PERIODIC:
            W[:, 0:2] = seg[:, -2:]
            W[:, -2:] = seg[:, 0:2]
        else:
            if code_lo == WALL:
                W[:, 1], W[:, 0] = seg[:, 0], seg[:, 1]
                W[m, 0:2] *= -1.0
            elif code_lo == NEUMANN:
                W[:, 0] = W[:, 1] = seg[:, 0]
            else:
                W[:, 0] = W[:, 1] = self._ghost_cons(g.leaves[0], t, g.coords)
            if code_hi == WALL:
                W[:, -2], W[:, -1] = seg[:, -1], seg[:, -2]
                W[m, -2:] *= -1.0
            elif code_hi == NEUMANN:
                W[:, -2] = W[:, -1] = seg[:, -1]
            else:
                W[:, -2] = W[:, -1] = self._ghost_cons(g.leaves[1], t, g.coords)
        return W

    def reconstruct_faces(self, U, t: float = 0.0, axis: int = 0):
        """Left/right face states per group along ``axis``: list of (group, SL, SR)."""
        from .kernels import reconstruct_np
        out = []
        for g in self.groups:
            if g.axis != axis:
                continue
            W = self.padded_lines(U, g, t)
            SL, SR = reconstruct_np(W, g.pA, g.pB, g.pk, self.kind, 1 + axis, self.gas.gamma, self.prim)
            out.append((g, SL, SR))
        return out

    def residual(self, U, t: float = 0.0) -> np.ndarray:
        """dU/dt on active cells (zero on blanked cells)."""
        dU3 = np.zeros((self.nvar,) + self.shape)
        for g in self.groups:
            W = self.padded_lines(U, g, t)
            F, status, where = muscl_roe_lines(W, g.pA, g.pB, g.pk, self.kind, 1 + g.axis,
                                               self.gas.gamma, self.entropy_fix, self.prim,
                                               backend=self.backend)
            if np.any(status):
                l = int(np.argmax(status != 0))
                self._raise_face(g, l, int(where[l]), int(status[l]))
            div = (F[:, 1:] - F[:, :-1]) / g.dx[None, :, None]
            if g.axis == 0:
                dU3[:, g.lo:g.hi, g.lines] -= div
            else:
                dU3[:, g.lines, g.lo:g.hi] -= div.transpose(0, 2, 1)
        return dU3[:, :, 0] if self.dim == 1 else dU3

    def _raise_face(self, g, l, f, st):
        j = (np.arange(self.shape[1 - g.axis])[g.lines] if isinstance(g.lines, slice) else g.lines)[l]
        i = g.lo + max(f - 1, 0)
        idx = (i,) if self.dim == 1 else ((i, int(j)) if g.axis == 0 else (int(j), i))
        what = "non-physical reconstructed state" if st == 1 else "imaginary Roe sound speed"
        raise NonPhysicalStateError(f"{what} at face {f} of segment starting at cell {idx}", idx)

    # -- time stepping -------------------------------------------------------

    def check_physical(self, U):
        active = self.mask[:, 0] if self.dim == 1 else self.mask
        try:
            cons_to_prim(U[:, active], self.gas)     # blanked cells are never read
        except NonPhysicalStateError as exc:
            idx = tuple(int(v) for v in np.argwhere(active)[exc.index[0]])
            raise NonPhysicalStateError(str(exc).replace(str(exc.index), str(idx)), idx) from None

    def stable_dt(self, U, cfl: float) -> float:
        q = cons_to_prim(U, self.gas)
        c = np.sqrt(self.gas.gamma * q[-1] / q[0])
        active = self.mask[:, 0] if self.dim == 1 else self.mask
        if self.dim == 1:
            s = (np.abs(q[1]) + c)[active].max()
            return cfl * self.grid.reference_size / s
        sx = (np.abs(q[1]) + c) / self.grid.x_axis.reference_size
        sy = (np.abs(q[2]) + c) / self.grid.y_axis.reference_size
        return cfl / (sx + sy)[active].max()

    def advance_tvd_rk2(self, U, t: float, dt: float) -> np.ndarray:
        U1 = U + dt * self.residual(U, t)
        self.check_physical(U1)
        U2 = 0.5 * U + 0.5 * (U1 + dt * self.residual(U1, t + dt))
        self.check_physical(U2)
        return U2


# ---------------------------------------------------------------------------
# driver


def build_grid(problem: ProblemSpec, n, r: float = 0.0, seed: int = 0):
    n = tuple(int(v) for v in np.atleast_1d(n))
    if problem.dim == 1:
        return make_grid(problem.extent_x[0], problem.extent_x[1], n[0], r, seed)
    if len(n) != 2:
        raise SolverError(f"problem {problem.name} is 2D; give nx and ny")
    return make_grid_2d(problem.extent_x, problem.extent_y, n[0], n[1], r, seed)


def initial_field(problem: ProblemSpec, grid) -> Field:
    if problem.dim == 1:
        q = problem.ic(grid.centers)
        mask = None
    else:
        X, Y = grid.centers()
        q = problem.ic(X, Y)
        mask = None if problem.mask is None else np.asarray(problem.mask(X, Y), dtype=bool)
    return Field(grid, prim_to_cons(q, problem.gas), 0.0, mask)


def density_tv(field: Field) -> float:
    rho = field.values[0]
    if field.dim == 1:
        return float(np.abs(np.diff(rho)).sum())
    act = field.active()
    tv = 0.0
    for ax in (0, 1):
        both = np.logical_and(np.take(act, range(1, act.shape[ax]), axis=ax),
                              np.take(act, range(act.shape[ax] - 1), axis=ax))
        tv += float(np.abs(np.diff(rho, axis=ax))[both].sum())
    return tv


@dataclass
class RunResult:
    field: Field
    steps: int
    history: list = field(default_factory=list)     # dicts with DIAG_COLUMNS keys
    dumps: list = field(default_factory=list)


DIAG_COLUMNS = ("step", "t", "dt", "tv_rho", "min_rho", "min_p")


def _diag_row(step, t, dt, fld: Field, gas):
    q = cons_to_prim(fld.values, gas, check=False)
    act = fld.active()
    return {"step": step, "t": t, "dt": dt, "tv_rho": density_tv(fld),
            "min_rho": float(q[0][act].min()), "min_p": float(q[-1][act].min())}


def dump_field(fld: Field, gas: GasModel, path) -> Path:
    """CSV of active cells: x[,y],rho,u[,v],p,e."""
    path = Path(path)
    q = cons_to_prim(fld.values, gas, check=False)
    e = q[-1] / ((gas.gamma - 1.0) * q[0])
    act = fld.active()
    if fld.dim == 1:
        cols = [fld.grid.centers, q[0], q[1], q[2], e]
        header = ["x", "rho", "u", "p", "e"]
    else:
        X, Y = fld.grid.centers()
        cols = [X[act], Y[act], q[0][act], q[1][act], q[2][act], q[3][act], e[act]]
        header = ["x", "y", "rho", "u", "v", "p", "e"]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(zip(*[np.asarray(c).ravel().tolist() for c in cols]))
    return path


def write_diagnostics(history, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=DIAG_COLUMNS)
        w.writeheader()
        w.writerows(history)


def time_label(t: float) -> str:
    return f"t{t:.6g}"


def run(problem: ProblemSpec, spec: Optional[LimiterSpec], controls: TimeControls, grid=None,
        *, n=None, r: float = 0.0, seed: int = 0, entropy_fix: float = DEFAULT_ENTROPY_FIX,
        limit_vars: Optional[str] = None, output_times=(), out_dir=None,
        backend: Optional[str] = None, callback: Optional[Callable] = None,
        max_steps: int = 10_000_000) -> RunResult:
    """Integrate ``problem`` to ``controls.t_end``.

    Either pass ``grid`` or the recipe ``n``/``r``/``seed``.  Fields are dumped
    to ``out_dir/t<time>.csv`` at each of ``output_times`` (and at t_end when
    ``out_dir`` is set).  ``callback(step, field)`` runs after every step.
    """
    if grid is None:
        grid = build_grid(problem, n if n is not None else problem.default_n, r, seed)
    fld = initial_field(problem, grid)
    limit_vars = limit_vars or problem.limit_vars
    scheme = Scheme(grid, problem.bcs, problem.gas, spec, fld.mask, entropy_fix, limit_vars, backend)
    scheme.check_physical(fld.values)

    t_end = controls.t_end
    targets = sorted({float(t) for t in output_times if 0.0 <= t <= t_end} | {t_end})
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    result = RunResult(fld, 0)
    result.history.append(_diag_row(0, 0.0, 0.0, fld, problem.gas))

    def maybe_dump(t):
        while targets and t >= targets[0]:
            if out is not None:
                result.dumps.append(dump_field(fld, problem.gas, out / f"{time_label(targets[0])}.csv"))
            targets.pop(0)

    maybe_dump(0.0)
    t, step = 0.0, 0
    while t < t_end:
        if step >= max_steps:
            raise SolverError(f"step limit {max_steps} reached at t={t}")
        dt = scheme.stable_dt(fld.values, controls.cfl)
        next_stop = targets[0]
        last = t + dt >= next_stop
        if last:
            dt = next_stop - t
        try:
            fld.values = scheme.advance_tvd_rk2(fld.values, t, dt)
        except NonPhysicalStateError as exc:
            raise NonPhysicalStateError(f"step {step + 1}, t={t:.6g}: {exc}", exc.index) from exc
        t = next_stop if last else t + dt
        step += 1
        fld.t = t
        result.history.append(_diag_row(step, t, dt, fld, problem.gas))
        if callback is not None:
            callback(step, fld)
        maybe_dump(t)
    result.steps = step
    if out is not None:
        write_diagnostics(result.history, out / "diagnostics.csv")
    log.debug("%s finished: %d steps", problem.name, step)
    return result
