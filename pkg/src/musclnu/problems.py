"""Benchmark problem definitions (domain, IC, boundaries, terminal time)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .euler import GasModel

# ---------------------------------------------------------------------------
# boundary conditions


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class ReflectiveWall:
    pass


@dataclass(frozen=True)
class NeumannOutflow:
    """Zero normal gradient: ghost cells copy the boundary cell."""


@dataclass(frozen=True)
class SupersonicInflow:
    """Fixed primitive state in both ghost layers."""

    state: tuple

    def ghost_prim(self, t, s):
        return np.repeat(np.asarray(self.state, dtype=float)[:, None], np.size(s), axis=1)


@dataclass(frozen=True)
class DirichletExact:
    """Time-dependent primitive state ``fn(t, s) -> (nvar, len(s))``.

    ``s`` holds the boundary cells' coordinates along the boundary.
    """

    fn: Callable

    def ghost_prim(self, t, s):
        return np.asarray(self.fn(t, np.asarray(s, dtype=float)), dtype=float)


@dataclass(frozen=True)
class SplitBC:
    """``before`` where the along-boundary coordinate is < ``at``, else ``after``."""

    at: float
    before: object
    after: object

    def leaf(self, s):
        return self.before if s < self.at else self.after


SIDES_1D = ("x_lo", "x_hi")
SIDES_2D = ("x_lo", "x_hi", "y_lo", "y_hi")

# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    dim: int
    extent_x: tuple
    ic: Callable
    bcs: dict
    t_end: float
    extent_y: Optional[tuple] = None
    gas: GasModel = field(default_factory=GasModel)
    mask: Optional[Callable] = None          # (x, y) -> True where the cell is active
    reference: str = "none"                  # "analytic-period" | "fine-grid" | "none"
    exact: Optional[Callable] = None
    default_n: tuple = (200,)
    description: str = ""
    # variables the slopes are limited in unless the caller overrides it
    limit_vars: str = "conservative"

    def with_t_end(self, t_end: float) -> "ProblemSpec":
        from dataclasses import replace
        return replace(self, t_end=float(t_end))


GAMMA = 1.4

# pre-shock time used for convergence studies of the smooth 1D problem
SMOOTH1D_RATE_T = 0.3


def _smooth1d_ic(x):
    s = np.sin(np.pi * np.asarray(x, dtype=float))
    return np.array([1.0 + 0.5 * s, 2.0 + 0.5 * s, 1.0 + 0.5 * s])


def smooth_euler_1d(t_end: float = SMOOTH1D_RATE_T) -> ProblemSpec:
    return ProblemSpec(
        name="smooth1d", dim=1, extent_x=(-1.0, 1.0), ic=_smooth1d_ic,
        bcs={"x_lo": Periodic(), "x_hi": Periodic()}, t_end=t_end,
        reference="fine-grid", default_n=(100,),
        description="smooth periodic sine wave, 1D Euler",
    )


VORTEX_EPS = 5.0


def _vortex_prim(x, y, t=0.0, eps=VORTEX_EPS, gamma=GAMMA, period=10.0):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # position relative to the advected centre, wrapped to [-5, 5)
    xr = np.mod(x - t + 0.5 * period, period) - 0.5 * period
    yr = np.mod(y - t + 0.5 * period, period) - 0.5 * period
    r2 = xr * xr + yr * yr
    bump = np.exp(0.5 * (1.0 - r2))
    u = 1.0 - eps * yr / (2.0 * np.pi) * bump
    v = 1.0 + eps * xr / (2.0 * np.pi) * bump
    temp = 1.0 - (gamma - 1.0) * eps ** 2 / (8.0 * gamma * np.pi ** 2) * np.exp(1.0 - r2)
    rho = temp ** (1.0 / (gamma - 1.0))
    p = temp ** (gamma / (gamma - 1.0))
    return np.array([rho, u, v, p])


def isentropic_vortex_2d(t_end: float = 10.0) -> ProblemSpec:
    return ProblemSpec(
        name="vortex2d", dim=2, extent_x=(-5.0, 5.0), extent_y=(-5.0, 5.0),
        ic=lambda x, y: _vortex_prim(x, y, 0.0),
        exact=lambda x, y, t: _vortex_prim(x, y, t),
        bcs={s: Periodic() for s in SIDES_2D}, t_end=t_end,
        reference="analytic-period", default_n=(80, 80),
        description="isentropic vortex advected along (1, 1)",
    )


def _riemann_1d(x0, left, right):
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)

    def ic(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < x0, left[:, None], right[:, None]).reshape((3,) + x.shape)
    return ic


def sod_shock_tube(t_end: float = 0.8) -> ProblemSpec:
    return ProblemSpec(
        name="sod", dim=1, extent_x=(-2.0, 2.0),
        ic=_riemann_1d(0.0, (1.0, 0.0, 1.0), (0.125, 0.0, 0.1)),
        bcs={"x_lo": NeumannOutflow(), "x_hi": NeumannOutflow()}, t_end=t_end,
        default_n=(200,), description="Sod shock tube",
    )


def double_shock(t_end: float = 0.8) -> ProblemSpec:
    return ProblemSpec(
        name="double_shock", dim=1, extent_x=(-3.0, 3.0),
        ic=_riemann_1d(0.0, (1.0, 3.0, 1.0), (2.0, 1.0, 1.0)),
        bcs={"x_lo": NeumannOutflow(), "x_hi": NeumannOutflow()}, t_end=t_end,
        default_n=(150,), description="two right-going shocks",
    )


def _blast_ic(x):
    x = np.asarray(x, dtype=float)
    p = np.where(x < 0.1, 1000.0, np.where(x < 0.9, 0.01, 100.0))
    return np.array([np.ones_like(x), np.zeros_like(x), p])


def blast_wave(t_end: float = 0.038) -> ProblemSpec:
    return ProblemSpec(
        name="blast", dim=1, extent_x=(0.0, 1.0), ic=_blast_ic,
        bcs={"x_lo": ReflectiveWall(), "x_hi": ReflectiveWall()}, t_end=t_end,
        default_n=(200,), description="Woodward-Colella interacting blast waves",
        # conservative limiting drives face pressures negative next to the
        # p=0.01 gap on every limiter tried, so this one limits (rho, u, p)
        limit_vars="primitive",
    )


STEP_INFLOW = (1.4, 3.0, 0.0, 1.0)
STEP_X, STEP_H = 0.6, 0.2


def _step_active(x, y):
    return ~((np.asarray(x) > STEP_X) & (np.asarray(y) < STEP_H))


def wind_tunnel_step(t_end: float = 4.0) -> ProblemSpec:
    def ic(x, y):
        x = np.asarray(x, dtype=float)
        return np.array([np.full_like(x, c) for c in STEP_INFLOW])

    return ProblemSpec(
        name="step", dim=2, extent_x=(0.0, 3.0), extent_y=(0.0, 1.0), ic=ic,
        bcs={"x_lo": SupersonicInflow(STEP_INFLOW), "x_hi": NeumannOutflow(),
             "y_lo": ReflectiveWall(), "y_hi": ReflectiveWall()},
        t_end=t_end, mask=_step_active, default_n=(150, 50),
        description="Mach 3 wind tunnel with a forward-facing step",
        # the expansion around the corner drives conservative reconstructions negative
        limit_vars="primitive",
    )


DMR_POST = (8.0, 8.25 * math.cos(math.pi / 6.0), -8.25 * math.sin(math.pi / 6.0), 116.5)
DMR_PRE = (1.4, 0.0, 0.0, 1.0)
DMR_X0 = 1.0 / 6.0


def dmr_front(t, y=1.0):
    """x position of the Mach 10 shock at height y and time t."""
    return DMR_X0 + (y + 20.0 * t) / math.sqrt(3.0)


def _dmr_state(mask_post):
    post = np.asarray(DMR_POST)
    pre = np.asarray(DMR_PRE)
    shape = np.shape(mask_post)
    mp = np.asarray(mask_post)[None]
    return np.where(mp, post.reshape((4,) + (1,) * len(shape)), pre.reshape((4,) + (1,) * len(shape)))


def double_mach_reflection(t_end: float = 0.2) -> ProblemSpec:
    def ic(x, y):
        return _dmr_state(np.asarray(x) < dmr_front(0.0, np.asarray(y)))

    def top(t, s):
        return _dmr_state(s < dmr_front(t, 1.0))

    return ProblemSpec(
        name="dmr", dim=2, extent_x=(0.0, 4.0), extent_y=(0.0, 1.0), ic=ic,
        bcs={"x_lo": SupersonicInflow(DMR_POST), "x_hi": NeumannOutflow(),
             "y_lo": SplitBC(DMR_X0, SupersonicInflow(DMR_POST), ReflectiveWall()),
             "y_hi": DirichletExact(top)},
        t_end=t_end, default_n=(480, 120),
        description="double Mach reflection of a Mach 10 shock",
    )


PROBLEMS = {
    "smooth1d": smooth_euler_1d,
    "vortex2d": isentropic_vortex_2d,
    "sod": sod_shock_tube,
    "double_shock": double_shock,
    "blast": blast_wave,
    "step": wind_tunnel_step,
    "dmr": double_mach_reflection,
}


def get_problem(name: str) -> ProblemSpec:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {'|'.join(PROBLEMS)}") from None
