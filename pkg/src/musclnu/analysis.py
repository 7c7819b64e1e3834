"""Error norms, convergence rates, TV series and rate tables."""
from __future__ import annotations

import csv
import hashlib
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .euler import cons_to_prim
from .limiters import LimiterSpec
from .problems import ProblemSpec
from .solver import Field, TimeControls, build_grid, run

log = logging.getLogger(__name__)

VARIABLES_1D = ("rho", "u", "p")
VARIABLES_2D = ("rho", "u", "v", "p")


class AnalysisError(ValueError):
    pass


def weighted_l1(values, reference, weights) -> float:
    """sum w_i |values_i - reference_i|."""
    values = np.asarray(values, dtype=float)
    reference = np.asarray(reference, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if not (values.shape == reference.shape == weights.shape):
        raise AnalysisError(f"shape mismatch: values {values.shape}, reference {reference.shape}, "
                            f"weights {weights.shape}")
    return float(np.sum(weights * np.abs(values - reference)))


def _variables(dim):
    return VARIABLES_1D if dim == 1 else VARIABLES_2D


def cell_weights(fld: Field) -> np.ndarray:
    if fld.dim == 1:
        return np.asarray(fld.grid.sizes)
    return fld.grid.areas() * fld.active()


def l1_error(fld: Field, reference, variable: str, gas=None) -> float:
    """Size-weighted L1 error of one primitive variable.

    ``reference`` holds primitive values at the cell centres, shaped like
    the field's primitive array, or is a dict keyed by variable name.
    """
    names = _variables(fld.dim)
    if variable not in names:
        raise AnalysisError(f"variable must be one of {names}, got {variable!r}")
    k = names.index(variable)
    q = cons_to_prim(fld.values) if gas is None else cons_to_prim(fld.values, gas)
    ref = reference[variable] if isinstance(reference, dict) else np.asarray(reference)[k]
    return weighted_l1(q[k], ref, cell_weights(fld))


def convergence_rate(e1: float, h1: float, e2: float, h2: float) -> float:
    """R = (log e1 - log e2) / (log h1 - log h2)."""
    if not (e1 > 0 and e2 > 0):
        raise AnalysisError(f"errors must be positive, got {e1}, {e2}")
    if not (h1 > 0 and h2 > 0):
        raise AnalysisError(f"sizes must be positive, got {h1}, {h2}")
    if h1 == h2:
        raise AnalysisError("the two meshes have the same reference size")
    return (math.log(e1) - math.log(e2)) / (math.log(h1) - math.log(h2))


def total_variation(u) -> float:
    """sum |u_i - u_{i+1}| over interior neighbours (no wrap)."""
    return float(np.abs(np.diff(np.asarray(u, dtype=float))).sum())


def tv_series(history) -> np.ndarray:
    return np.array([total_variation(u) for u in history])


# ---------------------------------------------------------------------------
# references


def interpolate_periodic(x_ref, v_ref, x, period: float) -> np.ndarray:
    """Piecewise-linear interpolation of centre values with periodic wrap."""
    return np.interp(np.asarray(x, dtype=float), np.asarray(x_ref), np.asarray(v_ref), period=period)


def _ref_key(problem, n, spec, cfl):
    text = f"{problem.name}|{problem.t_end!r}|{n}|{spec}|{cfl!r}"
    return hashlib.sha1(text.encode()).hexdigest()[:16]


def fine_reference(problem: ProblemSpec, n: int = 25600, spec: Optional[LimiterSpec] = None,
                   cfl: float = 0.6, cache_dir=None):
    """(centres, primitive values) on a uniform fine 1D mesh, optionally cached as .npz."""
    spec = spec or LimiterSpec.parse("mc:enhanced")
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / f"ref-{_ref_key(problem, n, spec, cfl)}.npz"
        if path.exists():
            data = np.load(path)
            return data["x"], data["q"]
    grid = build_grid(problem, n, 0.0, 0)
    res = run(problem, spec, TimeControls(cfl, problem.t_end), grid=grid)
    x, q = grid.centers.copy(), cons_to_prim(res.field.values, problem.gas)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savez(path, x=x, q=q)
    return x, q


def reference_at(problem: ProblemSpec, fld: Field, fine=None) -> np.ndarray:
    """Reference primitive values at the field's cell centres."""
    if problem.reference == "analytic-period":
        X, Y = fld.grid.centers()
        return problem.exact(X, Y, fld.t)
    if problem.reference == "fine-grid":
        if fine is None:
            raise AnalysisError("fine-grid reference requested but none supplied")
        x_ref, q_ref = fine
        period = problem.extent_x[1] - problem.extent_x[0]
        return np.array([interpolate_periodic(x_ref, v, fld.grid.centers, period) for v in q_ref])
    raise AnalysisError(f"problem {problem.name} has no reference solution")


# ---------------------------------------------------------------------------
# rate studies


@dataclass
class StudyResult:
    """Errors per limiter and variable on a ladder of meshes."""

    problem: str
    sizes: list
    h: list
    r: float
    seed: int
    variables: tuple
    errors: dict = field(default_factory=dict)   # label -> var -> [E per size]

    def rates(self, label: str, variable: str) -> list:
        e = self.errors[label][variable]
        return [convergence_rate(e[i], self.h[i], e[i + 1], self.h[i + 1]) for i in range(len(e) - 1)]

    def finest_rate(self, label: str, variable: str) -> float:
        return self.rates(label, variable)[-1]

    def table(self) -> list[list]:
        """Rows (variable, rate per limiter) using the finest pair."""
        labels = list(self.errors)
        return [[v] + [self.finest_rate(lab, v) for lab in labels] for v in self.variables]


def rate_study(problem: ProblemSpec, specs: Sequence, sizes: Sequence, r: float = 0.0,
               seed: int = 0, cfl: float = 0.6, fine=None, fine_n: int = 25600,
               cache_dir=None, **run_kw) -> StudyResult:
    """Run every limiter on every mesh and collect L1 errors.

    ``sizes`` are cells per axis (2D meshes are square).  Each mesh size n
    uses its own sub-seed so the ladder is reproducible from ``seed``.
    """
    from .rng import derive_seed

    specs = [s if isinstance(s, LimiterSpec) or s is None else LimiterSpec.parse(s) for s in specs]
    dim = problem.dim
    if problem.reference == "fine-grid" and fine is None:
        fine = fine_reference(problem, fine_n, cfl=cfl, cache_dir=cache_dir)
    lx = problem.extent_x[1] - problem.extent_x[0]
    out = StudyResult(problem.name, list(sizes), [lx / n for n in sizes], r, seed, _variables(dim))
    for spec in specs:
        label = "first-order" if spec is None else str(spec)
        errs = {v: [] for v in out.variables}
        for n in sizes:
            grid = build_grid(problem, n if dim == 1 else (n, n), r, derive_seed(seed, n))
            res = run(problem, spec, TimeControls(cfl, problem.t_end), grid=grid, **run_kw)
            ref = reference_at(problem, res.field, fine)
            for v in out.variables:
                errs[v].append(l1_error(res.field, ref, v, problem.gas))
            log.info("%s n=%d p-error=%.3e", label, n, errs["p"][-1])
        out.errors[label] = errs
    return out


def write_rates_csv(study: StudyResult, path) -> None:
    labels = list(study.errors)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variable"] + labels)
        for row in study.table():
            w.writerow([row[0]] + [f"{x:.4f}" for x in row[1:]])


def write_errors_csv(study: StudyResult, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["limiter", "variable", "n", "h", "error", "rate"])
        for label, errs in study.errors.items():
            for v, e in errs.items():
                rates = [float("nan")] + study.rates(label, v)
                for n, h, ei, ri in zip(study.sizes, study.h, e, rates):
                    w.writerow([label, v, n, repr(h), repr(ei), f"{ri:.4f}"])


def rates_markdown(study: StudyResult) -> str:
    labels = list(study.errors)
    lines = ["| | " + " | ".join(labels) + " |", "|---" * (len(labels) + 1) + "|"]
    for row in study.table():
        lines.append(f"| {row[0]} | " + " | ".join(f"{x:.4f}" for x in row[1:]) + " |")
    return "\n".join(lines) + "\n"
