"""Command-line entry point: ``musclnu <subcommand> ...``.

On failure the last line on stderr is a single JSON object
``{"error": <type>, "message": <text>}`` and the exit code is nonzero
(2 for bad input, 3 for a non-physical state, 1 otherwise).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import FIELD_KEYS, ConfigError, RunConfig, parse_config, render
from .euler import NonPhysicalStateError
from .limiters import ENHANCED_FAMILIES, KIND_LABELS, LimiterError, LimiterSpec, limiter_table

log = logging.getLogger("musclnu")


# ---------------------------------------------------------------------------
# run


def _add_run_flags(p):
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--problem")
    p.add_argument("--nx")
    p.add_argument("--ny")
    p.add_argument("--perturb-r", dest="perturb-r")
    p.add_argument("--seed")
    p.add_argument("--limiter", help="name or name:flavor, or none for first order")
    p.add_argument("--flavor")
    p.add_argument("--cfl")
    p.add_argument("--t-end", dest="t-end")
    p.add_argument("--out")
    p.add_argument("--output-times", dest="output-times", help="comma-separated times")
    p.add_argument("--entropy-fix", dest="entropy-fix", help="on|off|<threshold>")
    p.add_argument("--limit-vars", dest="limit-vars", help="auto|conservative|primitive")


def config_from_args(args) -> RunConfig:
    text = Path(args.config).read_text() if args.config else ""
    flags = {k: getattr(args, k, None) for k in FIELD_KEYS}
    return parse_config(text, flags)


def cmd_run(args) -> int:
    from .problems import get_problem
    from .solver import TimeControls, run

    cfg = config_from_args(args)
    problem = get_problem(cfg.problem)
    t_end = problem.t_end if cfg.t_end is None else cfg.t_end
    out = Path(cfg.out) / cfg.run_id()
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(render(cfg))
    res = run(problem, cfg.spec, TimeControls(cfg.cfl, t_end), n=cfg.dims, r=cfg.perturb_r,
              seed=cfg.seed, entropy_fix=cfg.entropy_fix,
              limit_vars=None if cfg.limit_vars == "auto" else cfg.limit_vars,
              output_times=cfg.output_times, out_dir=out)
    last = res.history[-1]
    print(f"{cfg.run_id()}: {res.steps} steps to t={last['t']:.6g}, "
          f"min rho={last['min_rho']:.4g}, min p={last['min_p']:.4g} -> {out}")
    return 0


# ---------------------------------------------------------------------------
# rate-study


def cmd_rate_study(args) -> int:
    from .analysis import rate_study, rates_markdown, write_errors_csv, write_rates_csv
    from .problems import get_problem

    problem = get_problem(args.problem)
    if args.t_end is not None:
        problem = problem.with_t_end(args.t_end)
    specs = [None if s.strip() == "none" else LimiterSpec.parse(s) for s in args.limiters.split(",")]
    sizes = [int(s) for s in args.sizes.split(",")]
    if not 0.0 <= args.perturb_r < 0.5:
        raise ConfigError(f"perturb-r: need 0 <= r < 0.5, got {args.perturb_r}")
    study = rate_study(problem, specs, sizes, r=args.perturb_r, seed=args.seed, cfl=args.cfl,
                       fine_n=args.fine_n, cache_dir=args.cache_dir)
    out = Path(args.out) / f"{problem.name}-rates-r{args.perturb_r:g}-s{args.seed}"
    out.mkdir(parents=True, exist_ok=True)
    write_rates_csv(study, out / "rates.csv")
    write_errors_csv(study, out / "errors.csv")
    md = rates_markdown(study)
    (out / "rates.md").write_text(md)
    print(md, end="")
    print(f"-> {out / 'rates.csv'}")
    return 0


# ---------------------------------------------------------------------------
# advect-oracle


def cmd_advect_oracle(args) -> int:
    from .advection import run_trials

    if args.limiters:
        specs = [LimiterSpec.parse(s) for s in args.limiters.split(",")]
    else:
        specs = [LimiterSpec(k) for k in ENHANCED_FAMILIES]
    results = run_trials(args.trials, args.seed, specs)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["trial", "seed", "tv_before", "tv_after", "defect", "limiter", "c",
                    "coef_min", "coef_max"])
        for r in results:
            w.writerow([r.trial, r.seed, repr(r.tv_before), repr(r.tv_after), repr(r.defect),
                        r.kind, repr(r.c), repr(r.coef_min), repr(r.coef_max)])
    finally:
        if args.out:
            fh.close()
    bad_tv = sum(r.tv_after > r.tv_before + 1e-12 for r in results)
    bad_coef = sum(not (-1e-14 <= r.coef_min and r.coef_max <= 1 + 1e-14) for r in results)
    worst = max((r.defect for r in results), default=0.0)
    print(f"{len(results)} cases: tv violations={bad_tv}, coefficient violations={bad_coef}, "
          f"max symmetry defect={worst:.3e}", file=sys.stderr)
    return 0 if bad_tv == 0 and bad_coef == 0 else 1


# ---------------------------------------------------------------------------
# limiter-table


def _thetas(text: str) -> np.ndarray:
    if text.count(":") == 2:
        lo, hi, num = text.split(":")
        return np.linspace(float(lo), float(hi), int(num))
    return np.array([float(t) for t in text.split(",")])


def cmd_limiter_table(args) -> int:
    spec = LimiterSpec.parse(args.limiter)
    rows = limiter_table(spec, args.A, args.B, _thetas(args.thetas))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["theta", "phi", "lower", "upper"])
        w.writerows([[repr(float(x)) for x in row] for row in rows])
    finally:
        if args.out:
            fh.close()
    return 0


# ---------------------------------------------------------------------------
# grid-gen


def cmd_grid_gen(args) -> int:
    from .mesh import make_grid, make_grid_2d, write_grid2d_csv, write_grid_csv

    if not 0.0 <= args.perturb_r < 0.5:
        raise ConfigError(f"perturb-r: need 0 <= r < 0.5, got {args.perturb_r}")
    ext_x, ext_y = args.extent_x, args.extent_y
    if args.problem:
        from .problems import get_problem
        p = get_problem(args.problem)
        ext_x, ext_y = p.extent_x, p.extent_y if p.dim == 2 else None
    if args.ny is not None:
        grid = make_grid_2d(ext_x, ext_y or (0.0, 1.0), args.nx, args.ny, args.perturb_r, args.seed)
        stem = args.out or "grid"
        px, py = write_grid2d_csv(grid, stem)
        print(f"-> {px}, {py}")
        return 0
    grid = make_grid(ext_x[0], ext_x[1], args.nx, args.perturb_r, args.seed)
    if args.out:
        write_grid_csv(grid, args.out)
        print(f"-> {args.out}")
    else:
        print("face")
        for f in grid.faces:
            print(repr(float(f)))
    return 0


# ---------------------------------------------------------------------------


def _extent(text):
    a, _, b = text.partition(",")
    return float(a), float(b)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="musclnu", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one problem and dump fields")
    _add_run_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("rate-study", help="convergence rates on a ladder of meshes")
    p.add_argument("--problem", required=True, choices=["smooth1d", "vortex2d"])
    p.add_argument("--limiters", default="mc:enhanced,van_albada:conventional")
    p.add_argument("--sizes", default="100,200,400,800,1600")
    p.add_argument("--perturb-r", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cfl", type=float, default=0.6)
    p.add_argument("--t-end", type=float)
    p.add_argument("--fine-n", type=int, default=25600, help="cells in the 1D fine reference")
    p.add_argument("--cache-dir", help="where to keep the fine reference between runs")
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_rate_study)

    p = sub.add_parser("advect-oracle", help="randomized TVD / symmetry trials for scalar advection")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limiters", help="comma list; default every enhanced family")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_advect_oracle)

    p = sub.add_parser("limiter-table", help="phi and the generalised Sweby bounds over theta")
    p.add_argument("--limiter", required=True, help=f"<{'|'.join(KIND_LABELS.values())}>[:flavor]")
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--thetas", default="0:4:41", help="lo:hi:num or comma list")
    p.add_argument("--out")
    p.set_defaults(func=cmd_limiter_table)

    p = sub.add_parser("grid-gen", help="write perturbed grid faces as CSV")
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int)
    p.add_argument("--perturb-r", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--extent-x", type=_extent, default=(0.0, 1.0), help="a,b")
    p.add_argument("--extent-y", type=_extent, default=None, help="a,b")
    p.add_argument("--problem", help="take the extents from a problem")
    p.add_argument("--out", help="CSV path (2D: file stem)")
    p.set_defaults(func=cmd_grid_gen)
    return ap


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, LimiterError, ValueError, KeyError, FileNotFoundError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        return _fail(type(exc).__name__, str(msg), 2)
    except NonPhysicalStateError as exc:
        return _fail(type(exc).__name__, str(exc), 3)
    except Exception as exc:  # noqa: BLE001 - last-resort machine-readable report
        return _fail(type(exc).__name__, str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
