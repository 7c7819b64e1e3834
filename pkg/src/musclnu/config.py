"""Run configuration: flat ``key=value`` text with ``#`` comments.

Grammar, one logical item per token::

    file    := line*
    line    := ws* (item (ws+ item)*)? ws* ('#' any*)? newline
    item    := key '=' value          (no whitespace inside an item)
    key     := [a-z][a-z0-9-]*

Keys are the long CLI flag names without the leading dashes.  Unknown keys
and repeated keys are errors.  ``render`` writes one item per line and
``parse(render(c)) == c`` holds for every valid config.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace
from typing import Optional

from .euler import DEFAULT_ENTROPY_FIX
from .limiters import FLAVOR_NAMES, KIND_NAMES, LimiterSpec
from .problems import PROBLEMS, get_problem


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    problem: str
    nx: Optional[int] = None
    ny: Optional[int] = None
    perturb_r: float = 0.0
    seed: int = 0
    limiter: str = "van_albada"
    flavor: str = "enhanced"
    cfl: float = 0.6
    t_end: Optional[float] = None
    out: str = "runs"
    output_times: tuple = ()
    entropy_fix: float = DEFAULT_ENTROPY_FIX
    limit_vars: str = "auto"

    @property
    def spec(self) -> Optional[LimiterSpec]:
        if self.limiter == "none":
            return None
        return LimiterSpec(KIND_NAMES[self.limiter], FLAVOR_NAMES[self.flavor])

    @property
    def dims(self) -> tuple:
        return (self.nx,) if self.ny is None else (self.nx, self.ny)

    def run_id(self) -> str:
        n = "x".join(str(v) for v in self.dims)
        return f"{self.problem}-{self.limiter}-{self.flavor}-n{n}-r{self.perturb_r:g}-s{self.seed}"


REQUIRED = ("problem",)

_KEY_RE = re.compile(r"^[a-z][a-z0-9-]*$")


def _key(name: str) -> str:
    return name.replace("_", "-")


FIELD_KEYS = {_key(f.name): f.name for f in fields(RunConfig)}


def _opt_int(text):
    return None if text in ("", "none") else int(text)


def _opt_float(text):
    return None if text in ("", "none") else float(text)


def _times(text):
    return tuple(float(t) for t in text.split(",") if t.strip()) if text else ()


def _entropy_fix(text):
    if text == "on":
        return DEFAULT_ENTROPY_FIX
    if text == "off":
        return 0.0
    return float(text)


_CONVERT = {
    "nx": _opt_int, "ny": _opt_int, "seed": int, "perturb_r": float, "cfl": float,
    "t_end": _opt_float, "output_times": _times, "entropy_fix": _entropy_fix,
}


def _convert(name: str, raw):
    if not isinstance(raw, str):
        return raw
    try:
        return _CONVERT.get(name, str)(raw.strip())
    except ValueError:
        raise ConfigError(f"{_key(name)}: cannot parse value {raw!r}") from None


def parse_text(text: str) -> dict:
    """Raw key -> string mapping from config text (no validation of values)."""
    items: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        for tok in line.split():
            key, eq, value = tok.partition("=")
            if not eq:
                raise ConfigError(f"line {lineno}: expected key=value, got {tok!r}")
            if not _KEY_RE.match(key):
                raise ConfigError(f"line {lineno}: bad key {key!r}")
            if key in items:
                raise ConfigError(f"line {lineno}: key {key!r} given twice")
            items[key] = value
    return items


def build_config(items: dict, overrides: Optional[dict] = None) -> RunConfig:
    """Validated config from raw items; ``overrides`` (e.g. CLI flags) win."""
    merged = dict(items)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(k for k in merged if k not in FIELD_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}; allowed: {', '.join(FIELD_KEYS)}")
    missing = [k for k in REQUIRED if k not in merged]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    kw = {FIELD_KEYS[k]: _convert(FIELD_KEYS[k], v) for k, v in merged.items()}
    limiter = kw.get("limiter")
    if isinstance(limiter, str) and ":" in limiter:
        # "mc:conventional" shorthand; an explicit flavor key wins
        name, _, flavor = limiter.partition(":")
        kw["limiter"] = name
        if "flavor" not in merged:
            kw["flavor"] = flavor
    return validate(RunConfig(**kw))


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.problem not in PROBLEMS:
        raise ConfigError(f"problem: unknown {cfg.problem!r}; choose from {'|'.join(PROBLEMS)}")
    if cfg.limiter != "none" and cfg.limiter not in KIND_NAMES:
        raise ConfigError(f"limiter: unknown {cfg.limiter!r}; choose from {'|'.join(KIND_NAMES)}")
    if cfg.flavor not in FLAVOR_NAMES:
        raise ConfigError(f"flavor: must be conventional|enhanced, got {cfg.flavor!r}")
    if not 0.0 <= cfg.perturb_r < 0.5:
        raise ConfigError(f"perturb-r: need 0 <= r < 0.5, got {cfg.perturb_r}")
    if not 0.0 < cfg.cfl <= 1.0:
        raise ConfigError(f"cfl: need 0 < cfl <= 1, got {cfg.cfl}")
    if cfg.t_end is not None and cfg.t_end < 0:
        raise ConfigError(f"t-end: must be >= 0, got {cfg.t_end}")
    if cfg.entropy_fix < 0:
        raise ConfigError(f"entropy-fix: must be on|off|number >= 0, got {cfg.entropy_fix}")
    if cfg.limit_vars not in ("auto", "conservative", "primitive"):
        raise ConfigError(f"limit-vars: must be auto|conservative|primitive, got {cfg.limit_vars!r}")
    problem = get_problem(cfg.problem)
    nx = cfg.nx if cfg.nx is not None else problem.default_n[0]
    ny = cfg.ny
    if problem.dim == 1:
        if ny is not None:
            raise ConfigError(f"ny: problem {cfg.problem} is 1D")
    elif ny is None:
        ny = problem.default_n[1]
    for key, v in (("nx", nx), ("ny", ny)):
        if v is not None and v < 2:
            raise ConfigError(f"{key}: need at least 2 cells, got {v}")
    return replace(cfg, nx=nx, ny=ny)


def parse_config(text: str = "", overrides: Optional[dict] = None) -> RunConfig:
    return build_config(parse_text(text), overrides)


def _render_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ",".join(repr(float(t)) for t in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(cfg: RunConfig) -> str:
    lines = [f"{_key(f.name)}={_render_value(getattr(cfg, f.name))}" for f in fields(RunConfig)]
    return "\n".join(lines) + "\n"
