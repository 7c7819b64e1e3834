"""Slope limiters: conventional and grid-aware ("enhanced") families.

Every family is written in its enhanced form ``phi_{A,B}(theta)`` where, for
cell i with neighbours of sizes dx[i-1], dx[i+1],

    A = (dx[i-1] + dx[i]) / (dx[i] + dx[i+1])    # theta on linear data
    B = 2 dx[i] / (dx[i] + dx[i+1])               # required phi there

The conventional limiter is the same family evaluated at A = B = 1, so one
formula serves both flavours.  ``k`` is the integer exponent used by the
smooth van Leer / van Albada enhancements.

All formulas return 0 for theta <= 0 and for non-finite theta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import USE_NUMBA, njit

NONE, MINMOD, SUPERBEE, MC, VANLEER, VANALBADA, BERGER1, BERGER2 = range(8)
CONVENTIONAL, ENHANCED = 0, 1

KIND_NAMES = {
    "none": NONE,
    "minmod": MINMOD,
    "superbee": SUPERBEE,
    "mc": MC,
    "van_leer": VANLEER,
    "van_albada": VANALBADA,
    "berger1": BERGER1,
    "berger2": BERGER2,
}
KIND_LABELS = {v: k for k, v in KIND_NAMES.items()}
FLAVOR_NAMES = {"conventional": CONVENTIONAL, "enhanced": ENHANCED}
FLAVOR_LABELS = {v: k for k, v in FLAVOR_NAMES.items()}

ENHANCED_FAMILIES = (MINMOD, SUPERBEE, MC, VANLEER, VANALBADA, BERGER1, BERGER2)
# Families with a smooth (C-infinity) enhanced form.
SMOOTH_FAMILIES = (VANLEER, VANALBADA)

# Horner sums are exact enough up to this k; beyond it the closed form is used.
_HORNER_MAX_K = 64
_K_LIMIT = 1 << 40


class LimiterError(ValueError):
    pass


@dataclass(frozen=True)
class LimiterSpec:
    """Limiter family plus flavour, e.g. ``LimiterSpec.parse("mc:enhanced")``."""

    kind: int = VANALBADA
    flavor: int = ENHANCED

    def __post_init__(self):
        if self.kind not in KIND_LABELS:
            raise LimiterError(f"unknown limiter kind {self.kind!r}")
        if self.flavor not in FLAVOR_LABELS:
            raise LimiterError(f"unknown limiter flavor {self.flavor!r}")

    @classmethod
    def parse(cls, text: str, default_flavor: str = "enhanced") -> "LimiterSpec":
        name, _, flavor = text.strip().partition(":")
        flavor = flavor or default_flavor
        try:
            return cls(KIND_NAMES[name.strip().lower()], FLAVOR_NAMES[flavor.strip().lower()])
        except KeyError:
            raise LimiterError(
                f"bad limiter {text!r}; expected <{'|'.join(KIND_NAMES)}>[:conventional|enhanced]"
            ) from None

    @property
    def name(self) -> str:
        return KIND_LABELS[self.kind]

    @property
    def flavor_name(self) -> str:
        return FLAVOR_LABELS[self.flavor]

    def __str__(self):
        return f"{self.name}:{self.flavor_name}"


def check_admissible(A: float, B: float) -> None:
    if not (A > 0 and 0 < B < min(2.0, 2.0 * A)):
        raise LimiterError(f"(A, B) = ({A!r}, {B!r}) violates 0 < B < min(2, 2A)")


@dataclass(frozen=True)
class LimiterParams:
    """Per-cell parameters.  Validated on construction, never at evaluation."""

    A: float = 1.0
    B: float = 1.0
    k: int = 1
    _origin: "LimiterParams | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        check_admissible(self.A, self.B)
        if int(self.k) != self.k or self.k < 1:
            raise LimiterError(f"k must be a positive integer, got {self.k!r}")


# ---------------------------------------------------------------------------
# scalar kernels (compiled by numba when available)


@njit
def _sum_ratio(x, k):
    """(1 + x + ... + x^(k-1)) / (1 + x + ... + x^k) for 0 < x <= 1."""
    if k <= _HORNER_MAX_K:
        p = 1.0
        for _ in range(k - 1):
            p = 1.0 + x * p
        return p / (1.0 + x * p)
    if x == 1.0:
        return k / (k + 1.0)
    lx = math.log(x)
    return math.expm1(k * lx) / math.expm1((k + 1) * lx)


@njit
def vanleer_weight(theta, k):
    """(theta^k + ... + theta) / (theta^k + ... + theta + 1), overflow-safe."""
    if theta <= 1.0:
        return theta * _sum_ratio(theta, k)
    return _sum_ratio(1.0 / theta, k)


@njit
def phi_scalar(kind, theta, A, B, k):
    if not (theta > 0.0) or theta == math.inf:
        return 0.0
    if kind == MINMOD:
        return B * (min(theta, A) / A)
    if kind == SUPERBEE:
        return max(min(2.0 * theta, B), min(B * (theta / A), 2.0))
    if kind == MC:
        return min(2.0 * theta, B * ((theta + 1.0) / (A + 1.0)), 2.0)
    if kind == VANLEER:
        return B * (vanleer_weight(theta, k) / vanleer_weight(A, k))
    if kind == VANALBADA:
        if theta <= 1.0:
            p = theta ** k
            return B * ((p + theta) / (p + A))
        s = theta ** (-k)
        return B * ((1.0 + theta * s) / (1.0 + A * s))
    if kind == BERGER1:
        if theta <= A:
            t = ((theta * (A + 1.0)) / ((theta + 1.0) * A)) ** (B / (2.0 * A - B))
            return 2.0 * theta * (1.0 - t) + (theta / A) * B * t
        t = ((A + 1.0) / (theta + 1.0)) ** (B / (2.0 - B))
        return 2.0 * (1.0 - t) + B * t
    if kind == BERGER2:
        scale = B * ((theta + 1.0) / (A + 1.0))
        if theta <= A:
            base = 1.0 - (theta * (A + 1.0)) / ((theta + 1.0) * A)
            return scale * (1.0 - max(base, 0.0) ** (2.0 * A / B))
        base = 1.0 - (A + 1.0) / (theta + 1.0)
        return scale * (1.0 - base ** (2.0 / B))
    return 0.0


@njit
def _phi_array_nb(kind, theta, A, B, k):
    out = np.empty(theta.size)
    for i in range(theta.size):
        out[i] = phi_scalar(kind, theta[i], A[i], B[i], k[i])
    return out


# ---------------------------------------------------------------------------
# vectorised numpy twins


def _sum_ratio_np(x, k):
    x = np.asarray(x, dtype=float)
    k = np.broadcast_to(np.asarray(k, dtype=np.int64), x.shape)
    out = np.empty_like(x)
    small = k <= _HORNER_MAX_K
    if np.any(small):
        xs, ks = x[small], k[small]
        p = np.ones_like(xs)
        for j in range(int(ks.max()) - 1):
            p = np.where(j < ks - 1, 1.0 + xs * p, p)
        out[small] = p / (1.0 + xs * p)
    big = ~small
    if np.any(big):
        xb, kb = x[big], k[big].astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(xb)
            r = np.expm1(kb * lx) / np.expm1((kb + 1.0) * lx)
        out[big] = np.where(xb == 1.0, kb / (kb + 1.0), r)
    return out


def vanleer_weight_np(theta, k):
    theta = np.asarray(theta, dtype=float)
    le = theta <= 1.0
    x = np.where(le, theta, 1.0 / np.where(le, 1.0, theta))
    r = _sum_ratio_np(x, k)
    return np.where(le, theta * r, r)


def _phi_array_np(kind, theta, A, B, k):
    theta = np.asarray(theta, dtype=float)
    A = np.broadcast_to(np.asarray(A, dtype=float), theta.shape)
    B = np.broadcast_to(np.asarray(B, dtype=float), theta.shape)
    k = np.broadcast_to(np.asarray(k, dtype=np.int64), theta.shape)
    pos = (theta > 0.0) & (theta < np.inf)
    t = np.where(pos, theta, 1.0)
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        if kind == NONE:
            val = np.zeros_like(t)
        elif kind == MINMOD:
            val = B * (np.minimum(t, A) / A)
        elif kind == SUPERBEE:
            val = np.maximum(np.minimum(2.0 * t, B), np.minimum(B * (t / A), 2.0))
        elif kind == MC:
            val = np.minimum(np.minimum(2.0 * t, B * ((t + 1.0) / (A + 1.0))), 2.0)
        elif kind == VANLEER:
            val = B * (vanleer_weight_np(t, k) / vanleer_weight_np(A, k))
        elif kind == VANALBADA:
            le = t <= 1.0
            p = t ** k
            s = t ** (-k.astype(float))
            val = np.where(le, B * ((p + t) / (p + A)), B * ((1.0 + t * s) / (1.0 + A * s)))
        elif kind == BERGER1:
            le = t <= A
            t1 = ((t * (A + 1.0)) / ((t + 1.0) * A)) ** (B / (2.0 * A - B))
            t2 = ((A + 1.0) / (t + 1.0)) ** (B / (2.0 - B))
            val = np.where(le, 2.0 * t * (1.0 - t1) + (t / A) * B * t1, 2.0 * (1.0 - t2) + B * t2)
        elif kind == BERGER2:
            le = t <= A
            scale = B * ((t + 1.0) / (A + 1.0))
            b1 = np.maximum(1.0 - (t * (A + 1.0)) / ((t + 1.0) * A), 0.0)
            b2 = np.maximum(1.0 - (A + 1.0) / (t + 1.0), 0.0)
            val = np.where(le, scale * (1.0 - b1 ** (2.0 * A / B)), scale * (1.0 - b2 ** (2.0 / B)))
        else:
            raise LimiterError(f"unknown limiter kind {kind!r}")
    return np.where(pos, val, 0.0)


def phi_array(kind, theta, A, B, k):
    """Vectorised evaluation on the active backend (same shapes in, out)."""
    theta = np.asarray(theta, dtype=float)
    shape = theta.shape
    if USE_NUMBA:
        flat = theta.ravel()
        A = np.ascontiguousarray(np.broadcast_to(np.asarray(A, dtype=float), shape)).ravel()
        B = np.ascontiguousarray(np.broadcast_to(np.asarray(B, dtype=float), shape)).ravel()
        k = np.ascontiguousarray(np.broadcast_to(np.asarray(k, dtype=np.int64), shape)).ravel()
        return _phi_array_nb(int(kind), np.ascontiguousarray(flat), A, B, k).reshape(shape)
    return _phi_array_np(int(kind), theta, A, B, k)


# ---------------------------------------------------------------------------
# public API


def _as_spec(kind) -> LimiterSpec:
    if isinstance(kind, LimiterSpec):
        return kind
    if isinstance(kind, str):
        return LimiterSpec.parse(kind)
    return LimiterSpec(int(kind), ENHANCED)


def eval_limiter(kind, params: LimiterParams, theta):
    """phi_{A,B}(theta) for one cell's parameters; ``theta`` may be an array.

    ``kind`` is a LimiterSpec, a name such as ``"van_leer:conventional"``, or
    a kind code (enhanced).  Conventional flavour ignores ``params`` and uses
    A = B = 1 with the family's default k.
    """
    spec = _as_spec(kind)
    if spec.flavor == CONVENTIONAL:
        params = conventional_params(spec.kind)
    if np.ndim(theta) == 0:
        return float(phi_scalar(spec.kind, float(theta), params.A, params.B, int(params.k)))
    return phi_array(spec.kind, theta, params.A, params.B, int(params.k))


@njit
def _vanleer_k_ok(A, B, k):
    return B <= 2.0 * vanleer_weight(A, k)


@njit
def select_k_vanleer_nb(A, B):
    if _vanleer_k_ok(A, B, 1):
        return 1
    hi = 2
    while not _vanleer_k_ok(A, B, hi):
        hi *= 2
        if hi > _K_LIMIT:
            return -1
    lo = hi // 2  # fails
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _vanleer_k_ok(A, B, mid):
            hi = mid
        else:
            lo = mid
    return hi


@njit
def select_k_vanalbada_nb(A, B):
    m = min(1.0, A)
    denom = 2.0 * m - B
    if denom <= 0.0:
        return -1
    k = max(1, int(math.ceil(B / denom)) - 1)
    while not (B <= 2.0 * m * (k / (k + 1.0))):
        k += 1
    while k > 1 and B <= 2.0 * m * ((k - 1) / float(k)):
        k -= 1
    return k


def select_k_vanleer(A: float, B: float) -> int:
    """Smallest k >= 1 with B <= 2 (A^k+...+A) / (A^k+...+A+1)."""
    check_admissible(A, B)
    k = int(select_k_vanleer_nb(float(A), float(B)))
    if k < 0:
        raise LimiterError(f"(A, B) = ({A}, {B}) needs k > 2**40")
    return k


def select_k_vanalbada(A: float, B: float) -> int:
    """Smallest k >= 1 with B <= 2 (1 + 1/k)^-1 min(1, A)."""
    check_admissible(A, B)
    k = int(select_k_vanalbada_nb(float(A), float(B)))
    if k < 0:
        raise LimiterError(f"(A, B) = ({A}, {B}) is not admissible")
    return k


# The van Albada family only contains the textbook (theta+theta^2)/(1+theta^2)
# at k = 2, so k is never allowed below 2 for it.
_MIN_K = {VANALBADA: 2}


def family_k(kind: int, A: float, B: float) -> int:
    """k used when building the family's parameters for a cell."""
    if kind == VANLEER:
        return select_k_vanleer(A, B)
    if kind == VANALBADA:
        return max(select_k_vanalbada(A, B), _MIN_K[VANALBADA])
    return 1


def conventional_params(kind: int) -> LimiterParams:
    return LimiterParams(1.0, 1.0, _MIN_K.get(kind, 1))


def make_params(kind: int, A: float, B: float) -> LimiterParams:
    return LimiterParams(float(A), float(B), family_k(int(kind), A, B))


@njit
def _family_k_array_nb(kind, A, B):
    out = np.ones(A.size, dtype=np.int64)
    for i in range(A.size):
        if kind == VANLEER:
            out[i] = select_k_vanleer_nb(A[i], B[i])
        elif kind == VANALBADA:
            out[i] = max(select_k_vanalbada_nb(A[i], B[i]), 2)
    return out


def family_k_array(kind: int, A, B) -> np.ndarray:
    """Vectorised ``family_k``; used to precompute per-cell exponents."""
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    bad = ~((A > 0) & (B > 0) & (B < np.minimum(2.0, 2.0 * A)))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise LimiterError(f"inadmissible grid ratios at cell {i}: A={A.flat[i]}, B={B.flat[i]}")
    if USE_NUMBA:
        k = _family_k_array_nb(int(kind), A.ravel(), B.ravel()).reshape(A.shape)
    else:
        k = np.array([family_k(kind, a, b) for a, b in zip(A.ravel(), B.ravel())],
                     dtype=np.int64).reshape(A.shape)
    if np.any(k < 0):
        raise LimiterError("grid ratio too extreme for k selection")
    return k


def conjugate(params: LimiterParams, kind: int | None = None) -> LimiterParams:
    """Parameters of the conjugate class, (A, B) -> (1/A, B/A).

    Both k selections are invariant under conjugation, so k is carried over
    instead of re-selected: when B sits exactly on a k-boundary the re-run
    can round to the neighbouring integer and break the symmetry identity.
    With ``kind`` the carried k is checked against a fresh selection.
    Conjugating twice returns the original object, so the involution is exact.
    """
    if params._origin is not None:
        return params._origin
    A, B = params.A, params.B
    if kind is not None:
        fresh = family_k(int(kind), 1.0 / A, B / A)
        if abs(fresh - params.k) > 1:
            raise LimiterError(f"k={params.k} does not fit family {KIND_LABELS[int(kind)]} at A={A}, B={B}")
    return LimiterParams(1.0 / A, B / A, params.k, _origin=params)


def sweby_bounds(A: float, B: float, theta: float) -> tuple[float, float]:
    """Lower/upper edges of the generalised second-order TVD region."""
    if not theta > 0:
        return 0.0, 0.0
    lw, bw = B, B * theta / A
    return min(lw, bw), min(2.0, 2.0 * theta, max(lw, bw))


def alt_monitor_feasible(A: float, B: float) -> bool:
    """Can a rescaled monitor make conventional van Leer both TVD and exact?

    With phi = theta / (a + b theta), TVD forces 2a >= 1 and 2b >= 1 and the
    order condition forces 2a + 2bA = 2A/B, which is possible iff
    2A/B >= 1 + A.
    """
    check_admissible(A, B)
    return 2.0 * A / B >= 1.0 + A


def limiter_table(spec: LimiterSpec, A: float, B: float, thetas) -> np.ndarray:
    """Rows (theta, phi, lower, upper) for a Sweby diagram."""
    params = make_params(spec.kind, A, B) if spec.flavor == ENHANCED else conventional_params(spec.kind)
    if spec.flavor == CONVENTIONAL:
        A, B = 1.0, 1.0
    thetas = np.asarray(thetas, dtype=float)
    phi = eval_limiter(spec, params, thetas)
    bounds = np.array([sweby_bounds(A, B, t) for t in thetas]).reshape(-1, 2)
    return np.column_stack([thetas, phi, bounds])
