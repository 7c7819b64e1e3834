"""Non-uniform 1D grids, tensor-product 2D grids and the random perturbation."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rng import SplitMix64, derive_seed


class GridError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Cell-centred 1D grid described by its N+1 face coordinates."""

    faces: np.ndarray
    centers: np.ndarray = field(init=False)
    sizes: np.ndarray = field(init=False)
    reference_size: float = field(init=False)

    def __post_init__(self):
        faces = np.array(self.faces, dtype=float)
        if faces.ndim != 1 or faces.size < 2:
            raise GridError("a grid needs at least two faces")
        sizes = np.diff(faces)
        if not np.all(sizes > 0):
            bad = int(np.argmin(sizes))
            raise GridError(f"faces must be strictly increasing (cell {bad} has size {sizes[bad]:g})")
        faces.setflags(write=False)
        centers = 0.5 * (faces[:-1] + faces[1:])
        centers.setflags(write=False)
        sizes.setflags(write=False)
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "reference_size", (faces[-1] - faces[0]) / sizes.size)

    @property
    def n(self) -> int:
        return self.sizes.size

    @property
    def a(self) -> float:
        return float(self.faces[0])

    @property
    def b(self) -> float:
        return float(self.faces[-1])

    def __eq__(self, other):
        return isinstance(other, Grid1D) and np.array_equal(self.faces, other.faces)

    def __hash__(self):
        return hash(self.faces.tobytes())

    def reversed(self) -> "Grid1D":
        """Mirror image about the domain midpoint (cell i <-> cell N-1-i)."""
        return Grid1D(self.a + self.b - self.faces[::-1])


@dataclass(frozen=True)
class Grid2D:
    x_axis: Grid1D
    y_axis: Grid1D

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x_axis.n, self.y_axis.n)

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-centre coordinates as two (nx, ny) arrays."""
        return np.meshgrid(self.x_axis.centers, self.y_axis.centers, indexing="ij")

    def areas(self) -> np.ndarray:
        return np.outer(self.x_axis.sizes, self.y_axis.sizes)


@dataclass(frozen=True)
class PerturbationParams:
    r: float
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.r < 0.5):
            raise GridError(f"perturbation ratio r must satisfy 0 <= r < 0.5, got {self.r}")


def uniform_grid(a: float, b: float, n: int) -> Grid1D:
    if n < 1:
        raise GridError(f"cell count must be >= 1, got {n}")
    if not a < b:
        raise GridError(f"need a < b, got a={a}, b={b}")
    faces = a + (b - a) * np.arange(n + 1) / n
    faces[-1] = b
    return Grid1D(faces)


def perturb_grid(base: Grid1D, params: PerturbationParams) -> Grid1D:
    """Move every interior face by ``r * delta``, ``delta ~ U[-h, h]``.

    Endpoints stay fixed.  Each face moves by at most ``r*h < h/2`` so cells
    stay positive.  Draws come from SplitMix64 in face order.
    """
    h = base.reference_size
    if not np.allclose(base.sizes, h, rtol=1e-9, atol=0.0):
        raise GridError("perturb_grid expects a uniform base grid")
    if params.r == 0.0:
        return Grid1D(base.faces.copy())
    delta = h * (2.0 * SplitMix64(params.seed).uniform(base.n - 1) - 1.0)
    faces = base.faces.copy()
    faces[1:-1] += params.r * delta
    return Grid1D(faces)


def make_grid(a: float, b: float, n: int, r: float = 0.0, seed: int = 0) -> Grid1D:
    return perturb_grid(uniform_grid(a, b, n), PerturbationParams(r, seed))


def make_grid_2d(extent_x, extent_y, nx: int, ny: int, r: float = 0.0, seed: int = 0) -> Grid2D:
    """Tensor-product grid; x and y are perturbed from independent sub-streams."""
    gx = make_grid(extent_x[0], extent_x[1], nx, r, derive_seed(seed, 0))
    gy = make_grid(extent_y[0], extent_y[1], ny, r, derive_seed(seed, 1))
    return Grid2D(gx, gy)


def cell_params(sizes_left, size_mid, sizes_right=None):
    """Grid ratios (A, B) for a cell given its own and its neighbours' sizes.

    Two call forms: ``cell_params(dx_prev, dx, dx_next)`` with scalars or
    equal-length arrays, or ``cell_params(grid, i)`` for an interior cell.

        A = (dx_prev + dx) / (dx + dx_next)
        B = 2 dx / (dx + dx_next)
    """
    if isinstance(sizes_left, Grid1D):
        grid, i = sizes_left, int(size_mid)
        if not 0 < i < grid.n - 1:
            raise GridError(f"cell {i} has no neighbour on both sides; pass ghost sizes explicitly")
        dm, d0, dp = grid.sizes[i - 1], grid.sizes[i], grid.sizes[i + 1]
        return (dm + d0) / (d0 + dp), 2.0 * d0 / (d0 + dp)
    dm, d0, dp = sizes_left, size_mid, sizes_right
    return (dm + d0) / (d0 + dp), 2.0 * d0 / (d0 + dp)


def params_from_padded_sizes(dx_padded: np.ndarray):
    """A, B for cells 1..len-2 of a ghost-padded size array.

    Returned arrays have the same length as the input; the two end entries
    are set to 1 (they are never used for reconstruction).
    """
    dx = np.asarray(dx_padded, dtype=float)
    A = np.ones_like(dx)
    B = np.ones_like(dx)
    A[1:-1], B[1:-1] = cell_params(dx[:-2], dx[1:-1], dx[2:])
    return A, B


def write_grid_csv(grid: Grid1D, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["face"])
        for f in grid.faces:
            w.writerow([repr(float(f))])


def read_grid_csv(path) -> Grid1D:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["face"]:
        raise GridError(f"{path}: expected header 'face'")
    return Grid1D(np.array([float(r[0]) for r in rows[1:] if r]))


def write_grid2d_csv(grid: Grid2D, stem) -> tuple[Path, Path]:
    """Write ``<stem>_x.csv`` and ``<stem>_y.csv``."""
    stem = Path(stem)
    px = stem.with_name(stem.name + "_x.csv")
    py = stem.with_name(stem.name + "_y.csv")
    write_grid_csv(grid.x_axis, px)
    write_grid_csv(grid.y_axis, py)
    return px, py


def read_grid2d_csv(stem) -> Grid2D:
    stem = Path(stem)
    return Grid2D(read_grid_csv(stem.with_name(stem.name + "_x.csv")),
                  read_grid_csv(stem.with_name(stem.name + "_y.csv")))
