"""MUSCL finite volumes with grid-aware slope limiters on non-uniform meshes."""
from ._backend import BACKEND
from .euler import GasModel, NonPhysicalStateError
from .limiters import LimiterParams, LimiterSpec, eval_limiter
from .mesh import Grid1D, Grid2D, make_grid, make_grid_2d
from .problems import get_problem
from .solver import Field, Scheme, TimeControls, run

__all__ = [
    "BACKEND", "Field", "GasModel", "Grid1D", "Grid2D", "LimiterParams", "LimiterSpec",
    "NonPhysicalStateError", "Scheme", "TimeControls", "eval_limiter", "get_problem",
    "make_grid", "make_grid_2d", "run",
]
__version__ = "0.1.0"
