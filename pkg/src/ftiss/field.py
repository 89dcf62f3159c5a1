"""Uniform grids on [0, 1], sampled fields and their quadrature norms.

All integral norms use the composite trapezoid rule, which is exact for
piecewise-linear interpolants of the node values and second order for
smooth functions.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from .errors import ParameterError

DEFAULT_SIM_CELLS = 200
DEFAULT_ORACLE_CELLS = 2000


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with ``n_cells`` cells covering [0, 1]."""

    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ParameterError(f"n_cells must be a positive integer, got {self.n_cells!r}")
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @cached_property
    def nodes(self) -> np.ndarray:
        # i / n instead of i * h so the last node is exactly 1.0
        y = np.arange(self.n_cells + 1, dtype=float) / self.n_cells
        y.setflags(write=False)
        return y

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    def sample(self, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        """Evaluate a vectorized function at the nodes."""
        return Field(self, np.broadcast_to(func(self.nodes), (self.n_nodes,)))


class Field:
    """Node values ``w(y_i)`` of a real function on a :class:`Grid1D`.

    Instances are immutable: the value array is copied and locked.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid1D, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n_nodes,):
            raise ParameterError(
                f"field needs {grid.n_nodes} values for n_cells={grid.n_cells}, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ParameterError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @classmethod
    def zeros(cls, grid: Grid1D) -> "Field":
        return cls(grid, np.zeros(grid.n_nodes))

    def __mul__(self, alpha: float) -> "Field":
        return Field(self.grid, alpha * self.values)

    __rmul__ = __mul__

    def __add__(self, other: "Field") -> "Field":
        if other.grid != self.grid:
            raise ParameterError("fields live on different grids")
        return Field(self.grid, self.values + other.values)

    def __repr__(self):
        return f"Field(n_cells={self.grid.n_cells}, max|w|={np.max(np.abs(self.values)):.4g})"

    def to_csv(self, path) -> None:
        """Write ``(y, value)`` rows with 17 significant digits."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y", "value"])
            for y, v in zip(self.grid.nodes, self.values):
                writer.writerow([f"{y:.17g}", f"{v:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "Field":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        values = [float(row["value"]) for row in rows]
        return cls(Grid1D(len(values) - 1), values)


def lp_norm(f: Field, p: float) -> float:
    """Trapezoid approximation of ``(int_0^1 |f|^p dy)^(1/p)`` for ``p >= 1``."""
    if not p >= 1:
        raise ParameterError(f"L^p norm needs p >= 1, got p={p}")
    a = np.abs(f.values)
    scale = a.max()
    if scale == 0.0:
        return 0.0
    # factor out the sup so large fields and large p do not overflow
    return float(scale * trapezoid((a / scale) ** p, dx=f.grid.h) ** (1.0 / p))


def linf_norm(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


def derivative(f: Field) -> Field:
    """Second-order finite-difference derivative.

    Central differences inside, one-sided three-point stencils at the ends.
    """
    if f.grid.n_cells < 2:
        raise ParameterError("derivative needs at least 2 cells")
    return Field(f.grid, np.gradient(f.values, f.grid.h, edge_order=2))


def lyapunov_v(f: Field) -> float:
    """The quadratic functional ``V(w) = ||w||_{L^2}^2``."""
    return lp_norm(f, 2) ** 2
