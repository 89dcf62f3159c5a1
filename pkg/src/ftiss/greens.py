"""Green's function of ``lam**2 u - u'' = g`` with ``u(0) = 0``, ``u'(1) = 0``,
quadrature solves of that problem, and an empirical scan of the resolvent
bound ``|lam**2| ||u|| <= M ||g||`` over a complex sector.

For ``lo = min(x, y)``, ``hi = max(x, y)`` the kernel is

    G = [sinh(lam (lo + hi - 1)) + sinh(lam (1 + lo - hi))] / (2 lam cosh lam),

evaluated after multiplying numerator and denominator by ``exp(-lam)`` so
every exponential has nonpositive real part.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import ParameterError
from .field import Field, Grid1D, lp_norm

_ROW_CHUNK = 512
# sinh(lam y) overflows double precision beyond Re lam ~ 700
_SEPARABLE_MU_MAX = 300.0


@dataclass(frozen=True)
class ComplexSpectral:
    """``lam = rho * exp(i theta)`` with ``rho > 0`` and ``|theta| < pi/2``."""

    rho: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho}")
        if not abs(self.theta) < math.pi / 2:
            raise ParameterError(f"theta must lie in (-pi/2, pi/2), got {self.theta}")

    @property
    def lam(self) -> complex:
        return cmath.rect(self.rho, self.theta)

    @property
    def mu(self) -> float:
        """Real part of ``lam``."""
        return self.rho * math.cos(self.theta)


def _kernel(lam: complex, x, y):
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    # each bracket vanishes exactly when lo == 0
    num = (np.exp(lam * (lo - hi)) - np.exp(-lam * (lo + hi))) + (
        np.exp(lam * (lo + hi - 2.0)) - np.exp(lam * (hi - lo - 2.0))
    )
    return num / (2.0 * lam * (1.0 + np.exp(-2.0 * lam)))


def greens_eval(lam: ComplexSpectral, x, y):
    """Kernel value ``G(x, y)``; broadcasts over array arguments."""
    out = _kernel(lam.lam, np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return complex(out) if np.ndim(out) == 0 else out


def greens_matrix(lam: ComplexSpectral, grid: Grid1D, rows=slice(None)) -> np.ndarray:
    y = grid.nodes
    return _kernel(lam.lam, y[rows, None], y[None, :])


def bvp_solve(lam: ComplexSpectral, g) -> np.ndarray:
    """Node values of ``u(x) = int_0^1 G(x, y) g(y) dy`` by composite trapezoid.

    The kernel's kink at ``y = x`` sits on a node, so the rule is applied
    separately on ``[0, x]`` and ``[x, 1]``. ``g`` is a :class:`Field` or a
    ``(n_nodes, m)`` array of several right-hand sides on the same grid.
    """
    grid, values = (g.grid, g.values) if isinstance(g, Field) else (None, np.asarray(g))
    if grid is None:
        raise ParameterError("bvp_solve needs a Field or use bvp_solve_many")
    return bvp_solve_many(lam, grid, values[:, None])[:, 0]


def bvp_solve_many(lam: ComplexSpectral, grid: Grid1D, g: np.ndarray) -> np.ndarray:
    """Column-wise :func:`bvp_solve` for a ``(n_nodes, m)`` array.

    Uses the factorization ``G = 2 sinh(lam lo) (exp(-lam hi) + exp(lam (hi - 2)))``
    over ``2 lam (1 + exp(-2 lam))`` with cumulative trapezoid sums on
    ``[0, x]`` and ``[x, 1]``. The second sum is accumulated from ``y = 1``
    downward so no large partial sums cancel.
    """
    if grid.n_cells < 100:
        raise ParameterError("bvp_solve needs n_cells >= 100")
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != grid.n_nodes:
        raise ParameterError(f"right-hand sides must have shape ({grid.n_nodes}, m)")
    z = lam.lam
    if lam.mu > _SEPARABLE_MU_MAX:
        return _bvp_dense(lam, grid, g)
    y = grid.nodes[:, None]
    left = 2.0 * np.sinh(z * y)
    right = np.exp(-z * y) + np.exp(z * (y - 2.0))
    lower = cumulative_trapezoid(left * g, dx=grid.h, axis=0, initial=0.0)
    upper = cumulative_trapezoid((right * g)[::-1], dx=grid.h, axis=0, initial=0.0)[::-1]
    return (right * lower + left * upper) / (2.0 * z * (1.0 + np.exp(-2.0 * z)))


def _bvp_dense(lam: ComplexSpectral, grid: Grid1D, g: np.ndarray) -> np.ndarray:
    """Kernel-matrix quadrature; slower but safe for any ``Re lam``."""
    w = np.full(grid.n_nodes, grid.h)
    w[[0, -1]] = grid.h / 2.0
    out = np.empty((grid.n_nodes, g.shape[1]), dtype=complex)
    for start in range(0, grid.n_nodes, _ROW_CHUNK):
        rows = slice(start, min(start + _ROW_CHUNK, grid.n_nodes))
        # node weights on [0, 1] equal the sum of the split-interval weights
        out[rows] = (greens_matrix(lam, grid, rows) * w) @ g
    return out


def bvp_residual(lam: ComplexSpectral, u: np.ndarray, g: Field) -> float:
    """Relative L2 residual of ``lam**2 u - u''`` against ``g`` on interior nodes."""
    h = g.grid.h
    upp = (u[:-2] - 2.0 * u[1:-1] + u[2:]) / h**2
    res = lam.lam**2 * u[1:-1] - upp - g.values[1:-1]
    num = math.sqrt(trapezoid(np.abs(res) ** 2, dx=h))
    den = math.sqrt(trapezoid(g.values[1:-1] ** 2, dx=h))
    return num / den


def _l2(values: np.ndarray, h: float) -> np.ndarray:
    return np.sqrt(trapezoid(np.abs(values) ** 2, dx=h, axis=0))


@dataclass
class ScanResult:
    m_hat: float
    table: list  # (rho, theta, g_id, ratio) rows
    theta0: float

    HEADER = ("rho", "theta", "g_id", "ratio")
    NOTE = ("ratio = |lam^2| ||u|| / ||g|| where u solves lam^2 u - u'' = g; "
            "lam is the BVP parameter and lam^2 the resolvent argument")

    def decade_maxima(self) -> dict:
        out = {}
        for rho, _, _, ratio in self.table:
            out[rho] = max(out.get(rho, 0.0), ratio)
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# {self.NOTE}\n")
            writer = csv.writer(fh)
            writer.writerow(self.HEADER)
            for rho, theta, gid, ratio in self.table:
                writer.writerow([f"{rho:.17g}", f"{theta:.17g}", gid, f"{ratio:.17g}"])


def theta_grid(theta0: float, theta_samples: int) -> np.ndarray:
    """Symmetric samples in ``[-0.9 theta0, 0.9 theta0]``."""
    if theta_samples == 1:
        return np.zeros(1)
    return np.linspace(-0.9 * theta0, 0.9 * theta0, theta_samples)


def sector_bound_scan(theta0: float, rho_grid, theta_samples: int, g_suite) -> ScanResult:
    """Largest observed ``|lam^2| ||u|| / ||g||`` over the sampled sector.

    Only ``|arg lam| < theta0 < pi/2`` is sampled; the wider sector in which the
    resolvent conclusion is stated is not probed.
    """
    if not math.pi / 4 < theta0 < math.pi / 2:
        raise ParameterError(f"theta0 must lie in (pi/4, pi/2), got {theta0}")
    g_suite = list(g_suite)
    if not g_suite:
        raise ParameterError("g_suite is empty")
    grid = g_suite[0].grid
    if any(g.grid != grid for g in g_suite):
        raise ParameterError("all suite fields must share a grid")
    g_mat = np.stack([g.values for g in g_suite], axis=1)
    g_norms = np.array([lp_norm(g, 2) for g in g_suite])
    table = []
    for rho in rho_grid:
        for theta in theta_grid(theta0, theta_samples):
            lam = ComplexSpectral(float(rho), float(theta))
            u = bvp_solve_many(lam, grid, g_mat)
            u_norms = _l2(u, grid.h)
            for gid, (un, gn) in enumerate(zip(u_norms, g_norms)):
                ratio = abs(lam.lam**2) * un / gn if gn > 0 else 0.0
                table.append((float(rho), float(theta), gid, float(ratio)))
    return ScanResult(max(row[3] for row in table), table, theta0)


def random_suite(n: int, grid: Grid1D, seed: int = 0, n_modes: int = 8) -> list[Field]:
    """Smooth random right-hand sides (no boundary constraint)."""
    rng = np.random.default_rng(seed)
    y = grid.nodes[:, None]
    suite = []
    for _ in range(n):
        a = rng.uniform(-1, 1, n_modes)
        b = rng.uniform(-1, 1, n_modes)
        m = np.arange(n_modes)
        suite.append(Field(grid, (a * np.cos(m * np.pi * y) + b * np.sin((m + 1) * np.pi * y)).sum(axis=1)))
    return suite
