"""Numerical checks of the sup-norm interpolation inequality

    ||v||_inf <= delta**(-delta) ||v_y||_p**delta ||v||_q**(1 - delta),
    delta (1/q + 1 - 1/p) = 1/q,

for fields with ``v(0) = 0``, and of the Young-type estimate derived from it

    ||v||_2**((3+r)/2) <= (3+r) eps / 2 ||v_y||_2**2 + (3+r) / (8 eps) ||v||_{1+r}**(1+r).
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ParameterError, PreconditionError
from .field import DEFAULT_ORACLE_CELLS, Field, Grid1D, derivative, linf_norm, lp_norm

PQ_GRID = (1.5, 2.0, 3.0)
R_GRID = (0.2, 0.6, 0.9)
EPS_GRID = (0.1, 1.0, 10.0)
DEFAULT_SLACK = 1e-3
MAX_MODES = 16


class Gap(NamedTuple):
    lhs: float
    rhs: float
    margin: float


@dataclass(frozen=True)
class InterpParams:
    p: float
    q: float
    delta: float

    def __post_init__(self):
        residual = self.delta * (1.0 / self.q + 1.0 - 1.0 / self.p) - 1.0 / self.q
        if abs(residual) > 1e-12:
            raise ParameterError(f"delta={self.delta} does not match p={self.p}, q={self.q}")

    @classmethod
    def from_pq(cls, p: float, q: float) -> "InterpParams":
        return cls(p, q, delta_from_pq(p, q))


def delta_from_pq(p: float, q: float) -> float:
    """Exponent ``delta = p / (p + p q - q)`` in (0, 1)."""
    if not (1 < p < np.inf and 1 < q < np.inf):
        raise ParameterError(f"p and q must lie in (1, inf), got p={p}, q={q}")
    delta = p / (p + p * q - q)
    assert 0 < delta < 1
    return delta


def _require_pinned(v: Field):
    if v.values[0] != 0.0:
        raise PreconditionError(f"field must vanish at y = 0, got v(0) = {v.values[0]!r}")


def interpolation_gap(v: Field, p: float, q: float) -> Gap:
    _require_pinned(v)
    delta = delta_from_pq(p, q)
    lhs = linf_norm(v)
    rhs = delta**-delta * lp_norm(derivative(v), p) ** delta * lp_norm(v, q) ** (1.0 - delta)
    return Gap(lhs, rhs, rhs - lhs)


def corollary_gap(v: Field, r: float, eps: float) -> Gap:
    _require_pinned(v)
    if not 0 < r < 1:
        raise ParameterError(f"r must lie in (0, 1), got {r}")
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    lhs = lp_norm(v, 2) ** ((3.0 + r) / 2.0)
    rhs = (3.0 + r) * eps / 2.0 * lp_norm(derivative(v), 2) ** 2 + (3.0 + r) / (8.0 * eps) * lp_norm(v, 1.0 + r) ** (1.0 + r)
    return Gap(lhs, rhs, rhs - lhs)


def random_test_field(seed: int, n_modes: int, grid: Grid1D, bound: float = 1.0) -> Field:
    """Band-limited random field vanishing at ``y = 0``.

    ``v(y) = sum_m a_m sin(w_m y) + b_m (cos(w_m y) - 1)`` with ``w_m = (m - 1/2) pi``,
    ``|a_m| <= bound`` and ``|b_m| <= bound / 2``, so each mode is bounded by
    ``2 * bound``.
    """
    if not 1 <= n_modes <= MAX_MODES:
        raise ParameterError(f"n_modes must lie in [1, {MAX_MODES}], got {n_modes}")
    rng = np.random.default_rng(seed)
    a = rng.uniform(-bound, bound, n_modes)
    b = rng.uniform(-bound / 2.0, bound / 2.0, n_modes)
    omega = (np.arange(1, n_modes + 1) - 0.5) * np.pi
    y = grid.nodes[:, None]
    values = (a * np.sin(omega * y) + b * (np.cos(omega * y) - 1.0)).sum(axis=1)
    values[0] = 0.0
    return Field(grid, values)


def harness_modes(seed: int) -> int:
    return 1 + seed % MAX_MODES


@dataclass
class HarnessRow:
    seed: int
    p: float
    q: float
    lhs: float
    rhs: float
    margin: float

    @property
    def relative_margin(self) -> float:
        return self.margin / self.rhs if self.rhs > 0 else 0.0


def lemma_harness(seeds, n_cells: int = DEFAULT_ORACLE_CELLS, pq_grid=PQ_GRID) -> list[HarnessRow]:
    grid = Grid1D(n_cells)
    rows = []
    for seed in seeds:
        v = random_test_field(seed, harness_modes(seed), grid)
        for p, q in itertools.product(pq_grid, pq_grid):
            rows.append(HarnessRow(seed, p, q, *interpolation_gap(v, p, q)))
    return rows


def corollary_harness(seeds, n_cells: int = DEFAULT_ORACLE_CELLS, r_grid=R_GRID, eps_grid=EPS_GRID) -> list[HarnessRow]:
    """Rows reuse the ``(p, q)`` columns for ``(r, eps)``."""
    grid = Grid1D(n_cells)
    rows = []
    for seed in seeds:
        v = random_test_field(seed, harness_modes(seed), grid)
        for r, eps in itertools.product(r_grid, eps_grid):
            rows.append(HarnessRow(seed, r, eps, *corollary_gap(v, r, eps)))
    return rows


def count_violations(rows, slack: float = DEFAULT_SLACK) -> int:
    return sum(1 for row in rows if row.margin < -slack * row.rhs)


def sharpness(rows) -> float:
    """Smallest ``margin / rhs`` observed; reported, not asserted."""
    return min(row.relative_margin for row in rows)


def refinement_trend(rows, n_worst: int = 10, levels=(DEFAULT_ORACLE_CELLS, 2 * DEFAULT_ORACLE_CELLS)):
    """Recompute the ``n_worst`` lemma cases on refined grids.

    Returns ``(row, [relative margin per level])`` pairs.
    """
    worst = sorted(rows, key=lambda row: row.relative_margin)[:n_worst]
    out = []
    for row in worst:
        margins = []
        for n in levels:
            v = random_test_field(row.seed, harness_modes(row.seed), Grid1D(n))
            gap = interpolation_gap(v, row.p, row.q)
            margins.append(gap.margin / gap.rhs)
        out.append((row, margins))
    return out


def write_harness_csv(rows, path, header=("seed", "p", "q", "lhs", "rhs", "margin")) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([row.seed] + [f"{x:.17g}" for x in (row.p, row.q, row.lhs, row.rhs, row.margin)])
