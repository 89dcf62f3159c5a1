import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from ftiss.errors import ParameterError
from ftiss.field import Field, Grid1D, derivative, linf_norm, lp_norm, lyapunov_v


def paper_w0(y, A1=5.0):
    return A1 * np.sqrt(y + 0.5) * np.cos(3 * np.pi * y)


@pytest.fixture
def grid():
    return Grid1D(200)


def test_grid_nodes():
    g = Grid1D(7)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 1.0
    assert len(g.nodes) == 8
    assert g.h * g.n_cells == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ParameterError):
        Grid1D(0)


def test_field_is_immutable(grid):
    f = Field.zeros(grid)
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(AttributeError):
        f.values = np.ones(grid.n_nodes)


def test_field_rejects_bad_values(grid):
    with pytest.raises(ParameterError):
        Field(grid, np.ones(5))
    with pytest.raises(ParameterError):
        Field(grid, np.full(grid.n_nodes, np.nan))


class TestLp:
    def test_constant(self, grid):
        one = Field(grid, np.ones(grid.n_nodes))
        for p in (1, 1.5, 2, 7):
            assert lp_norm(one, p) == pytest.approx(1.0, rel=1e-14)

    def test_linear(self):
        g = Grid1D(2000)
        assert lp_norm(g.sample(lambda y: y), 2) == pytest.approx(1 / math.sqrt(3), rel=1e-6)

    def test_paper_profile(self):
        exact = math.sqrt(25 * quad(lambda y: (y + 0.5) * math.cos(3 * math.pi * y) ** 2, 0, 1, limit=200)[0])
        assert exact == pytest.approx(math.sqrt(12.5), rel=1e-12)
        g = Grid1D(2000)
        assert lp_norm(g.sample(paper_w0), 2) == pytest.approx(exact, rel=1e-5)

    def test_p_below_one(self, grid):
        with pytest.raises(ParameterError):
            lp_norm(Field.zeros(grid), 0.5)

    def test_refinement_order(self):
        f = lambda y: np.exp(y) * np.sin(2 * y)  # noqa: E731
        exact = math.sqrt(quad(lambda y: f(y) ** 2, 0, 1, epsabs=1e-13, epsrel=1e-12)[0])
        errs = [abs(lp_norm(Grid1D(n).sample(f), 2) - exact) for n in (50, 100, 200)]
        orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
        assert min(orders) >= 1.9

    def test_holder_ordering(self):
        g = Grid1D(2000)
        for f in (lambda y: np.sin(5 * y) + y, lambda y: np.exp(-3 * y), lambda y: y**3 - 0.2):
            fld = g.sample(f)
            norms = [lp_norm(fld, p) for p in (1, 1.5, 2, 3, 6)]
            for a, b in zip(norms, norms[1:]):
                assert a <= b * (1 + 1e-6)

    @given(st.floats(-1e3, 1e3).filter(lambda a: abs(a) > 1e-6), st.integers(0, 2**31), st.sampled_from([1.0, 1.6, 2.0, 3.0]))
    def test_homogeneity_and_triangle(self, alpha, seed, p):
        g = Grid1D(64)
        rng = np.random.default_rng(seed)
        f = Field(g, rng.normal(size=g.n_nodes))
        h = Field(g, rng.normal(size=g.n_nodes))
        assert lp_norm(alpha * f, p) == pytest.approx(abs(alpha) * lp_norm(f, p), rel=1e-14)
        assert lp_norm(f + h, p) <= lp_norm(f, p) + lp_norm(h, p) + 1e-12


class TestLinf:
    def test_examples(self, grid):
        assert linf_norm(Field.zeros(grid)) == 0.0
        assert linf_norm(grid.sample(lambda y: y)) == 1.0
        assert linf_norm(grid.sample(lambda y: np.sin(np.pi * y))) == pytest.approx(1.0, abs=1e-4)


class TestDerivative:
    def test_affine_exact(self, grid):
        d = derivative(grid.sample(lambda y: 3.5 * y - 2.0))
        assert np.allclose(d.values, 3.5, rtol=0, atol=1e-11)

    def test_constant(self, grid):
        assert np.allclose(derivative(Field(grid, np.full(grid.n_nodes, 4.2))).values, 0.0, atol=1e-12)

    def test_quadratic_second_order(self):
        errs = []
        for n in (20, 40, 80):
            g = Grid1D(n)
            errs.append(np.max(np.abs(derivative(g.sample(lambda y: np.sin(3 * y))).values - 3 * np.cos(3 * g.nodes))))
        assert math.log2(errs[0] / errs[1]) > 1.8 and math.log2(errs[1] / errs[2]) > 1.8
        g = Grid1D(10)
        assert np.allclose(derivative(g.sample(lambda y: y**2)).values, 2 * g.nodes, atol=1e-12)

    def test_too_coarse(self):
        with pytest.raises(ParameterError):
            derivative(Field.zeros(Grid1D(1)))


class TestLyapunov:
    def test_values(self, grid):
        assert lyapunov_v(Field.zeros(grid)) == 0.0
        assert lyapunov_v(Field(grid, np.ones(grid.n_nodes))) == pytest.approx(1.0)
        assert lyapunov_v(Grid1D(2000).sample(paper_w0)) == pytest.approx(12.5, rel=1e-5)


def test_csv_roundtrip(tmp_path, grid):
    f = grid.sample(lambda y: np.exp(y) / 3)
    f.to_csv(tmp_path / "f.csv")
    g = Field.from_csv(tmp_path / "f.csv")
    assert np.array_equal(g.values, f.values)
    assert g.grid == f.grid
