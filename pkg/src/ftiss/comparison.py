"""Comparison functions (classes K, K-infinity, GKL) and the finite-time
decay-plus-gain envelope built from a Lyapunov decay rate.

The disturbance-free decay bound solves ``dV/dt = -M V**sigma0`` exactly:

    beta1(s, t) = (s**(1 - sigma0) - M (1 - sigma0) t) ** (1 / (1 - sigma0))

for ``t < T(s) = s**(1 - sigma0) / (M (1 - sigma0))`` and zero afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, ParameterError, RangeError

KINDS = ("power-law", "composition", "inverse-of")


@dataclass(frozen=True)
class KFunSpec:
    """A class-K function assembled from power laws.

    ``power-law`` is ``coefficient * s**exponent``. ``composition`` applies
    ``parts`` right to left, so ``parts=(f, g)`` is ``f(g(s))``. ``inverse-of``
    inverts ``parts[0]`` numerically.
    """

    kind: str = "power-law"
    coefficient: float = 1.0
    exponent: float = 1.0
    parts: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown K-function kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "power-law":
            if not (self.coefficient > 0 and self.exponent > 0):
                raise ParameterError("power-law needs positive coefficient and exponent")
        elif self.kind == "composition" and len(self.parts) < 1:
            raise ParameterError("composition needs at least one part")
        elif self.kind == "inverse-of" and len(self.parts) != 1:
            raise ParameterError("inverse-of takes exactly one part")

    def __call__(self, s):
        return kfun_eval(self, s)

    @property
    def unbounded(self) -> bool:
        # every building block is a power law, hence K-infinity
        return True


def power_law(coefficient: float, exponent: float) -> KFunSpec:
    return KFunSpec("power-law", float(coefficient), float(exponent))


def identity() -> KFunSpec:
    return power_law(1.0, 1.0)


def compose(*specs: KFunSpec) -> KFunSpec:
    return KFunSpec("composition", parts=tuple(specs))


def inverse_of(spec: KFunSpec) -> KFunSpec:
    return KFunSpec("inverse-of", parts=(spec,))


def kfun_eval(spec: KFunSpec, s):
    """Evaluate ``spec`` at ``s >= 0`` (scalar or array)."""
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"K-functions are defined on [0, inf), got {s!r}")
    if spec.kind == "power-law":
        out = spec.coefficient * arr**spec.exponent
    elif spec.kind == "composition":
        out = arr
        for part in reversed(spec.parts):
            out = kfun_eval(part, out)
    else:
        inner = spec.parts[0]
        if arr.ndim == 0:
            out = np.asarray(kfun_inverse(inner, float(arr)))
        else:
            out = np.array([kfun_inverse(inner, float(v)) for v in arr.ravel()]).reshape(arr.shape)
    return float(out) if np.ndim(out) == 0 else out


def kfun_inverse(spec: KFunSpec, v: float, tol: float = 1e-10) -> float:
    """Solve ``spec(s) = v`` by bracketing root search.

    The upper bracket doubles until it covers ``v``. The result satisfies
    ``|spec(s) - v| <= tol * max(1, v)``.
    """
    if v < 0 or math.isnan(v):
        raise DomainError(f"inverse needs v >= 0, got {v!r}")
    if v == 0:
        return 0.0
    hi = 1.0
    while kfun_eval(spec, hi) < v:
        hi *= 2.0
        if hi > 1e300:
            raise RangeError(f"value {v!r} lies above the range of {spec!r}")
    lo = 0.0 if hi == 1.0 else hi / 2.0
    s = brentq(lambda x: kfun_eval(spec, x) - v, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(kfun_eval(spec, s) - v) > tol * max(1.0, v):
        raise RangeError(f"inverse of {spec!r} at {v!r} did not reach tolerance {tol}")
    return s


def _check_decay(M, sigma0):
    if not M > 0:
        raise ParameterError(f"decay modulus M must be positive, got {M!r}")
    if not 0 < sigma0 < 1:
        raise ParameterError(f"sigma0 must lie in (0, 1), got {sigma0!r}")


def gkl_settling(s, M: float, sigma0: float):
    """Settling function ``T(s) = s**(1-sigma0) / (M (1-sigma0))``."""
    _check_decay(M, sigma0)
    a = 1.0 - sigma0
    out = np.asarray(s, dtype=float) ** a / (M * a)
    return float(out) if out.ndim == 0 else out


def gkl_beta1(s, t, M: float, sigma0: float):
    """Finite-time decay bound for ``V`` starting at ``s``; exactly 0 once ``t >= T(s)``."""
    _check_decay(M, sigma0)
    a = 1.0 - sigma0
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    sa = s**a
    base = sa - M * a * t
    # compare against T(s) itself so beta1(s, T(s)) is exactly 0 despite rounding in base
    alive = (base > 0) & (t < sa / (M * a))
    out = np.where(alive, np.maximum(base, 0.0) ** (1.0 / a), 0.0)
    # at t = 0 the exponents cancel; return s itself rather than a rounded round trip
    out = np.where(t <= 0, s, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GKLEnvelope:
    """FTISS envelope ``beta(||x0||, t) + rho(||u||)`` for the quadratic sandwich
    ``mu1 ||x||^2 <= V(x) <= mu2 ||x||^2``.
    """

    M: float
    sigma0: float
    mu1: float
    mu2: float
    chi: KFunSpec

    def __post_init__(self):
        _check_decay(self.M, self.sigma0)
        if not (self.mu1 > 0 and self.mu2 >= self.mu1):
            raise ParameterError(f"need 0 < mu1 <= mu2, got mu1={self.mu1}, mu2={self.mu2}")

    def alpha1(self, s):
        return self.mu1 * np.asarray(s, dtype=float) ** 2

    def alpha2(self, s):
        return self.mu2 * np.asarray(s, dtype=float) ** 2

    def settling(self, s0):
        """Time after which ``beta(s0, t)`` vanishes."""
        return gkl_settling(self.alpha2(s0), self.M, self.sigma0)

    def beta(self, s0, t):
        out = np.sqrt(np.asarray(gkl_beta1(self.alpha2(s0), t, self.M, self.sigma0)) / self.mu1)
        return float(out) if out.ndim == 0 else out

    def rho(self, u_norm):
        """Gain ``alpha1^-1 o alpha2 o chi``, which reduces to ``sqrt(mu2/mu1) chi``."""
        return math.sqrt(self.mu2 / self.mu1) * kfun_eval(self.chi, u_norm)

    def rho_composed(self, u_norm):
        """Same gain evaluated through the generic composition and inversion path."""
        alpha1 = power_law(self.mu1, 2.0)
        alpha2 = power_law(self.mu2, 2.0)
        return kfun_eval(compose(inverse_of(alpha1), alpha2, self.chi), u_norm)

    def __call__(self, s0, t, u_norm=0.0):
        return envelope_eval(self, s0, t, u_norm)


def envelope_eval(env: GKLEnvelope, s0, t, u_norm=0.0):
    """Upper bound on ``||x(t)||`` given ``||x(0)|| = s0`` and input sup-norm ``u_norm``."""
    return env.beta(s0, t) + env.rho(u_norm)
