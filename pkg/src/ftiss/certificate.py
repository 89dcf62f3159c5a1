"""Dissipation certificates and the gains and settling times they imply.

A certificate ``(b, c, tau, zeta, mu1, mu2)`` asserts the structural
inequality ``dV/dt <= -b ||x||^tau + c ||x|| zeta(||u||)`` for the quadratic
functional ``V`` sandwiched between ``mu1 ||x||^2`` and ``mu2 ||x||^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .comparison import GKLEnvelope, KFunSpec, compose, identity, power_law
from .errors import ParameterError


@dataclass(frozen=True)
class DissipationCert:
    b: float
    c: float
    tau: float
    zeta: KFunSpec
    mu1: float
    mu2: float

    def __post_init__(self):
        if not self.b > 0:
            raise ParameterError(f"b must be positive, got {self.b}")
        if not self.c > 0:
            raise ParameterError(f"c must be positive, got {self.c}")
        if not 1 < self.tau < 2:
            raise ParameterError(f"tau must lie in (1, 2), got {self.tau}")
        if not (self.mu1 > 0 and self.mu2 >= self.mu1):
            raise ParameterError(f"need 0 < mu1 <= mu2, got mu1={self.mu1}, mu2={self.mu2}")


@dataclass(frozen=True)
class PDEParams:
    """Reaction gain ``k`` and sublinearity exponent ``r`` of the parabolic model.

    ``k = 0`` switches the reaction off; it is accepted for diffusion-only
    checks but has no certificate.
    """

    k: float = 2.0
    r: float = 0.6

    def __post_init__(self):
        if not (self.k >= 0 and math.isfinite(self.k)):
            raise ParameterError(f"k must be a finite nonnegative number, got {self.k}")
        if not 0 < self.r < 1:
            raise ParameterError(f"r must lie in (0, 1), got {self.r}")

    @property
    def eps_sup(self) -> float:
        """Supremum of admissible Young parameters, ``1 / (2 sqrt(k))``."""
        return 1.0 / (2.0 * math.sqrt(self.k))


def derive_gains(cert: DissipationCert, eps0: float | None = None) -> GKLEnvelope:
    """Turn a certificate into an envelope; ``eps0`` defaults to ``b / 2``.

    ``sigma0 = tau/2``, ``M = (b - eps0) mu2**(-tau/2)`` and
    ``chi(s) = (c zeta(s) / eps0)**(1/(tau-1))``.
    """
    if eps0 is None:
        eps0 = cert.b / 2.0
    if not 0 < eps0 < cert.b:
        raise ParameterError(f"eps0 must lie in (0, b) = (0, {cert.b}), got {eps0}")
    sigma0 = cert.tau / 2.0
    M = (cert.b - eps0) * cert.mu2 ** (-cert.tau / 2.0)
    expo = 1.0 / (cert.tau - 1.0)
    # (c z / eps0)**expo as a power law applied to z = zeta(s)
    chi = power_law((cert.c / eps0) ** expo, expo)
    if cert.zeta != identity():
        chi = compose(chi, cert.zeta)
    return GKLEnvelope(M=M, sigma0=sigma0, mu1=cert.mu1, mu2=cert.mu2, chi=chi)


def settling_bound_abstract(cert: DissipationCert, V0: float) -> float:
    """Settling-time bound in the limit ``eps0 -> 0``:
    ``2 mu2**(tau/2) / ((2 - tau) b) * V0**(1 - tau/2)``.
    """
    if V0 < 0:
        raise ParameterError(f"V0 must be nonnegative, got {V0}")
    return 2.0 * cert.mu2 ** (cert.tau / 2.0) / ((2.0 - cert.tau) * cert.b) * V0 ** (1.0 - cert.tau / 2.0)


def default_eps(params: PDEParams) -> float:
    """90% of the admissible supremum."""
    return 0.9 * params.eps_sup


def pde_certificate(params: PDEParams, eps: float | None = None) -> DissipationCert:
    """Certificate of the sublinear parabolic model with ``V = ||w||^2``.

    ``b = 16 k eps / (3 + r)``, ``tau = (3 + r) / 2``, ``c = 2``, ``zeta = id``,
    valid for ``0 < eps < 1 / (2 sqrt(k))``.
    """
    if not params.k > 0:
        raise ParameterError("the certificate needs k > 0")
    if eps is None:
        eps = default_eps(params)
    if not 0 < eps < params.eps_sup:
        raise ParameterError(f"eps must lie in (0, {params.eps_sup!r}) for k={params.k}, got {eps}")
    k, r = params.k, params.r
    return DissipationCert(
        b=16.0 * k * eps / (3.0 + r),
        c=2.0,
        tau=(3.0 + r) / 2.0,
        zeta=identity(),
        mu1=1.0,
        mu2=1.0,
    )


def pde_settling_bound(params: PDEParams, w0_norm: float) -> float:
    """``(3 + r) / (2 sqrt(k) (1 - r)) * ||w0||**((1 - r)/2)``."""
    if w0_norm < 0:
        raise ParameterError(f"w0_norm must be nonnegative, got {w0_norm}")
    if not params.k > 0:
        raise ParameterError("the settling bound needs k > 0")
    k, r = params.k, params.r
    return (3.0 + r) / (2.0 * math.sqrt(k) * (1.0 - r)) * w0_norm ** ((1.0 - r) / 2.0)


def pde_envelope(params: PDEParams, eps: float | None = None, eps0: float | None = None) -> GKLEnvelope:
    """Envelope of the parabolic model with the default parameter choices."""
    return derive_gains(pde_certificate(params, eps), eps0)
