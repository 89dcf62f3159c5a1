"""Trajectory diagnostics: forward Dini surrogates, dissipation and envelope
audits, and extinction detection."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .comparison import GKLEnvelope, envelope_eval, kfun_eval
from .pde import TrajectoryRecord

DEFAULT_SLACK = 1e-3


@dataclass
class AuditReport:
    total_steps: int
    applicable_steps: int
    violations: int
    worst_margin: float
    pass_fraction: float
    slack: float = DEFAULT_SLACK
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_float)

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if key == "extras":
                lines.extend(f"{k} = {_fmt(v)}" for k, v in value.items())
            else:
                lines.append(f"{key} = {_fmt(value)}")
        return "\n".join(lines)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _json_float(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value)}")


def dini_forward(values, times, i: int) -> float:
    """Forward difference quotient at index ``i``."""
    if not 0 <= i < len(values) - 1:
        raise IndexError(f"forward difference needs 0 <= i < {len(values) - 1}, got {i}")
    return float((values[i + 1] - values[i]) / (times[i + 1] - times[i]))


def dissipation_audit(traj: TrajectoryRecord, env: GKLEnvelope, slack: float = DEFAULT_SLACK,
                      threshold: float | None = None) -> AuditReport:
    """Check ``dV/dt <= -M V**sigma0`` on every recorded interval where the
    state dominates the input gain ``chi(sup ||f||)``.

    A step is a violation when the forward quotient exceeds
    ``-M V**sigma0 + slack * max(1, V)``. The margin is
    ``-M V**sigma0 - dV/dt``, so negative margins mark violations at zero slack.
    """
    if threshold is None:
        threshold = traj.extinction_threshold
    gate = kfun_eval(env.chi, traj.dist_sup_norm)
    V, l2, t = traj.v_values, traj.l2_norms, traj.times
    total = max(len(t) - 1, 0)
    applicable = violations = 0
    worst = math.inf
    for i in range(total):
        if l2[i] < gate or l2[i] <= threshold:
            continue
        applicable += 1
        bound = -env.M * V[i] ** env.sigma0
        rate = dini_forward(V, t, i)
        worst = min(worst, bound - rate)
        if rate > bound + slack * max(1.0, V[i]):
            violations += 1
    fraction = 1.0 - violations / applicable if applicable else 1.0
    return AuditReport(
        total_steps=total,
        applicable_steps=applicable,
        violations=violations,
        worst_margin=worst if applicable else 0.0,
        pass_fraction=fraction,
        slack=slack,
        extras={"chi_gate": gate, "dist_sup_norm": traj.dist_sup_norm},
    )


def envelope_ratios(traj: TrajectoryRecord, env: GKLEnvelope, u_norm: float | None = None) -> np.ndarray:
    """Per-record ratio ``||w(t)|| / envelope(t)``; ``inf`` where the envelope is 0 but the state is not."""
    if u_norm is None:
        u_norm = traj.dist_sup_norm
    s0 = traj.l2_norms[0]
    bound = np.asarray(envelope_eval(env, s0, traj.times - traj.times[0], u_norm), dtype=float)
    bound = np.broadcast_to(bound, traj.l2_norms.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(bound > 0, traj.l2_norms / np.where(bound > 0, bound, 1.0),
                          np.where(traj.l2_norms > 0, np.inf, 0.0))
    return ratios


def envelope_audit(traj: TrajectoryRecord, env: GKLEnvelope, u_norm: float | None = None) -> float:
    """Worst ratio of the state norm to the FTISS envelope; ``<= 1`` certifies the run.

    ``u_norm`` defaults to the recorded disturbance sup-norm.
    """
    return float(np.max(envelope_ratios(traj, env, u_norm)))


def extinction_time(traj: TrajectoryRecord, threshold: float = 1e-6) -> float | None:
    """First recorded time after which the norm stays at or below ``threshold``."""
    above = np.nonzero(traj.l2_norms > threshold)[0]
    if len(above) == 0:
        return float(traj.times[0])
    last = above[-1]
    if last == len(traj.times) - 1:
        return None
    return float(traj.times[last + 1])
