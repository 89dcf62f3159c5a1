"""JSON config parsing and the figure presets.

A config is a single JSON object whose keys mirror :class:`SimConfig`::

    {"params": {"k": 2, "r": 0.6},
     "init": {"kind": "paper-profile", "A1": 5},
     "dist": {"kind": "paper-sine", "A2": 20},
     "n_cells": 200, "dt": 0.001, "t_end": 6, "record_every": 10,
     "extinction_threshold": 1e-8, "early_stop": false}

``{"preset": "fig1a"}`` starts from a preset; other keys override it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .certificate import PDEParams
from .errors import ConfigError
from .field import Field, Grid1D
from .pde import DisturbanceSpec, InitSpec, SimConfig

# horizon for the figure runs; long enough for both amplitudes to die out
FIGURE_T_END = 6.0

_TOP_KEYS = {"preset", "params", "init", "dist", "n_cells", "dt", "t_end", "record_every",
             "extinction_threshold", "early_stop"}


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    description: str
    config: SimConfig
    audits: tuple = ("dissipation", "envelope", "extinction")


def _paper_config(A1: float, A2: float) -> SimConfig:
    dist = DisturbanceSpec("paper-sine", A2=A2) if A2 else DisturbanceSpec("zero")
    return SimConfig(params=PDEParams(k=2.0, r=0.6), init=InitSpec("paper-profile", A1=A1), dist=dist,
                     t_end=FIGURE_T_END)


PRESETS = {
    p.name: p
    for p in [
        ExperimentPreset("fig1a", "surface of w, A1=5, A2=0", _paper_config(5.0, 0.0)),
        ExperimentPreset("fig1b", "surface of w, A1=50, A2=0", _paper_config(50.0, 0.0)),
        ExperimentPreset("fig2a", "surface of w, A1=5, A2=20", _paper_config(5.0, 20.0)),
        ExperimentPreset("fig2b", "surface of w, A1=5, A2=40", _paper_config(5.0, 40.0)),
    ]
}

# norm-series figures: series label -> preset
SERIES_FIGURES = {
    "fig1c": {"A1=5": "fig1a", "A1=50": "fig1b"},
    "fig2c": {"A2=20": "fig2a", "A2=40": "fig2b"},
}
FIGURES = ("fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c")


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) or (isinstance(x, float) and x.is_integer())


def config_to_dict(config: SimConfig) -> dict:
    init = {"kind": config.init.kind}
    if config.init.kind == "paper-profile":
        init["A1"] = config.init.A1
    else:
        init["values"] = [float(v) for v in config.init.field.values]
    dist = {"kind": config.dist.kind}
    if config.dist.kind == "paper-sine":
        dist["A2"] = config.dist.A2
    elif config.dist.kind == "custom":
        raise ConfigError([("dist.kind", "custom disturbances have no JSON form")])
    return {
        "params": {"k": config.params.k, "r": config.params.r},
        "init": init,
        "dist": dist,
        "n_cells": config.n_cells,
        "dt": config.dt,
        "t_end": config.t_end,
        "record_every": config.record_every,
        "extinction_threshold": config.extinction_threshold,
        "early_stop": config.early_stop,
    }


def validate_config_dict(doc) -> list:
    """All ``(field, message)`` problems of a config document."""
    if not isinstance(doc, dict):
        return [("<root>", "config must be a JSON object")]
    if not doc:
        return [("<root>", "config is empty")]
    problems = [(key, "unknown field") for key in doc if key not in _TOP_KEYS]
    base = {}
    if "preset" in doc:
        if doc["preset"] not in PRESETS:
            problems.append(("preset", f"unknown preset {doc['preset']!r}; known: {sorted(PRESETS)}"))
        else:
            base = config_to_dict(PRESETS[doc["preset"]].config)
    merged = {**base, **{k: v for k, v in doc.items() if k != "preset"}}

    params = merged.get("params")
    if not isinstance(params, dict):
        problems.append(("params", "missing or not an object"))
    else:
        problems += [(f"params.{k}", "unknown field") for k in params if k not in ("k", "r")]
        k, r = params.get("k"), params.get("r")
        if not (_is_number(k) and k >= 0):
            problems.append(("params.k", f"must be a finite number >= 0, got {k!r}"))
        if not (_is_number(r) and 0 < r < 1):
            problems.append(("params.r", f"must lie in (0, 1), got {r!r}"))

    init = merged.get("init")
    if not isinstance(init, dict):
        problems.append(("init", "missing or not an object"))
    else:
        kind = init.get("kind")
        if kind == "paper-profile":
            problems += [(f"init.{k}", "unknown field") for k in init if k not in ("kind", "A1")]
            if not _is_number(init.get("A1")):
                problems.append(("init.A1", f"must be a finite number, got {init.get('A1')!r}"))
        elif kind == "custom":
            values = init.get("values")
            n = merged.get("n_cells")
            if not (isinstance(values, list) and all(_is_number(v) for v in values)):
                problems.append(("init.values", "must be a list of finite numbers"))
            elif _is_int(n) and len(values) != int(n) + 1:
                problems.append(("init.values", f"needs n_cells + 1 = {int(n) + 1} entries, got {len(values)}"))
        else:
            problems.append(("init.kind", f"must be 'paper-profile' or 'custom', got {kind!r}"))

    dist = merged.get("dist", {"kind": "zero"})
    if not isinstance(dist, dict):
        problems.append(("dist", "not an object"))
    else:
        kind = dist.get("kind")
        if kind == "paper-sine":
            problems += [(f"dist.{k}", "unknown field") for k in dist if k not in ("kind", "A2")]
            if not _is_number(dist.get("A2")):
                problems.append(("dist.A2", f"must be a finite number, got {dist.get('A2')!r}"))
        elif kind == "zero":
            problems += [(f"dist.{k}", "unknown field") for k in dist if k != "kind"]
        else:
            problems.append(("dist.kind", f"must be 'paper-sine' or 'zero', got {kind!r}"))

    n = merged.get("n_cells", 200)
    if not (_is_int(n) and n >= 2):
        problems.append(("n_cells", f"must be an integer >= 2, got {n!r}"))
    dt = merged.get("dt", 1e-3)
    t_end = merged.get("t_end", FIGURE_T_END)
    if not (_is_number(dt) and dt > 0):
        problems.append(("dt", f"must be a positive number, got {dt!r}"))
    if not (_is_number(t_end) and t_end >= 0):
        problems.append(("t_end", f"must be a nonnegative number, got {t_end!r}"))
    elif _is_number(dt) and dt > 0 and t_end > 0 and dt > t_end:
        problems.append(("dt", f"dt={dt} exceeds t_end={t_end}"))
    re = merged.get("record_every", 10)
    if not (_is_int(re) and re >= 1):
        problems.append(("record_every", f"must be a positive integer, got {re!r}"))
    thr = merged.get("extinction_threshold", 1e-8)
    if not (_is_number(thr) and thr > 0):
        problems.append(("extinction_threshold", f"must be a positive number, got {thr!r}"))
    es = merged.get("early_stop", False)
    if not isinstance(es, bool):
        problems.append(("early_stop", f"must be true or false, got {es!r}"))
    return problems


def config_from_dict(doc) -> SimConfig:
    problems = validate_config_dict(doc)
    if problems:
        raise ConfigError(problems)
    base = config_to_dict(PRESETS[doc["preset"]].config) if "preset" in doc else {}
    merged = {**base, **{k: v for k, v in doc.items() if k != "preset"}}
    n_cells = int(merged.get("n_cells", 200))
    init = merged["init"]
    if init["kind"] == "custom":
        init_spec = InitSpec("custom", field=Field(Grid1D(n_cells), init["values"]))
    else:
        init_spec = InitSpec("paper-profile", A1=float(init["A1"]))
    dist = merged.get("dist", {"kind": "zero"})
    dist_spec = DisturbanceSpec("paper-sine", A2=float(dist["A2"])) if dist["kind"] == "paper-sine" else DisturbanceSpec()
    return SimConfig(
        params=PDEParams(k=float(merged["params"]["k"]), r=float(merged["params"]["r"])),
        init=init_spec,
        dist=dist_spec,
        n_cells=n_cells,
        dt=float(merged.get("dt", 1e-3)),
        t_end=float(merged.get("t_end", FIGURE_T_END)),
        record_every=int(merged.get("record_every", 10)),
        extinction_threshold=float(merged.get("extinction_threshold", 1e-8)),
        early_stop=bool(merged.get("early_stop", False)),
    )


def load_config(path) -> SimConfig:
    """Read and validate a JSON config file; parse errors carry line numbers."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([("<file>", f"cannot read {path}: {exc.strerror}")]) from exc
    if not text.strip():
        raise ConfigError([("<root>", "config is empty")])
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([("<json>", f"line {exc.lineno} column {exc.colno}: {exc.msg}")]) from exc
    return config_from_dict(doc)
