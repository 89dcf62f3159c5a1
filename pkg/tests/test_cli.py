import copy
import json
import math

import numpy as np
import pytest

from ftiss.cli import main
from ftiss.field import Grid1D
from ftiss.pde import InitSpec, init_field
from ftiss.presets import PRESETS, config_from_dict, config_to_dict, validate_config_dict

SMALL = {
    "params": {"k": 2, "r": 0.6},
    "init": {"kind": "paper-profile", "A1": 5},
    "dist": {"kind": "paper-sine", "A2": 20},
    "n_cells": 40,
    "dt": 0.01,
    "t_end": 0.5,
    "record_every": 5,
    "extinction_threshold": 1e-8,
    "early_stop": False,
}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


class TestSimulate:
    def test_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["simulate", write(tmp_path, SMALL), "--out", str(out)]) == 0
        for name in ("trajectory.csv", "snapshots.csv", "audit.json"):
            assert (out / name).exists()
        audit = json.loads((out / "audit.json").read_text())
        assert audit["dist_sup_norm_analytic"] == 20.0
        assert audit["envelope_ratio"] <= 1.0

    def test_deterministic(self, tmp_path):
        outs = []
        for i in range(2):
            out = tmp_path / f"o{i}"
            assert main(["simulate", write(tmp_path, SMALL), "--out", str(out)]) == 0
            outs.append({n: (out / n).read_bytes() for n in ("trajectory.csv", "snapshots.csv", "audit.json")})
        assert outs[0] == outs[1]

    def test_env_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FTISS_OUT_DIR", str(tmp_path / "env"))
        assert main(["simulate", write(tmp_path, SMALL)]) == 0
        assert (tmp_path / "env" / "trajectory.csv").exists()

    def test_preset_fig1a(self, tmp_path, capsys):
        out = tmp_path / "fig1a"
        assert main(["simulate", write(tmp_path, {"preset": "fig1a"}), "--out", str(out)]) == 0
        audit = json.loads((out / "audit.json").read_text())
        assert audit["extinction_time"] is not None
        assert audit["extinction_time"] <= 4.0962
        assert audit["dissipation_audit"]["pass_fraction"] >= 0.99

    def test_preset_fig2b(self, tmp_path):
        out = tmp_path / "fig2b"
        assert main(["simulate", write(tmp_path, {"preset": "fig2b"}), "--out", str(out)]) == 0
        audit = json.loads((out / "audit.json").read_text())
        assert audit["extinction_time"] is None
        assert math.isfinite(audit["max_l2_norm"])

    @pytest.mark.parametrize("text", ["", "   ", "{}"])
    def test_empty_config(self, tmp_path, text, capsys):
        assert main(["simulate", write(tmp_path, text)]) == 2
        assert "empty" in capsys.readouterr().err

    def test_syntax_error_has_line(self, tmp_path, capsys):
        assert main(["simulate", write(tmp_path, '{\n  "dt": 0.1,\n  oops\n}')]) == 2
        assert "line 3" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["simulate", str(tmp_path / "nope.json")]) == 2

    def test_divergence_exit(self, tmp_path, capsys):
        doc = dict(SMALL, dist={"kind": "paper-sine", "A2": 1e308}, dt=0.1, t_end=100.0)
        assert main(["simulate", write(tmp_path, doc), "--out", str(tmp_path / "d")]) == 3
        assert "diverged at step" in capsys.readouterr().err


BREAKERS = [
    ("params", None), ("params", {}), ("params.k", -1), ("params.k", "2"), ("params.k", math.inf),
    ("params.r", 0), ("params.r", 1), ("params.r", 1.5), ("params.r", None), ("params.extra", 1),
    ("init", None), ("init", 5), ("init.kind", "gauss"), ("init.A1", "five"), ("init.A1", None),
    ("init.values", [1.0, 2.0]), ("init.A1", math.nan), ("init.extra", 3),
    ("dist", "zero"), ("dist.kind", "square"), ("dist.A2", None), ("dist.A2", "x"), ("dist.A2", math.inf),
    ("dist.extra", 1),
    ("n_cells", 0), ("n_cells", 1), ("n_cells", 2.5), ("n_cells", "200"), ("n_cells", True), ("n_cells", -10),
    ("dt", 0), ("dt", -0.1), ("dt", "small"), ("dt", 5.0), ("dt", None),
    ("t_end", -1), ("t_end", "long"), ("t_end", math.inf),
    ("record_every", 0), ("record_every", -2), ("record_every", 1.5), ("record_every", "10"),
    ("extinction_threshold", 0), ("extinction_threshold", -1e-8), ("extinction_threshold", "tiny"),
    ("early_stop", "yes"), ("early_stop", 1),
    ("preset", "fig9z"), ("bogus", 1), ("init.kind", None),
]


def broken(path, value):
    doc = copy.deepcopy(SMALL)
    if path == "init.values":
        doc["init"] = {"kind": "custom", "values": value}
        return doc
    parts = path.split(".")
    target = doc
    for p in parts[:-1]:
        target = target[p]
    target[parts[-1]] = value
    return doc


def test_fuzz_count():
    assert len(BREAKERS) >= 50


@pytest.mark.parametrize("path,value", BREAKERS, ids=[f"{p}={v!r}" for p, v in BREAKERS])
def test_validation_names_field(path, value, tmp_path, capsys):
    doc = broken(path, value)
    problems = validate_config_dict(doc)
    fields = [f for f, _ in problems]
    top = path.split(".")[0]
    assert any(f == path or f == top or f.startswith(top + ".") for f in fields), problems
    with open(tmp_path / "c.json", "w") as fh:
        fh.write(json.dumps(doc, allow_nan=True))
    assert main(["simulate", str(tmp_path / "c.json")]) == 2
    assert top in capsys.readouterr().err


def test_config_roundtrip():
    for preset in PRESETS.values():
        cfg = preset.config
        assert config_from_dict(config_to_dict(cfg)) == cfg
    custom = dict(SMALL, init={"kind": "custom", "values": list(np.linspace(0, 1, 41))})
    assert config_from_dict(custom).init.field.values[-1] == 1.0


def test_preset_override():
    cfg = config_from_dict({"preset": "fig2a", "t_end": 1.0})
    assert cfg.t_end == 1.0 and cfg.dist.A2 == 20.0


class TestVerify:
    def test_certificate(self, capsys):
        assert main(["verify", "certificate", "--k", "2", "--r", "0.6"]) == 0
        out = capsys.readouterr().out
        assert "tau = 1.8" in out
        assert "T*_bound = 4.096269456808" in out
        assert "T*_bound = 6.49214957658" in out

    def test_certificate_bad_eps(self, capsys):
        assert main(["verify", "certificate", "--eps", "0.5"]) == 2

    def test_inequality(self, tmp_path, capsys):
        assert main(["verify", "inequality", "--seeds", "20", "--out", str(tmp_path)]) == 0
        assert "violations = 0" in capsys.readouterr().out
        assert (tmp_path / "inequality_lemma.csv").read_text().startswith("seed,p,q,lhs,rhs,margin")

    def test_greens(self, tmp_path, capsys):
        assert main(["verify", "greens", "--rho", "0.1,1,10,100", "--out", str(tmp_path)]) == 0
        assert "m_hat = " in capsys.readouterr().out
        assert (tmp_path / "greens_scan.csv").exists()

    def test_greens_bad_rho(self, capsys):
        assert main(["verify", "greens", "--rho", "a,b"]) == 2

    def test_unknown_kind(self, capsys):
        assert main(["verify", "sorcery"]) == 2


class TestReproduce:
    def test_unknown(self, tmp_path, capsys):
        assert main(["reproduce", "fig3a", "--out", str(tmp_path)]) == 2

    def test_fig1a_initial_slice(self, tmp_path):
        assert main(["reproduce", "fig1a", "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "fig1a" / "snapshots.csv").read_text().splitlines()[1:]
        first = [r.split(",") for r in rows if float(r.split(",")[0]) == 0.0]
        w0 = init_field(InitSpec(A1=5.0), Grid1D(200)).values
        assert np.array_equal(np.array([float(r[2]) for r in first]), w0)

    def test_fig1c(self, tmp_path):
        assert main(["reproduce", "fig1c", "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "fig1c" / "norms.csv").read_text().splitlines()
        assert lines[0] == "series,t,l2_norm,log10_l2_norm"
        for label in ("A1=5", "A1=50"):
            series = [l.split(",") for l in lines[1:] if l.startswith(label + ",")]
            assert float(series[-1][2]) == 0.0 and series[-1][3] == "-inf"

    def test_fig2c(self, tmp_path):
        assert main(["reproduce", "fig2c", "--out", str(tmp_path)]) == 0
        lines = [l.split(",") for l in (tmp_path / "fig2c" / "norms.csv").read_text().splitlines()[1:]]
        a = np.array([[float(l[1]), float(l[2])] for l in lines if l[0] == "A2=20"])
        b = np.array([[float(l[1]), float(l[2])] for l in lines if l[0] == "A2=40"])
        late = a[:, 0] >= 3.0
        assert np.all(b[late, 1] >= a[late, 1])
        assert np.all(np.isfinite(b[:, 1]))

    def test_presets_listing(self, capsys):
        assert main(["presets"]) == 0
        out = capsys.readouterr().out
        for name in ("fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c"):
            assert out.count(name + ":") == 1
