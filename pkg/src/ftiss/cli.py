"""Command-line front end.

    ftiss simulate CONFIG.json [--out DIR]
    ftiss verify {inequality,greens,certificate} [options]
    ftiss reproduce {fig1a,...,fig2c,all} [--out DIR] [--jobs N]
    ftiss presets

Exit codes: 0 success, 1 a verified property failed, 2 bad input,
3 integrator divergence. ``FTISS_OUT_DIR`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import greens, inequality
from .analysis import dissipation_audit, envelope_audit, extinction_time
from .certificate import PDEParams, default_eps, derive_gains, pde_certificate, pde_settling_bound, settling_bound_abstract
from .errors import ConfigError, DivergenceError, ParameterError
from .field import Field, Grid1D, lp_norm
from .pde import InitSpec, SimConfig, TrajectoryRecord, init_field, simulate
from .presets import FIGURES, PRESETS, SERIES_FIGURES, config_to_dict, load_config

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DIVERGED = 0, 1, 2, 3
EXTINCTION_LEVEL = 1e-6

log = logging.getLogger("ftiss")


def _out_dir(arg) -> Path:
    path = Path(arg or os.environ.get("FTISS_OUT_DIR") or "ftiss_out")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _g(x) -> str:
    return f"{x:.17g}"


def audit_summary(config: SimConfig, traj: TrajectoryRecord) -> dict:
    """Audit block written next to every simulation."""
    summary = {
        "config": config_to_dict(config) if config.init.kind != "custom" else None,
        "t_final": float(traj.times[-1]),
        "n_records": len(traj),
        "w0_l2_norm": float(traj.l2_norms[0]),
        "dist_sup_norm_simulated": traj.dist_sup_norm,
        "dist_sup_norm_analytic": traj.dist_analytic_sup,
        "max_l2_norm": float(np.max(traj.l2_norms)),
        "late_sup_l2_norm": float(np.max(traj.l2_norms[traj.times >= traj.times[-1] / 2])),
        "extinction_level": EXTINCTION_LEVEL,
        "extinction_time": extinction_time(traj, EXTINCTION_LEVEL),
    }
    params = config.params
    if params.k > 0:
        env = derive_gains(pde_certificate(params))
        summary["settling_bound"] = pde_settling_bound(params, float(traj.l2_norms[0]))
        summary["envelope"] = {"M": env.M, "sigma0": env.sigma0, "chi_coefficient": env.chi.coefficient,
                               "chi_exponent": env.chi.exponent, "eps": default_eps(params)}
        summary["dissipation_audit"] = dissipation_audit(traj, env).to_dict()
        summary["envelope_ratio"] = envelope_audit(traj, env)
    return summary


def _write_json(path: Path, doc) -> None:
    def default(x):
        if isinstance(x, (np.floating, np.integer)):
            return x.item()
        raise TypeError(type(x))

    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=default)
        fh.write("\n")


def run_simulation(config: SimConfig, out: Path) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    traj = simulate(config)
    traj.to_trajectory_csv(out / "trajectory.csv")
    traj.to_snapshots_csv(out / "snapshots.csv")
    summary = audit_summary(config, traj)
    _write_json(out / "audit.json", summary)
    return summary


def cmd_simulate(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        for field, msg in exc.problems:
            print(f"config error: {field}: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        summary = run_simulation(config, _out_dir(args.out))
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    print(f"extinction_time = {summary['extinction_time']}")
    if "settling_bound" in summary:
        print(f"settling_bound = {_g(summary['settling_bound'])}")
        print(f"envelope_ratio = {_g(summary['envelope_ratio'])}")
    return EXIT_OK


def _reproduce_one(fig: str, out: str) -> list:
    out = Path(out) / fig
    out.mkdir(parents=True, exist_ok=True)
    if fig in PRESETS:
        summary = run_simulation(PRESETS[fig].config, out)
        return [f"{fig}: extinction_time={summary['extinction_time']} late_sup={_g(summary['late_sup_l2_norm'])}"]
    lines = []
    with open(out / "norms.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["series", "t", "l2_norm", "log10_l2_norm"])
        for label, preset in SERIES_FIGURES[fig].items():
            traj = simulate(PRESETS[preset].config)
            for t, n in zip(traj.times, traj.l2_norms):
                writer.writerow([label, _g(t), _g(n), _g(math.log10(n)) if n > 0 else "-inf"])
            lines.append(f"{fig} {label}: extinction_time={extinction_time(traj, EXTINCTION_LEVEL)}")
    return lines


def cmd_reproduce(args) -> int:
    figs = FIGURES if args.figure == "all" else (args.figure,)
    if any(f not in FIGURES for f in figs):
        print(f"error: unknown figure {args.figure!r}; choose from {', '.join(FIGURES)} or all", file=sys.stderr)
        return EXIT_INPUT
    out = str(_out_dir(args.out))
    try:
        if args.jobs > 1 and len(figs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_reproduce_one, figs, [out] * len(figs)))
        else:
            results = [_reproduce_one(f, out) for f in figs]
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    for lines in results:
        print("\n".join(lines))
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in FIGURES:
        if name in PRESETS:
            p = PRESETS[name]
            c = p.config
            print(f"{name}: {p.description}; n_cells={c.n_cells} dt={c.dt:g} t_end={c.t_end:g}")
        else:
            members = ", ".join(f"{k} ({v})" for k, v in SERIES_FIGURES[name].items())
            print(f"{name}: L2-norm series of {members}")
    return EXIT_OK


def verify_inequality(args) -> int:
    seeds = range(args.seeds)
    lemma = inequality.lemma_harness(seeds, n_cells=args.n_cells)
    coro = inequality.corollary_harness(seeds, n_cells=args.n_cells)
    out = _out_dir(args.out)
    inequality.write_harness_csv(lemma, out / "inequality_lemma.csv")
    inequality.write_harness_csv(coro, out / "inequality_corollary.csv", header=("seed", "r", "eps", "lhs", "rhs", "margin"))
    bad_lemma = inequality.count_violations(lemma, args.slack)
    bad_coro = inequality.count_violations(coro, args.slack)
    print(f"lemma cases = {len(lemma)} violations = {bad_lemma} sharpness = {_g(inequality.sharpness(lemma))}")
    print(f"corollary cases = {len(coro)} violations = {bad_coro} sharpness = {_g(inequality.sharpness(coro))}")
    return EXIT_OK if bad_lemma == 0 and bad_coro == 0 else EXIT_FAIL


def verify_greens(args) -> int:
    try:
        rhos = [float(x) for x in args.rho.split(",")]
    except ValueError:
        print(f"error: --rho must be comma-separated numbers, got {args.rho!r}", file=sys.stderr)
        return EXIT_INPUT
    ok = True
    grid = Grid1D(args.n_cells)
    one = Field(grid, np.ones(grid.n_nodes))
    lam1 = greens.ComplexSpectral(1.0)
    u = greens.bvp_solve(lam1, one)
    x = grid.nodes
    exact = 1.0 - (np.exp(x) + np.exp(2.0 - x)) / (1.0 + math.e**2)
    err = float(np.max(np.abs(u - exact)))
    resid = greens.bvp_residual(lam1, u, one)
    print(f"closed-form error (g=1, lam=1) = {_g(err)}")
    print(f"residual = {_g(resid)}")
    ok &= err <= 1e-4 and resid <= 1e-3
    scans = []
    for n in (args.n_cells, 2 * args.n_cells):
        suite = greens.random_suite(args.suite_size, Grid1D(n), seed=args.seed)
        scans.append(greens.sector_bound_scan(args.theta0, rhos, args.theta_samples, suite))
    change = abs(scans[1].m_hat - scans[0].m_hat) / scans[0].m_hat
    print(f"m_hat = {_g(scans[0].m_hat)}")
    print(f"m_hat refinement change = {_g(change)}")
    for rho, m in scans[0].decade_maxima().items():
        print(f"  rho = {rho:g}: max ratio = {_g(m)}")
    print("note: only |arg lam| < theta0 is sampled; the wider resolvent sector is unverified")
    ok &= math.isfinite(scans[0].m_hat) and change <= 1e-2
    scans[0].to_csv(_out_dir(args.out) / "greens_scan.csv")
    return EXIT_OK if ok else EXIT_FAIL


def verify_certificate(args) -> int:
    try:
        params = PDEParams(k=args.k, r=args.r)
        cert = pde_certificate(params, args.eps)
        env = derive_gains(cert, args.eps0)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    eps = args.eps if args.eps is not None else default_eps(params)
    rows = [
        ("eps", eps), ("b", cert.b), ("tau", cert.tau), ("c", cert.c), ("sigma0", env.sigma0), ("M", env.M),
        ("chi_coefficient", env.chi.coefficient), ("chi_exponent", env.chi.exponent),
    ]
    for name, value in rows:
        print(f"{name} = {_g(value)}")
    ok = True
    grid = Grid1D(2000)
    for A1 in (5.0, 50.0):
        w0 = lp_norm(init_field(InitSpec(A1=A1), grid), 2)
        bound = pde_settling_bound(params, w0)
        print(f"A1 = {A1:g}: ||w0|| = {_g(w0)} T*_bound = {_g(bound)}")
        for delta in (1e-2, 1e-3, 1e-4):
            near = settling_bound_abstract(pde_certificate(params, (1 - delta) * params.eps_sup), w0**2)
            ok &= abs(near - bound) / bound <= 10 * delta
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftiss", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a JSON-configured simulation")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run a verification harness")
    vsub = p.add_subparsers(dest="kind", required=True)
    q = vsub.add_parser("inequality")
    q.add_argument("--seeds", type=int, default=1000)
    q.add_argument("--n-cells", type=int, default=2000)
    q.add_argument("--slack", type=float, default=inequality.DEFAULT_SLACK)
    q.add_argument("--out")
    q.set_defaults(func=verify_inequality)
    q = vsub.add_parser("greens")
    q.add_argument("--rho", default="0.1,1,10,100")
    q.add_argument("--theta0", type=float, default=math.pi / 3)
    q.add_argument("--theta-samples", type=int, default=3)
    q.add_argument("--suite-size", type=int, default=10)
    q.add_argument("--n-cells", type=int, default=2000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(func=verify_greens)
    q = vsub.add_parser("certificate")
    q.add_argument("--k", type=float, default=2.0)
    q.add_argument("--r", type=float, default=0.6)
    q.add_argument("--eps", type=float)
    q.add_argument("--eps0", type=float)
    q.set_defaults(func=verify_certificate)

    p = sub.add_parser("reproduce", help="emit the data behind a figure")
    p.add_argument("figure", help=f"one of {', '.join(FIGURES)} or all")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("presets", help="list experiment presets")
    p.set_defaults(func=cmd_presets)
    return parser




def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which matches EXIT_INPUT
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
