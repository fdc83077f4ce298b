"""Command-line front end.

Subcommands: analyze, threshold, simulate, er-sweep, conditions. Options
come from an optional JSON config file plus flag overrides (flags win).
Every stochastic command requires an explicit --seed; reruns with the same
config produce byte-identical output files (written atomically).

Exit codes: 0 converges / success, 1 usage or input error, 2 diverges,
3 critical or inconclusive or undecided.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import expectation, meansquare, simulator
from .errors import SignedGossipError
from .fileio import atomic_write_text, fmt17, json_text
from .graphs import (
    SignedGraph,
    complete_uniform,
    er_repulsive,
    load_graph,
    ring_uniform,
)
from .schedules import Schedule, gain_from_spec

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DIVERGES = 2
EXIT_UNDECIDED = 3

_CLASS_EXIT = {
    expectation.CONVERGES: EXIT_OK,
    expectation.DIVERGES: EXIT_DIVERGES,
    expectation.CRITICAL: EXIT_UNDECIDED,
    "converging": EXIT_OK,
    "diverging": EXIT_DIVERGES,
    "undecided": EXIT_UNDECIDED,
}


def _parse_pairs(text: str):
    # "1-2+3-4" -> [(1, 2), (3, 4)]
    pairs = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        a, _, b = chunk.partition("-")
        pairs.append((int(a), int(b)))
    return pairs


def _kv_args(text: str) -> dict:
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        out[key.strip()] = val.strip()
    return out


def graph_from_spec(spec) -> SignedGraph:
    """Build a graph from a file path, a generator spec string, or the
    config dict forms {"file": ...} / {"generator": ..., ...}."""
    if isinstance(spec, dict):
        if "file" in spec:
            return load_graph(spec["file"])
        gen = spec.get("generator")
        if gen == "complete_uniform":
            return complete_uniform(int(spec["n"]),
                                    [tuple(p) for p in spec.get("rep_pairs", [])])
        if gen == "ring_uniform":
            return ring_uniform(int(spec["n"]),
                                [tuple(p) for p in spec.get("rep_pairs", [])])
        if gen == "er_repulsive":
            if "seed" not in spec:
                raise ValueError("er_repulsive generator needs a seed")
            return er_repulsive(int(spec["n"]), float(spec["p"]), int(spec["seed"]))
        raise ValueError(f"unknown graph spec: {spec!r}")
    text = str(spec)
    if text.startswith("complete:"):
        kv = _kv_args(text[len("complete:"):])
        pairs = _parse_pairs(kv.get("rep", ""))
        return complete_uniform(int(kv["n"]), pairs)
    if text.startswith("ring:"):
        kv = _kv_args(text[len("ring:"):])
        pairs = _parse_pairs(kv.get("rep", ""))
        return ring_uniform(int(kv["n"]), pairs)
    if text.startswith("er:"):
        kv = _kv_args(text[len("er:"):])
        if "seed" not in kv:
            raise ValueError("er graph spec needs seed=...")
        return er_repulsive(int(kv["n"]), float(kv["p"]), int(kv["seed"]))
    return load_graph(text)


def _merged_options(args) -> dict:
    opts = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config file must hold a JSON object")
        opts.update(cfg)
    for key in ("graph", "alpha", "beta", "horizon", "trials", "seed", "out",
                "format", "tol", "x0", "n", "p_grid", "samples", "z", "count"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            opts[key] = val
    return opts


def _need(opts, key, command):
    if key not in opts or opts[key] is None:
        raise ValueError(f"'{command}' needs {key} (flag --{key.replace('_', '-')} or config)")
    return opts[key]


def _constant_gain(opts, key, command) -> float:
    spec = gain_from_spec(_need(opts, key, command))
    if not isinstance(spec, float):
        raise ValueError(f"'{command}' needs a constant {key}")
    return spec


def _write(out_path, text) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(out_path, text)


def cmd_analyze(opts) -> int:
    g = graph_from_spec(_need(opts, "graph", "analyze"))
    alpha = _constant_gain(opts, "alpha", "analyze")
    beta = _constant_gain(opts, "beta", "analyze")
    report = expectation.classify_expectation(g, alpha, beta)
    ms = meansquare.ms_classify(g, Schedule.constant(alpha, beta))
    payload = report.to_json_dict()
    payload["mean_square"] = ms.to_json_dict()
    _write(opts.get("out"), json_text(payload))
    return _CLASS_EXIT[report.classification]


def cmd_threshold(opts) -> int:
    g = graph_from_spec(_need(opts, "graph", "threshold"))
    alpha = _constant_gain(opts, "alpha", "threshold")
    tol = float(opts.get("tol", 1e-9))
    beta_star = expectation.threshold_beta(g, alpha, tol)
    try:
        closed = expectation.complete_graph_threshold(g, alpha)
        agreement = bool(abs(closed - beta_star) <= 1e-6)
    except SignedGossipError:
        closed = None
        agreement = None
    payload = {
        "n": g.n,
        "alpha": alpha,
        "tol": tol,
        "beta_star_bisection": beta_star,
        "beta_star_closed_form": closed,
        "agreement": agreement,
    }
    _write(opts.get("out"), json_text(payload))
    return EXIT_OK


def _parse_x0(opts, n):
    spec = opts.get("x0")
    if spec is None:
        return np.linspace(0.0, 1.0, n)
    if isinstance(spec, str):
        return np.asarray([float(v) for v in spec.split(",") if v], dtype=float)
    return np.asarray([float(v) for v in spec], dtype=float)


def cmd_simulate(opts) -> int:
    g = graph_from_spec(_need(opts, "graph", "simulate"))
    schedule = Schedule(
        alpha=gain_from_spec(_need(opts, "alpha", "simulate")),
        beta=gain_from_spec(_need(opts, "beta", "simulate")),
    )
    horizon = int(_need(opts, "horizon", "simulate"))
    seed = int(_need(opts, "seed", "simulate"))
    trials = int(opts.get("trials", 1))
    x0 = _parse_x0(opts, g.n)
    out = opts.get("out")

    ens = simulator.monte_carlo(g, schedule, x0, horizon, trials, seed)
    label, delta = simulator.spread_trend(ens)
    hits = ens.hitting_times
    payload = {
        "n": g.n,
        "horizon": horizon,
        "trials": trials,
        "seed": seed,
        "classification_empirical": label,
        "log10_spread_delta_last_quarter": None if delta in (np.inf, -np.inf) else delta,
        "consensus_fraction_exact": ens.consensus_fraction,
        "mean_hitting_time": float(np.mean(hits[hits >= 0])) if np.any(hits >= 0) else None,
        "diverged_trials": ens.diverged_count,
    }
    files = {}
    if trials == 1:
        traj = simulator.run(g, schedule, x0, horizon, seed)
        files["states"] = simulator.trajectory_states_csv(traj)
        files["series"] = simulator.trajectory_series_csv(traj)
    else:
        files["ensemble"] = simulator.ensemble_csv(ens)
    summary = json_text(payload)
    if out is None:
        sys.stdout.write(summary)
    else:
        _write(f"{out}.summary.json", summary)
        for tag, text in files.items():
            _write(f"{out}.{tag}.csv", text)
    return _CLASS_EXIT[label]


def cmd_er_sweep(opts) -> int:
    n = int(_need(opts, "n", "er-sweep"))
    alpha = _constant_gain(opts, "alpha", "er-sweep")
    beta = _constant_gain(opts, "beta", "er-sweep")
    seed = int(_need(opts, "seed", "er-sweep"))
    samples = int(opts.get("samples", 20))
    p_grid = opts.get("p_grid")
    if p_grid is None:
        raise ValueError("'er-sweep' needs p_grid (flag --p-grid or config)")
    if isinstance(p_grid, str):
        p_grid = [float(v) for v in p_grid.split(",") if v]
    p_grid = [float(v) for v in p_grid]
    fractions = expectation.er_sweep(n, p_grid, alpha, beta, samples, seed)
    p_star = expectation.er_threshold(alpha, beta)
    fmt = opts.get("format", "csv")
    if fmt == "json":
        payload = {
            "n": n, "alpha": alpha, "beta": beta, "samples": samples,
            "seed": seed, "p_star": p_star,
            "rows": [{"p": p, "fraction_converging": float(f)}
                     for p, f in zip(p_grid, fractions)],
        }
        text = json_text(payload)
    else:
        lines = [
            f"# er-sweep n={n} alpha={fmt17(alpha)} beta={fmt17(beta)} "
            f"samples={samples} seed={seed} p_star={fmt17(p_star)}",
            "p,fraction_converging,samples,seed",
        ]
        for p, f in zip(p_grid, fractions):
            lines.append(f"{fmt17(p)},{fmt17(float(f))},{samples},{seed}")
        text = "\n".join(lines) + "\n"
    _write(opts.get("out"), text)
    return EXIT_OK


def cmd_conditions(opts) -> int:
    g = graph_from_spec(_need(opts, "graph", "conditions"))
    schedule = Schedule(
        alpha=gain_from_spec(_need(opts, "alpha", "conditions")),
        beta=gain_from_spec(_need(opts, "beta", "conditions")),
    )
    z = int(opts.get("z", 1))
    count = int(opts.get("count", 50))
    report = simulator.evaluate_conditions(g, schedule, z, count)
    _write(opts.get("out"), json_text(report.to_json_dict()))
    return EXIT_OK


_COMMANDS = {
    "analyze": cmd_analyze,
    "threshold": cmd_threshold,
    "simulate": cmd_simulate,
    "er-sweep": cmd_er_sweep,
    "conditions": cmd_conditions,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signed-gossip",
        description="Analyze and simulate randomized gossip consensus over "
                    "attraction/repulsion graph partitions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("analyze", "expectation and mean-square classification (constant gains)"),
        ("threshold", "phase-transition repulsion gain by bisection"),
        ("simulate", "seeded gossip runs or Monte Carlo ensembles"),
        ("er-sweep", "convergence fraction across repulsion densities"),
        ("conditions", "almost-sure condition sequence evaluations"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--graph", help="graph file, or complete:/ring:/er: spec")
        p.add_argument("--alpha", help="attraction gain (number or schedule spec)")
        p.add_argument("--beta", help="repulsion gain (number or schedule spec)")
        p.add_argument("--seed", type=int, help="rng seed (mandatory when stochastic)")
        p.add_argument("--out", help="output path (stdout when omitted)")
        p.add_argument("--format", choices=("json", "csv"), help="er-sweep output format")
        if name == "threshold":
            p.add_argument("--tol", type=float, help="bisection width (default 1e-9)")
        if name == "simulate":
            p.add_argument("--horizon", type=int, help="number of meeting slots")
            p.add_argument("--trials", type=int, help="Monte Carlo trials (default 1)")
            p.add_argument("--x0", help="comma-separated initial state")
        if name == "er-sweep":
            p.add_argument("--n", type=int, help="number of nodes")
            p.add_argument("--p-grid", dest="p_grid", help="comma-separated densities")
            p.add_argument("--samples", type=int, help="graphs per density")
        if name == "conditions":
            p.add_argument("--z", type=int, help="divergence window length (default 1)")
            p.add_argument("--count", type=int, help="number of windows (default 50)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _merged_options(args)
        return _COMMANDS[args.command](opts)
    except (SignedGossipError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"signed-gossip: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
