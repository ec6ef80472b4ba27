"""Command-line front end: grid files, analytic sweeps, Monte Carlo checks.

Subcommands
-----------
grid       write the canonical hexagonal patch as an edge-list file
sweep      analytic cost sweep over a (gamma, cmr) grid, CSV output
simulate   Monte Carlo cost estimates for chosen LI cells, CSV output
validate   analytic-vs-simulation comparison table with z-scores;
           exits 1 if any |z| exceeds 4

Options may come from a JSON config file (``--config``); command-line flags
override config values, which override built-in defaults.  All output is a
pure function of the merged configuration, including the seed.

Exit codes: 0 success, 1 validation failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .mobility import ConvergenceError, stationary_distribution, symmetric_random_walk
from .paging import location_profile, sequential_cost, sweep
from .residence import ResidenceModel, crossing_pmf
from .simulator import SimConfig, SimulationFault, _cost_from_counts, _interval_counts
from .paging import query_order
from .topology import build_hex_patch, format_edge_list, load_graph

# bins are z-tested only when the expected count is large enough for the
# normal approximation; smaller bins are lumped into a remainder row
_MIN_EXPECTED = 25.0
_Z_GATE = 4.0


@dataclass
class RunConfig:
    n: int = 31
    graph: str | None = None
    gamma: tuple[float, ...] = (1.0,)
    cmr: tuple[float, ...] = (1.0,)
    lambda_m: float = 1.0
    samples: int = 100_000
    seed: int = 42
    tol: float = 1e-12
    inversion_tol: float = 1e-10
    cells: tuple[int, ...] | None = None
    out: str | None = None


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())

def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _merge_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ValueError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValueError(f"config {path} is not valid JSON: {exc}") from exc
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"config {path}: unknown fields {sorted(unknown)}")
        for key in ("gamma", "cmr", "cells"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        cfg = replace(cfg, **data)
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if getattr(args, f.name, None) is not None
    }
    return replace(cfg, **overrides)


def _check_config(cfg: RunConfig) -> None:
    if cfg.n < 1:
        raise ValueError("n: cell count must be at least 1")
    if not cfg.gamma or min(cfg.gamma) <= 0:
        raise ValueError("gamma: all shape values must be positive")
    if not cfg.cmr or min(cfg.cmr) <= 0:
        raise ValueError("cmr: all call-to-mobility ratios must be positive")
    if not cfg.lambda_m > 0:
        raise ValueError("lambda_m: mobility rate must be positive")
    if cfg.samples < 1:
        raise ValueError("samples: must be at least 1")
    if not 0 <= cfg.seed < 2**64:
        raise ValueError("seed: must be a 64-bit unsigned integer")
    if not cfg.tol > 0:
        raise ValueError("tol: must be positive")
    if not cfg.inversion_tol > 0:
        raise ValueError("inversion_tol: must be positive")


def _build_area(cfg: RunConfig):
    if cfg.graph is not None:
        try:
            return load_graph(cfg.graph)
        except OSError as exc:
            raise ValueError(f"cannot read graph {cfg.graph}: {exc}") from exc
    return build_hex_patch(cfg.n)


def _write_out(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            raise ValueError(f"cannot write {cfg.out}: {exc}") from exc


def _warn_lambda_m(cfg: RunConfig) -> None:
    if cfg.lambda_m != 1.0:
        print(
            "note: costs depend on the rates only through cmr = call rate / mobility rate; "
            "lambda_m merely fixes the time unit",
            file=sys.stderr,
        )


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def cmd_grid(cfg: RunConfig) -> int:
    _write_out(cfg, format_edge_list(build_hex_patch(cfg.n)))
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    _warn_lambda_m(cfg)
    graph = _build_area(cfg)
    reports = sweep(graph, cfg.gamma, cfg.cmr, lambda_m=cfg.lambda_m, tol=cfg.tol)
    lines = ["gamma,variance,cmr,total_cost,savings_vs_flooding"]
    for r in reports:
        lines.append(
            f"{_fmt(r.gamma)},{_fmt(r.variance)},{_fmt(r.cmr)},{_fmt(r.total)},{_fmt(r.savings)}"
        )
    _write_out(cfg, "\n".join(lines) + "\n")
    return 0


def _chosen_cells(cfg: RunConfig, n: int) -> tuple[int, ...]:
    cells = cfg.cells if cfg.cells is not None else tuple(range(n))
    for u in cells:
        if not 0 <= u < n:
            raise ValueError(f"cells: cell id {u} out of range for {n} cells")
    return cells


def cmd_simulate(cfg: RunConfig) -> int:
    _warn_lambda_m(cfg)
    graph = _build_area(cfg)
    P = symmetric_random_walk(graph)
    pi = stationary_distribution(P, tol=cfg.tol)
    cells = _chosen_cells(cfg, graph.n)
    sim = SimConfig(seed=cfg.seed, samples=cfg.samples, inversion_tol=cfg.inversion_tol)
    lines = ["gamma,variance,cmr,li_cell,cost_mc,cost_stderr"]
    for g in cfg.gamma:
        model = ResidenceModel(shape=g, mobility_rate=cfg.lambda_m)
        for p in sorted(cfg.cmr):
            pmf = crossing_pmf(model, call_rate=p * cfg.lambda_m, tol=cfg.tol)
            for u in cells:
                order = query_order(location_profile(P, pmf, pi, u))
                _, cell_counts = _interval_counts(P, model, pmf.call_rate, u, sim)
                cost, se = _cost_from_counts(cell_counts, order, sim.samples)
                lines.append(
                    f"{_fmt(g)},{_fmt(model.variance)},{_fmt(p)},{u},{_fmt(cost)},{_fmt(se)}"
                )
    _write_out(cfg, "\n".join(lines) + "\n")
    return 0


def _binomial_z(analytic: float, estimate: float, samples: int) -> float:
    se = math.sqrt(analytic * (1.0 - analytic) / samples)
    if se == 0.0:
        return 0.0 if estimate == analytic else math.inf
    return (estimate - analytic) / se


def cmd_validate(cfg: RunConfig, inject_bias: float = 0.0) -> int:
    _warn_lambda_m(cfg)
    graph = _build_area(cfg)
    P = symmetric_random_walk(graph)
    pi = stationary_distribution(P, tol=cfg.tol)
    cells = _chosen_cells(cfg, graph.n)
    sim = SimConfig(seed=cfg.seed, samples=cfg.samples, inversion_tol=cfg.inversion_tol)
    N = sim.samples
    rows = ["gamma,cmr,li_cell,metric,index,analytic,estimate,stderr,z"]
    worst = 0.0

    def add_row(g, p, u, metric, index, analytic, estimate, se, z):
        nonlocal worst
        z_txt = ""
        if z is not None:
            worst = max(worst, abs(z))
            z_txt = _fmt(z)
        rows.append(
            f"{_fmt(g)},{_fmt(p)},{u},{metric},{index},{_fmt(analytic)},"
            f"{_fmt(estimate)},{_fmt(se)},{z_txt}"
        )

    for g in cfg.gamma:
        model = ResidenceModel(shape=g, mobility_rate=cfg.lambda_m)
        for p in sorted(cfg.cmr):
            pmf = crossing_pmf(model, call_rate=p * cfg.lambda_m, tol=cfg.tol)
            for u in cells:
                profile = location_profile(P, pmf, pi, u)
                order = query_order(profile)
                analytic_cost = sequential_cost(profile) + inject_bias
                k_counts, cell_counts = _interval_counts(P, model, pmf.call_rate, u, sim)

                cost_est, cost_se = _cost_from_counts(cell_counts, order, N)
                if cost_se == 0.0:
                    z = 0.0 if cost_est == analytic_cost else math.inf
                else:
                    z = (cost_est - analytic_cost) / cost_se
                add_row(g, p, u, "cost", "", analytic_cost, cost_est, cost_se, z)

                freq = cell_counts / N
                tested = profile.probs * N >= _MIN_EXPECTED
                for i in np.nonzero(tested)[0]:
                    a_i = float(profile.probs[i])
                    se = math.sqrt(a_i * (1.0 - a_i) / N)
                    add_row(g, p, u, "p_cell", int(i), a_i, float(freq[i]),
                            se, _binomial_z(a_i, float(freq[i]), N))
                rest_a = float(profile.probs[~tested].sum())
                rest_f = float(freq[~tested].sum())
                se = math.sqrt(rest_a * (1.0 - rest_a) / N)
                z = _binomial_z(rest_a, rest_f, N) if rest_a * N >= _MIN_EXPECTED else None
                add_row(g, p, u, "p_rest", "", rest_a, rest_f, se, z)

                if graph.n > 1:  # a 1-cell area has no boundaries to cross
                    k_len = max(len(k_counts), len(pmf.probs))
                    a_full = np.zeros(k_len)
                    a_full[: len(pmf.probs)] = pmf.probs
                    k_freq = np.zeros(k_len)
                    k_freq[: len(k_counts)] = k_counts / N
                    tested_k = a_full * N >= _MIN_EXPECTED
                    for k in np.nonzero(tested_k)[0]:
                        a_k = float(a_full[k])
                        se = math.sqrt(a_k * (1.0 - a_k) / N)
                        add_row(g, p, u, "a_k", int(k), a_k, float(k_freq[k]),
                                se, _binomial_z(a_k, float(k_freq[k]), N))
                    rest_a = float(a_full[~tested_k].sum()) + pmf.tail
                    rest_f = float(k_freq[~tested_k].sum())
                    se = math.sqrt(rest_a * (1.0 - rest_a) / N)
                    z = _binomial_z(rest_a, rest_f, N) if rest_a * N >= _MIN_EXPECTED else None
                    add_row(g, p, u, "a_rest", "", rest_a, rest_f, se, z)

    _write_out(cfg, "\n".join(rows) + "\n")
    ok = worst <= _Z_GATE
    print(
        f"validate: {len(rows) - 1} comparisons, max |z| = {worst:.3f} -> "
        f"{'PASS' if ok else 'FAIL'}",
        file=sys.stderr,
    )
    return 0 if ok else 1


def _add_common(sub: argparse.ArgumentParser, *, sim: bool) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its fields")
    sub.add_argument("--n", type=int, help="built-in hexagonal patch size")
    sub.add_argument("--graph", help="edge-list file describing the service area")
    sub.add_argument("--gamma", type=_float_list, help="comma-separated shape values")
    sub.add_argument("--cmr", type=_float_list, help="comma-separated call-to-mobility ratios")
    sub.add_argument("--lambda-m", dest="lambda_m", type=float,
                     help="mobility rate (cosmetic: fixes the time unit only)")
    sub.add_argument("--tol", type=float, help="analytic tolerance (pmf truncation, solver)")
    sub.add_argument("--out", help="output path (default: stdout)")
    if sim:
        sub.add_argument("--samples", type=int, help="Monte Carlo samples per estimate")
        sub.add_argument("--seed", type=int, help="simulation seed (64-bit)")
        sub.add_argument("--cells", type=_int_list, help="comma-separated LI cells (default: all)")
        sub.add_argument("--inversion-tol", dest="inversion_tol", type=float,
                         help="equilibrium CDF inversion tolerance")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqpaging",
        description="Sequential paging cost under Gamma cell residence times",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    g = subs.add_parser("grid", help="write the canonical hexagonal patch as an edge list")
    g.add_argument("--config", help="JSON config file; flags override its fields")
    g.add_argument("--n", type=int, help="patch size in cells")
    g.add_argument("--out", help="output path (default: stdout)")

    s = subs.add_parser("sweep", help="analytic cost sweep, CSV output")
    _add_common(s, sim=False)

    m = subs.add_parser("simulate", help="Monte Carlo cost estimates, CSV output")
    _add_common(m, sim=True)

    v = subs.add_parser("validate", help="analytic vs Monte Carlo comparison with z-scores")
    _add_common(v, sim=True)
    v.add_argument("--inject-bias", dest="inject_bias", type=float, default=0.0,
                   help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        _check_config(cfg)
        if args.command == "grid":
            return cmd_grid(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        return cmd_validate(cfg, inject_bias=args.inject_bias)
    except (ValueError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) else 1
    except SimulationFault as exc:
        print(f"simulation fault: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
