"""Independent Monte Carlo check of the analytic paging model.

Each sample plays out one paging interval: an exponential call timer, a
first dwell drawn from the equilibrium residual distribution, further
dwells from the plain Gamma law, and one transition-matrix step per
completed dwell.  Crossing counts, final cells, and paging costs estimated
from these samples must agree with the closed-form model within sampling
noise; the simulator shares no code path with the analytic pipeline beyond
the dwell-law parameters.

Sampling is vectorized in fixed-size chunks.  Chunk ``i`` always draws from
the generator spawned as ``SeedSequence(seed, spawn_key=(i,))``, so results
are bit-identical for a given seed regardless of how many workers execute
the chunks or in what order they finish.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .mobility import TransitionMatrix, stationary_distribution
from .paging import location_profile, query_order
from .residence import ResidenceModel, crossing_pmf
from .topology import CellGraph

logger = logging.getLogger(__name__)

_CHUNK = 1 << 18
_MAX_CROSSINGS = 10**7
_MAX_BRACKET_DOUBLINGS = 200
_MAX_RESAMPLE_ROUNDS = 100


class SimulationFault(RuntimeError):
    """A sampling loop exceeded its safety cap; parameters are pathological."""


@dataclass(frozen=True)
class SimConfig:
    """Reproducibility settings for one estimation run."""

    seed: int
    samples: int
    inversion_tol: float = 1e-10

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.samples < 1:
            raise ValueError("sample count must be at least 1")
        if not self.inversion_tol > 0:
            raise ValueError("inversion tolerance must be positive")


@dataclass(frozen=True)
class IntervalSample:
    """One simulated paging interval."""

    crossings: int
    final_cell: int
    call_time: float


def _chunk_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _invert_equilibrium(model: ResidenceModel, u: np.ndarray, tol: float):
    """Solve equilibrium_cdf(t) = u per element by bracketing and bisection.

    Returns (t, ok); entries with ok False never bracketed (u beyond the
    largest representable CDF value) and must be resampled.
    """
    hi = model.mean_dwell
    u_max = float(u.max())
    for _ in range(_MAX_BRACKET_DOUBLINGS):
        if model.equilibrium_cdf(hi) >= u_max:
            break
        hi *= 2.0
    ok = u <= model.equilibrium_cdf(hi)
    lo_arr = np.zeros_like(u)
    hi_arr = np.full_like(u, hi)
    for _ in range(max(1, math.ceil(math.log2(hi / tol)))):
        mid = 0.5 * (lo_arr + hi_arr)
        below = model.equilibrium_cdf(mid) < u
        lo_arr = np.where(below, mid, lo_arr)
        hi_arr = np.where(below, hi_arr, mid)
    return 0.5 * (lo_arr + hi_arr), ok


def _equilibrium_draws(model: ResidenceModel, rng: np.random.Generator, size: int, tol: float) -> np.ndarray:
    u = rng.random(size)
    t, ok = _invert_equilibrium(model, u, tol)
    rounds = 0
    while not ok.all():
        rounds += 1
        if rounds > _MAX_RESAMPLE_ROUNDS:
            raise SimulationFault("equilibrium inversion kept failing to bracket")
        bad = ~ok
        logger.warning("equilibrium inversion failed to bracket %d draws; resampling", int(bad.sum()))
        t_new, ok_new = _invert_equilibrium(model, rng.random(int(bad.sum())), tol)
        t[bad] = t_new
        ok = ok.copy()
        ok[bad] = ok_new
    return t


def sample_equilibrium_residual(
    model: ResidenceModel, rng: np.random.Generator, inversion_tol: float = 1e-10
) -> float:
    """Draw the first dwell of an interval: the stationary residual time."""
    return float(_equilibrium_draws(model, rng, 1, inversion_tol)[0])


def _cumulative_rows(P: TransitionMatrix) -> np.ndarray:
    cum = np.cumsum(P.matrix, axis=1)
    cum[:, -1] = 1.0  # pin so the uniform draw always lands in a bin
    return cum


def _step_cells(cum_rows: np.ndarray, cells: np.ndarray, r: np.ndarray) -> np.ndarray:
    return (r[:, None] < cum_rows[cells]).argmax(axis=1)


def _simulate_batch(
    P: TransitionMatrix | None,
    model: ResidenceModel,
    call_rate: float,
    u: int,
    rng: np.random.Generator,
    size: int,
    inversion_tol: float,
    track_cells: bool = True,
):
    """Simulate `size` paging intervals; returns (crossings, cells, call_times).

    With track_cells False the walk is skipped (crossing counts only) and
    no transition matrix is needed.
    """
    call_times = rng.exponential(1.0 / call_rate, size)
    cum = _equilibrium_draws(model, rng, size, inversion_tol)
    crossings = np.zeros(size, dtype=np.int64)
    cells = np.full(size, u, dtype=np.int64) if track_cells else None
    cum_rows = _cumulative_rows(P) if track_cells else None
    scale = 1.0 / model.rate
    idx = np.nonzero(cum <= call_times)[0]
    iterations = 0
    while idx.size:
        iterations += 1
        if iterations > _MAX_CROSSINGS:
            raise SimulationFault(f"an interval exceeded {_MAX_CROSSINGS} crossings")
        crossings[idx] += 1
        if track_cells:
            cells[idx] = _step_cells(cum_rows, cells[idx], rng.random(idx.size))
        cum[idx] += rng.gamma(model.shape, scale, idx.size)
        idx = idx[cum[idx] <= call_times[idx]]
    return crossings, cells, call_times


def simulate_interval(
    graph: CellGraph,
    P: TransitionMatrix,
    model: ResidenceModel,
    call_rate: float,
    u: int,
    rng: np.random.Generator,
    inversion_tol: float = 1e-10,
) -> IntervalSample:
    """Simulate a single paging interval starting from LI cell u."""
    if graph.n != P.n:
        raise ValueError("graph and transition matrix disagree on cell count")
    if not 0 <= u < P.n:
        raise ValueError(f"cell id {u} out of range for {P.n} cells")
    if not call_rate > 0:
        raise ValueError("call rate must be positive")
    k, cells, t = _simulate_batch(P, model, call_rate, u, rng, 1, inversion_tol)
    return IntervalSample(crossings=int(k[0]), final_cell=int(cells[0]), call_time=float(t[0]))


def _interval_counts(
    P: TransitionMatrix | None,
    model: ResidenceModel,
    call_rate: float,
    u: int,
    cfg: SimConfig,
    workers: int = 1,
    track_cells: bool = True,
):
    """Chunked simulation; returns (crossing_counts, cell_counts).

    Counts are summed in chunk-index order, so the result depends only on
    the seed and sample count, never on the worker count.
    """
    n_chunks = math.ceil(cfg.samples / _CHUNK)
    sizes = [min(_CHUNK, cfg.samples - i * _CHUNK) for i in range(n_chunks)]

    def run(i: int):
        k, cells, _ = _simulate_batch(
            P, model, call_rate, u, _chunk_stream(cfg.seed, i), sizes[i],
            cfg.inversion_tol, track_cells=track_cells,
        )
        k_counts = np.bincount(k)
        c_counts = np.bincount(cells, minlength=P.n) if track_cells else None
        return k_counts, c_counts

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(n_chunks)))
    else:
        results = [run(i) for i in range(n_chunks)]

    k_len = max(len(k) for k, _ in results)
    crossing_counts = np.zeros(k_len, dtype=np.int64)
    cell_counts = np.zeros(P.n, dtype=np.int64) if track_cells else None
    for k_counts, c_counts in results:
        crossing_counts[: len(k_counts)] += k_counts
        if track_cells:
            cell_counts += c_counts
    return crossing_counts, cell_counts


def estimate_profile(
    graph: CellGraph,
    P: TransitionMatrix,
    model: ResidenceModel,
    call_rate: float,
    u: int,
    cfg: SimConfig,
    workers: int = 1,
):
    """Empirical location profile and per-cell standard errors."""
    if graph.n != P.n:
        raise ValueError("graph and transition matrix disagree on cell count")
    if not 0 <= u < P.n:
        raise ValueError(f"cell id {u} out of range for {P.n} cells")
    _, cell_counts = _interval_counts(P, model, call_rate, u, cfg, workers)
    freq = cell_counts / cfg.samples
    se = np.sqrt(freq * (1.0 - freq) / cfg.samples)
    return freq, se


def estimate_crossing_pmf(
    model: ResidenceModel,
    call_rate: float,
    cfg: SimConfig,
    workers: int = 1,
):
    """Empirical crossing-count pmf and per-bin standard errors."""
    counts, _ = _interval_counts(None, model, call_rate, 0, cfg, workers, track_cells=False)
    freq = counts / cfg.samples
    se = np.sqrt(freq * (1.0 - freq) / cfg.samples)
    return freq, se


def _cost_from_counts(cell_counts: np.ndarray, order: np.ndarray, samples: int):
    ranks = np.empty(len(order), dtype=float)
    ranks[order] = np.arange(1, len(order) + 1, dtype=float)
    freq = cell_counts / samples
    mean = float(freq @ ranks)
    var = float(freq @ ranks**2) - mean**2
    se = math.sqrt(max(var, 0.0) / samples)
    return mean, se


def estimate_cost(
    graph: CellGraph,
    P: TransitionMatrix,
    model: ResidenceModel,
    call_rate: float,
    u: int,
    cfg: SimConfig,
    workers: int = 1,
):
    """Monte Carlo paging cost of the analytically ordered polling policy.

    Cells are ranked by the analytic location profile (the policy actually
    deployed); the estimate is the mean rank of the simulated final cell.
    """
    if graph.n != P.n:
        raise ValueError("graph and transition matrix disagree on cell count")
    if not 0 <= u < P.n:
        raise ValueError(f"cell id {u} out of range for {P.n} cells")
    pi = stationary_distribution(P)
    pmf = crossing_pmf(model, call_rate)
    order = query_order(location_profile(P, pmf, pi, u))
    _, cell_counts = _interval_counts(P, model, call_rate, u, cfg, workers)
    return _cost_from_counts(cell_counts, order, cfg.samples)
