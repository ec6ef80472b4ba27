"""Embedded Markov chain of cell-to-cell transitions.

The user's movement between cells is a discrete chain with a row-stochastic
transition matrix.  This module builds the symmetric-random-walk matrix of a
cell graph, propagates occupancy vectors step by step, and solves for the
stationary distribution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .topology import CellGraph

_ROW_SUM_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Stationary solver failed to reach the requested residual."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"stationary distribution did not converge: residual {residual:.3e} "
            f"after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Validated row-stochastic matrix of the embedded cell walk."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("transition matrix must be square")
        if m.shape[0] < 1:
            raise ValueError("transition matrix must be at least 1x1")
        if not np.all(np.isfinite(m)):
            raise ValueError("transition matrix has non-finite entries")
        if m.min() < 0.0 or m.max() > 1.0 + 1e-15:
            raise ValueError("transition probabilities must lie in [0, 1]")
        bad = np.abs(m.sum(axis=1) - 1.0) > _ROW_SUM_TOL
        if bad.any():
            raise ValueError(f"rows {np.nonzero(bad)[0].tolist()} do not sum to 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """Stationary cell-occupancy probabilities and the achieved residual."""

    pi: np.ndarray
    residual: float

    def __post_init__(self) -> None:
        v = np.array(self.pi, dtype=float)
        if v.min() < 0.0:
            raise ValueError("stationary probabilities must be nonnegative")
        if abs(v.sum() - 1.0) > _ROW_SUM_TOL:
            raise ValueError("stationary probabilities must sum to 1")
        v.flags.writeable = False
        object.__setattr__(self, "pi", v)


def symmetric_random_walk(graph: CellGraph) -> TransitionMatrix:
    """Transition matrix that moves to each neighboring cell equally often.

    ``p[i, j] = 1/deg(i)`` for neighbors j of i, zero elsewhere.  A single
    isolated cell yields the 1x1 identity.
    """
    n = graph.n
    if n == 1:
        return TransitionMatrix(np.ones((1, 1)))
    m = np.zeros((n, n))
    for i, nbrs in enumerate(graph.adjacency):
        m[i, list(nbrs)] = 1.0 / len(nbrs)
    return TransitionMatrix(m)


def stationary_distribution(
    P: TransitionMatrix, tol: float = 1e-12, max_iter: int = 10**6
) -> StationaryDistribution:
    """Solve pi = pi P, sum(pi) = 1 by power iteration.

    Iterates the lazy chain (P + I)/2, which has the same stationary vector
    but cannot be periodic, so the iteration converges on any connected
    graph.  The reported residual is the max-norm of ``pi P - pi`` for the
    original matrix.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    m = P.matrix
    x = np.full(P.n, 1.0 / P.n)
    residual = np.inf
    for it in range(max_iter):
        y = x @ m
        residual = float(np.max(np.abs(y - x)))
        if residual <= tol:
            return StationaryDistribution(pi=x / x.sum(), residual=residual)
        x = 0.5 * (x + y)
        x /= x.sum()
    raise ConvergenceError(residual=residual, iterations=max_iter)


def propagate(P: TransitionMatrix, u: int, steps: int) -> Iterator[np.ndarray]:
    """Yield occupancy vectors v_0 .. v_steps for a walk started in cell u.

    v_0 is the unit vector at u and v_k = v_{k-1} P.  Vectors are produced
    one at a time so callers never materialize matrix powers.
    """
    if not 0 <= u < P.n:
        raise ValueError(f"cell id {u} out of range for {P.n} cells")
    if steps < 0:
        raise ValueError("step count must be nonnegative")
    v = np.zeros(P.n)
    v[u] = 1.0
    yield v.copy()
    for _ in range(steps):
        v = v @ P.matrix
        yield v
