"""Location profiles and optimal sequential paging costs.

Given the last-interaction cell, the probability of finding the user in
each cell at the next call is a crossing-count mixture of k-step walk
vectors.  Paging cells one at a time in decreasing probability order is the
cost-optimal search; its mean cost is the rank-weighted sum of the sorted
profile.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mobility import StationaryDistribution, TransitionMatrix, propagate, stationary_distribution, symmetric_random_walk
from .residence import CrossingPmf, ResidenceModel, crossing_pmf
from .topology import CellGraph

_PROFILE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LocationProfile:
    """Cell-occupancy probabilities at the next call, given the LI cell."""

    li_cell: int
    probs: np.ndarray
    tail_assigned: float

    def __post_init__(self) -> None:
        v = np.array(self.probs, dtype=float)
        if v.min() < 0:
            raise ValueError("profile probabilities must be nonnegative")
        if abs(v.sum() - 1.0) > _PROFILE_TOL:
            raise ValueError("profile probabilities must sum to 1")
        v.flags.writeable = False
        object.__setattr__(self, "probs", v)

    @property
    def n(self) -> int:
        return len(self.probs)


@dataclass(frozen=True, eq=False)
class CostReport:
    """Sequential paging costs for one (shape, cmr) parameter point."""

    gamma: float
    variance: float
    cmr: float
    per_cell: np.ndarray
    total: float
    flooding: int
    savings: float

    def __post_init__(self) -> None:
        c = np.array(self.per_cell, dtype=float)
        n = self.flooding
        if c.min() < 1.0 - 1e-9 or c.max() > n + 1e-9:
            raise ValueError("per-cell costs must lie in [1, n]")
        if not 1.0 - 1e-9 <= self.total <= n + 1e-9:
            raise ValueError("total cost must lie in [1, n]")
        c.flags.writeable = False
        object.__setattr__(self, "per_cell", c)


def _probs_of(profile) -> np.ndarray:
    if isinstance(profile, LocationProfile):
        return profile.probs
    return np.asarray(profile, dtype=float)


def location_profile(
    P: TransitionMatrix, pmf: CrossingPmf, pi: StationaryDistribution, u: int
) -> LocationProfile:
    """Mix k-step walk vectors by the crossing pmf.

    The truncated geometric tail is assigned to the stationary distribution:
    the propagated vectors converge to it for large k, and the assignment
    keeps the profile summing to 1 exactly.
    """
    n = P.n
    if len(pi.pi) != n:
        raise ValueError("stationary distribution dimension does not match matrix")
    if not 0 <= u < n:
        raise ValueError(f"cell id {u} out of range for {n} cells")
    acc = np.zeros(n)
    for k, v in enumerate(propagate(P, u, pmf.k_max)):
        acc += pmf.probs[k] * v
    acc += pmf.tail * pi.pi
    return LocationProfile(li_cell=u, probs=acc, tail_assigned=pmf.tail)


def query_order(profile) -> np.ndarray:
    """Cell ids in paging order: decreasing probability, ties by lower id."""
    probs = _probs_of(profile)
    return np.lexsort((np.arange(len(probs)), -probs))


def sequential_cost(profile) -> float:
    """Mean number of cells paged when polling in decreasing-probability order.

    Accepts a LocationProfile or any probability vector.  The descending
    order minimizes the rank-weighted sum, so this is the optimal mean cost.
    """
    probs = _probs_of(profile)
    q = probs[query_order(probs)]
    return float(np.arange(1, len(q) + 1, dtype=float) @ q)


def _profile_matrix(P: TransitionMatrix, pmf: CrossingPmf, pi: StationaryDistribution) -> np.ndarray:
    """Rows are location profiles for every LI cell (batched location_profile)."""
    n = P.n
    acc = pmf.probs[0] * np.eye(n)
    walk = np.eye(n)
    for k in range(1, pmf.k_max + 1):
        walk = walk @ P.matrix
        acc += pmf.probs[k] * walk
    acc += pmf.tail * pi.pi
    return acc


def total_cost(P: TransitionMatrix, pmf: CrossingPmf, pi: StationaryDistribution) -> CostReport:
    """Stationary-weighted mean paging cost over all LI cells."""
    n = P.n
    if len(pi.pi) != n:
        raise ValueError("stationary distribution dimension does not match matrix")
    profiles = _profile_matrix(P, pmf, pi)
    ranks = np.arange(1, n + 1, dtype=float)
    per_cell = np.sort(profiles, axis=1)[:, ::-1] @ ranks
    total = float(pi.pi @ per_cell)
    return CostReport(
        gamma=pmf.model.shape,
        variance=pmf.model.variance,
        cmr=pmf.cmr,
        per_cell=per_cell,
        total=total,
        flooding=n,
        savings=1.0 - total / n,
    )


def sweep(
    graph: CellGraph,
    gamma_list,
    cmr_list,
    lambda_m: float = 1.0,
    tol: float = 1e-12,
) -> list[CostReport]:
    """Cost reports over a (shape, cmr) grid on one service area.

    Rows are ordered shape-major (in the order given), cmr ascending.  The
    mobility rate only fixes the time unit; costs depend on the rates solely
    through their ratio.
    """
    gammas = list(gamma_list)
    cmrs = sorted(cmr_list)
    if not gammas or not cmrs:
        raise ValueError("gamma and cmr lists must be nonempty")
    if min(gammas) <= 0:
        raise ValueError("all shape values must be positive")
    if min(cmrs) <= 0:
        raise ValueError("all cmr values must be positive")
    if not lambda_m > 0:
        raise ValueError("mobility rate must be positive")
    P = symmetric_random_walk(graph)
    pi = stationary_distribution(P, tol=min(tol, 1e-12))
    reports = []
    for g in gammas:
        model = ResidenceModel(shape=g, mobility_rate=lambda_m)
        for p in cmrs:
            pmf = crossing_pmf(model, call_rate=p * lambda_m, tol=tol)
            reports.append(total_cost(P, pmf, pi))
    return reports
