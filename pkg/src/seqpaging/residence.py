"""Gamma-distributed cell residence times and the crossing-count law.

The dwell time in a cell is Gamma with shape ``gamma`` and rate
``gamma * mobility_rate``, so the mean is ``1 / mobility_rate`` regardless
of shape and the variance is ``1 / (gamma * mobility_rate**2)``.  Shape 1
recovers the exponential distribution.

Calls arrive as a Poisson process with rate ``call_rate``; the number of
cell boundaries crossed between the last interaction and the next call has
a closed-form probability mass function with a geometric tail whose ratio
is the dwell-time Laplace transform evaluated at the call rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

_PMF_TOL = 1e-12


def _eval(t, fn):
    """Apply fn to a scalar or array of nonnegative times."""
    a = np.asarray(t, dtype=float)
    if np.any(a < 0):
        raise ValueError("time must be nonnegative")
    out = fn(a)
    return float(out) if a.ndim == 0 else out


@dataclass(frozen=True)
class ResidenceModel:
    """Gamma dwell-time law with mean ``1 / mobility_rate``.

    Parameters
    ----------
    shape : float
        Gamma shape parameter; smaller shape means larger variance.
    mobility_rate : float
        Cell crossings per unit time in steady state (reciprocal mean dwell).
    """

    shape: float
    mobility_rate: float

    def __post_init__(self) -> None:
        if not self.shape > 0:
            raise ValueError("shape must be positive")
        if not self.mobility_rate > 0:
            raise ValueError("mobility rate must be positive")

    @property
    def rate(self) -> float:
        """Gamma rate parameter (shape / mean)."""
        return self.shape * self.mobility_rate

    @property
    def mean_dwell(self) -> float:
        return 1.0 / self.mobility_rate

    @property
    def variance(self) -> float:
        return 1.0 / (self.shape * self.mobility_rate**2)

    def laplace(self, s) -> float:
        """Laplace transform of the dwell density, ``(rate/(s+rate))**shape``.

        Strictly decreasing in s, equal to 1 at s = 0.
        """
        a = np.asarray(s, dtype=float)
        if np.any(a < 0):
            raise ValueError("transform argument must be nonnegative")
        out = np.exp(-self.shape * np.log1p(a / self.rate))
        return float(out) if a.ndim == 0 else out

    def dwell_cdf(self, t):
        return _eval(t, lambda a: special.gammainc(self.shape, self.rate * a))

    def dwell_survival(self, t):
        return _eval(t, lambda a: special.gammaincc(self.shape, self.rate * a))

    def equilibrium_cdf(self, t):
        """CDF of the residual dwell time seen from a stationary instant.

        Equals ``mobility_rate * integral_0^t survival(x) dx``; integrating
        by parts reduces it to regularized incomplete gamma terms, exact to
        machine precision (no quadrature error):

            mobility_rate * t * survival(t) + P(shape + 1, rate * t)
        """

        def f(a):
            x = self.rate * a
            val = self.mobility_rate * a * special.gammaincc(self.shape, x)
            val = val + special.gammainc(self.shape + 1.0, x)
            return np.minimum(val, 1.0)

        return _eval(t, f)


@dataclass(frozen=True, eq=False)
class CrossingPmf:
    """Distribution of the number of cells crossed in a paging interval.

    ``probs[k]`` is the probability of exactly k crossings for k up to the
    truncation index; ``tail`` is the analytic mass beyond it (a geometric
    remainder, carried explicitly rather than discarded).  For k >= 1 the
    pmf is geometric with ratio ``ratio`` (the dwell Laplace transform at
    the call rate).
    """

    call_rate: float
    cmr: float
    probs: np.ndarray
    tail: float
    ratio: float
    model: ResidenceModel

    def __post_init__(self) -> None:
        a = np.array(self.probs, dtype=float)
        if a.min() < 0:
            raise ValueError("crossing probabilities must be nonnegative")
        if self.tail < 0:
            raise ValueError("tail mass must be nonnegative")
        if abs(a.sum() + self.tail - 1.0) > _PMF_TOL:
            raise ValueError("crossing pmf and tail must sum to 1")
        a.flags.writeable = False
        object.__setattr__(self, "probs", a)

    @property
    def k_max(self) -> int:
        """Largest crossing count with explicitly stored mass."""
        return len(self.probs) - 1

    @property
    def mean_crossings(self) -> float:
        """Exact mean crossing count, truncated sum plus geometric tail mean."""
        k = np.arange(len(self.probs))
        truncated = float(k @ self.probs)
        kmax, f = self.k_max, self.ratio
        tail_mean = ((kmax + 1) * f**kmax * (1.0 - f) + f ** (kmax + 1)) / self.cmr
        return truncated + tail_mean


def crossing_pmf(model: ResidenceModel, call_rate: float, tol: float = _PMF_TOL) -> CrossingPmf:
    """Closed-form pmf of boundary crossings before the next call.

    With f the dwell Laplace transform at the call rate and p the
    call-to-mobility ratio:

        probs[0] = 1 - (1 - f) / p
        probs[k] = (1 - f)**2 * f**(k-1) / p      for k >= 1

    The vector is truncated at the smallest index whose remaining geometric
    mass ``(1 - f) * f**k_max / p`` drops below ``tol``; that remainder is
    recorded as ``tail``.  The pmf depends on the two rates only through
    their ratio.
    """
    if not call_rate > 0:
        raise ValueError("call rate must be positive")
    if not tol > 0:
        raise ValueError("truncation tolerance must be positive")
    p = call_rate / model.mobility_rate
    # exp/log1p form keeps 1 - f accurate when the ratio is close to 1
    log_f = -model.shape * math.log1p(p / model.shape)
    f = math.exp(log_f)
    one_minus_f = -math.expm1(log_f)
    rest = one_minus_f / p  # total mass on k >= 1; also the k = 0 remainder
    if rest < tol or log_f == 0.0:
        k_max = 0
    else:
        k_max = max(1, math.ceil((math.log(tol) - math.log(rest)) / log_f))
        while rest * math.exp(k_max * log_f) >= tol:
            k_max += 1
    probs = np.empty(k_max + 1)
    probs[0] = max(0.0, 1.0 - rest)
    if k_max >= 1:
        probs[1:] = (one_minus_f**2 / p) * np.power(f, np.arange(k_max))
    tail = rest * f**k_max
    return CrossingPmf(
        call_rate=call_rate, cmr=p, probs=probs, tail=tail, ratio=f, model=model
    )
