"""Eigenvalue counting for symmetric tridiagonal matrices by Sturm sequences.

For diagonal ``D`` and squared off-diagonal ``E`` the recurrence

    t_1 = D_1 - sigma,    t_i = D_i - sigma - E_{i-1} / t_{i-1}

produces the pivots of the LDL^T factorization of ``T - sigma I``; the number
of negative pivots equals the number of eigenvalues ``<= sigma``. Each count
costs O(n) and never forms an eigenvalue.

A pivot whose magnitude falls below ``eps * (|D_i| + |sigma| + E_{i-1})`` is
replaced by a signed floor of that size, with an exact zero treated as
negative (so an eigenvalue equal to ``sigma`` is counted).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .ensembles import TridiagonalSymmetric, hermite_beta_infinity_squared
from .errors import DomainError
from .parallel import ordered_map

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@numba.njit(cache=True, nogil=True)
def _count_le(D, E, sigma):
    n = D.shape[0]
    scale = abs(D[0]) + abs(sigma)
    t = D[0] - sigma
    floor = _EPS * scale + _TINY
    if abs(t) < floor:
        t = floor if t > 0 else -floor
    count = 1 if t < 0 else 0
    for i in range(1, n):
        e = E[i - 1]
        t = D[i] - sigma - e / t
        floor = _EPS * (abs(D[i]) + abs(sigma) + e) + _TINY
        if abs(t) < floor:
            t = floor if t > 0 else -floor
        if t < 0:
            count += 1
    return count


@numba.njit(cache=True, nogil=True)
def _count_many(D, E, sigmas):
    out = np.empty(sigmas.shape[0], dtype=np.int64)
    for j in range(sigmas.shape[0]):
        out[j] = _count_le(D, E, sigmas[j])
    return out


def _as_pair(T):
    """Return contiguous float arrays ``(D, E)`` with ``E`` the squared off-diagonal."""
    if isinstance(T, TridiagonalSymmetric):
        return np.ascontiguousarray(T.diag), np.ascontiguousarray(T.offdiag_squared())
    try:
        D, E = T
    except (TypeError, ValueError):
        raise DomainError("expected a TridiagonalSymmetric or a (D, E_squared) pair") from None
    D = np.ascontiguousarray(D, dtype=float)
    E = np.ascontiguousarray(E, dtype=float)
    if D.ndim != 1 or D.size < 1 or E.shape != (D.size - 1,):
        raise DomainError("D must be a non-empty vector and E one shorter")
    if not (np.all(np.isfinite(D)) and np.all(np.isfinite(E))):
        raise DomainError("non-finite matrix entries")
    if np.any(E < 0):
        raise DomainError("squared off-diagonal entries must be nonnegative")
    return D, E


def sturm_count(T, sigma: float) -> int:
    """Number of eigenvalues ``<= sigma``.

    ``T`` is a :class:`TridiagonalSymmetric` or a raw ``(D, E)`` pair where
    ``E`` already holds the squared off-diagonal entries.
    """
    D, E = _as_pair(T)
    sigma = float(sigma)
    if not math.isfinite(sigma):
        raise DomainError("sigma must be finite")
    return int(_count_le(D, E, sigma))


def sturm_counts(T, sigmas) -> np.ndarray:
    """Vectorised :func:`sturm_count` over an array of shifts."""
    D, E = _as_pair(T)
    s = np.ascontiguousarray(sigmas, dtype=float).ravel()
    if not np.all(np.isfinite(s)):
        raise DomainError("shifts must be finite")
    return _count_many(D, E, s)


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    n: int
    below_first: int
    above_last: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def density(self) -> np.ndarray:
        """Counts normalised to a probability density (integrates to the in-range fraction)."""
        return self.counts / (self.n * self.widths)

    def as_dict(self) -> dict:
        return {"edges": self.edges.tolist(), "counts": self.counts.tolist(), "n": self.n,
                "below_first": self.below_first, "above_last": self.above_last}


def _check_edges(edges) -> np.ndarray:
    e = np.asarray(edges, dtype=float).ravel()
    if e.size < 2:
        raise DomainError("need at least two edges")
    if not np.all(np.isfinite(e)):
        raise DomainError("edges must be finite")
    if np.any(np.diff(e) <= 0):
        raise DomainError("edges must be strictly increasing")
    return e


def histogram(T, edges) -> Histogram:
    """Bin the spectrum into ``(edges[j], edges[j+1]]`` using one count per edge."""
    D, E = _as_pair(T)
    e = _check_edges(edges)
    c = _count_many(D, E, e)
    n = D.size
    return Histogram(edges=e, counts=np.diff(c), n=n, below_first=int(c[0]), above_last=int(n - c[-1]))


def count_in_interval(T, lo: float, hi: float) -> int:
    """Eigenvalues in ``(lo, hi]``."""
    if not lo < hi:
        raise DomainError("require lo < hi")
    D, E = _as_pair(T)
    c = _count_many(D, E, np.array([lo, hi], dtype=float))
    return int(c[1] - c[0])


def _semicircle_antiderivative(x):
    return 0.5 * (x * math.sqrt(max(0.0, 1.0 - x * x)) + math.asin(x))


def semicircle_mass(lo: float, hi: float) -> float:
    """``(2/pi) * integral of sqrt(1-x^2)`` over ``[lo, hi]`` (clipped to ``[-1, 1]``)."""
    lo, hi = max(-1.0, float(lo)), min(1.0, float(hi))
    if hi <= lo:
        return 0.0
    return (_semicircle_antiderivative(hi) - _semicircle_antiderivative(lo)) * 2.0 / math.pi


def theoretical_count_deviation(lo: float, hi: float) -> float:
    """Limit of ``count - n * semicircle mass`` for beta = inf Hermite on ``[lo, hi]``.

    The arcsine part ``(asin hi - asin lo) / (2 pi)`` is offset by ``1/4`` for
    each of the points -1, +1 lying in the closed interval.
    """
    lo, hi = float(lo), float(hi)
    if not (-1.0 <= lo < hi <= 1.0):
        raise DomainError("require -1 <= lo < hi <= 1")
    dev = (math.asin(hi) - math.asin(lo)) / (2.0 * math.pi)
    if lo <= -1.0:
        dev -= 0.25
    if hi >= 1.0:
        dev -= 0.25
    return dev


@dataclass
class DeviationReport:
    interval: tuple
    ns: np.ndarray
    per_n_deviations: np.ndarray
    theoretical: float
    mean_deviation: float = field(init=False)

    def __post_init__(self):
        self.per_n_deviations = np.asarray(self.per_n_deviations, dtype=float)
        self.mean_deviation = float(np.mean(self.per_n_deviations))

    def as_dict(self) -> dict:
        return {"lo": self.interval[0], "hi": self.interval[1], "ns": [int(x) for x in self.ns],
                "per_n_deviations": self.per_n_deviations.tolist(),
                "mean_deviation": self.mean_deviation, "theoretical": self.theoretical}


def _deviation_at(n: int, lo: float, hi: float) -> float:
    D, E = hermite_beta_infinity_squared(n)
    c = _count_many(D, E, np.array([lo, hi]))
    return float(c[1] - c[0]) - n * semicircle_mass(lo, hi)


def deviation_experiment(n_start: int, n_count: int, lo: float, hi: float, workers=None) -> DeviationReport:
    """Count deviation from ``n * semicircle mass`` on beta = inf Hermite, n in a range."""
    if n_start < 1 or n_count < 1:
        raise DomainError("n_start and n_count must be positive")
    theo = theoretical_count_deviation(lo, hi)
    ns = np.arange(n_start, n_start + n_count)
    devs = ordered_map(lambda n: _deviation_at(int(n), lo, hi), ns, workers)
    return DeviationReport(interval=(float(lo), float(hi)), ns=ns, per_n_deviations=np.array(devs), theoretical=theo)
