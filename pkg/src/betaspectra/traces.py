"""Traces of matrix powers for tridiagonal matrices, and centred trace statistics.

``tr(T^k)`` is accumulated row by row: with ``v_j = T^j e_i`` (supported on
``i-j .. i+j``) we have ``(T^k)_{ii} = <v_{k//2}, v_{k - k//2}>``, so only the
local vectors up to ``ceil(kmax/2)`` are needed. Cost is O(n kmax^2), memory
O(kmax^2), and the row sums use Neumaier compensated summation.
"""
from __future__ import annotations

import numba
import numpy as np

from . import theory
from .ensembles import LowerBidiagonal, TridiagonalSymmetric
from .errors import DomainError


@numba.njit(cache=True, nogil=True)
def _traces_one(d, e, kmax, out):
    n = d.shape[0]
    b = (kmax + 1) // 2
    w = 2 * b + 1
    V = np.zeros((b + 1, w))
    s = np.zeros(kmax)
    c = np.zeros(kmax)
    for i in range(n):
        V[:, :] = 0.0
        V[0, b] = 1.0
        for j in range(b):
            lo = b - j - 1 if b - j - 1 > 0 else 0
            hi = b + j + 2 if b + j + 2 < w else w
            for q in range(lo, hi):
                p = i - b + q
                if p < 0 or p >= n:
                    continue
                acc = d[p] * V[j, q]
                if q > 0 and p > 0:
                    acc += e[p - 1] * V[j, q - 1]
                if q + 1 < w and p + 1 < n:
                    acc += e[p] * V[j, q + 1]
                V[j + 1, q] = acc
        for k in range(1, kmax + 1):
            a = k // 2
            r = k - a
            x = 0.0
            for q in range(w):
                x += V[a, q] * V[r, q]
            # Neumaier update
            t = s[k - 1] + x
            if abs(s[k - 1]) >= abs(x):
                c[k - 1] += (s[k - 1] - t) + x
            else:
                c[k - 1] += (x - t) + s[k - 1]
            s[k - 1] = t
    for k in range(kmax):
        out[k] = s[k] + c[k]


@numba.njit(cache=True, nogil=True)
def _traces_batch(D, E, kmax, out):
    for m in range(D.shape[0]):
        _traces_one(D[m], E[m], kmax, out[m])


def _dense_traces(d, e, kmax):
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    out = np.empty(kmax)
    P = np.eye(len(d))
    for k in range(kmax):
        P = P @ T
        out[k] = np.trace(P)
    return out


def gram_tridiagonal(B: LowerBidiagonal) -> TridiagonalSymmetric:
    """``B B^T`` for a lower bidiagonal ``B``."""
    d, s = B.diag, B.subdiag
    diag = d**2
    diag[1:] += s**2
    return TridiagonalSymmetric(diag, d[:-1] * s)


def gram_batch(diag: np.ndarray, sub: np.ndarray):
    """Row-wise ``B B^T`` for stacked factors: returns ``(diag, offdiag)`` arrays."""
    gd = diag**2
    gd[:, 1:] += sub**2
    return gd, diag[:, :-1] * sub


def trace_powers(T: TridiagonalSymmetric, kmax: int) -> np.ndarray:
    """``[tr T, tr T^2, ..., tr T^kmax]``."""
    kmax = int(kmax)
    if kmax < 1:
        raise DomainError("kmax must be at least 1")
    if kmax >= T.n:
        return _dense_traces(T.diag, T.offdiag, kmax)
    out = np.empty(kmax)
    _traces_one(np.ascontiguousarray(T.diag), np.ascontiguousarray(T.offdiag), kmax, out)
    return out


def trace_powers_batch(diag: np.ndarray, offdiag: np.ndarray, kmax: int) -> np.ndarray:
    """Traces for a stack of matrices given as ``(m, n)`` and ``(m, n-1)`` arrays."""
    kmax = int(kmax)
    if kmax < 1:
        raise DomainError("kmax must be at least 1")
    D = np.ascontiguousarray(diag, dtype=float)
    E = np.ascontiguousarray(offdiag, dtype=float)
    if D.ndim != 2 or E.shape != (D.shape[0], D.shape[1] - 1):
        raise DomainError("diag must be (m, n) and offdiag (m, n-1)")
    if kmax >= D.shape[1]:
        return np.array([_dense_traces(D[m], E[m], kmax) for m in range(D.shape[0])])
    out = np.empty((D.shape[0], kmax))
    _traces_batch(D, E, kmax, out)
    return out


def hermite_centering(n: int, kmax: int, beta: float) -> np.ndarray:
    """``n * semicircle moment + (2/beta - 1) * deviation moment`` for i = 1..kmax."""
    return np.array([n * theory.semicircle_moment(i) + (2.0 / beta - 1.0) * theory.dev_moment_hermite(i)
                     for i in range(1, kmax + 1)])


def laguerre_centering(n: int, kmax: int, beta: float, gamma: float) -> np.ndarray:
    return np.array([n * theory.mp_moment(i, gamma) + (2.0 / beta - 1.0) * theory.dev_moment_laguerre(i, gamma)
                     for i in range(1, kmax + 1)])


def centered_hermite(T: TridiagonalSymmetric, kmax: int, beta: float) -> np.ndarray:
    """``X_i = tr T^i - n m_i - (2/beta - 1) mu_i`` against the semicircle law."""
    return trace_powers(T, kmax) - hermite_centering(T.n, kmax, beta)


def centered_laguerre(L: TridiagonalSymmetric, kmax: int, beta: float, gamma: float) -> np.ndarray:
    """Same as :func:`centered_hermite` for a scaled Laguerre Gram matrix."""
    return trace_powers(L, kmax) - laguerre_centering(L.n, kmax, beta, gamma)
