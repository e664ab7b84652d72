"""Lattice-path families and the generalized-model deviation and covariance.

Plain paths take ``k`` steps from (0, 0) to (k, 0) with up/down/level moves;
alternating paths take ``2k`` steps where odd-numbered steps go down or stay
level and even-numbered steps go up or stay level. Steps are encoded as
``+1`` (up), ``-1`` (down) and ``0`` (level).

For a path: ``a_j`` counts level steps at height ``j`` and ``b_j`` counts
down steps from ``j`` to ``j - 1``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .ensembles import GeneralModelSpec, evaluate
from .errors import DomainError, EnumerationSizeError

MAX_PLAIN_K = 12
MAX_ALTERNATING_K = 10

_SYMBOL = {1: "U", -1: "D", 0: "L"}


@dataclass(frozen=True)
class LatticePath:
    steps: tuple
    alternating: bool = False

    def __post_init__(self):
        steps = tuple(int(s) for s in self.steps)
        if any(s not in (-1, 0, 1) for s in steps):
            raise DomainError("steps must be -1, 0 or +1")
        if sum(steps) != 0:
            raise DomainError("path must return to level 0")
        if self.alternating:
            if len(steps) % 2:
                raise DomainError("alternating paths have even length")
            for p, s in enumerate(steps):
                if (p % 2 == 0 and s == 1) or (p % 2 == 1 and s == -1):
                    raise DomainError("alternating paths go down/level on odd steps, up/level on even steps")
        object.__setattr__(self, "steps", steps)

    @property
    def down_count(self) -> int:
        return sum(1 for s in self.steps if s == -1)

    def __str__(self):
        return "".join(_SYMBOL[s] for s in self.steps)


@dataclass(frozen=True)
class PathProfile:
    a: dict
    b: dict
    min_level: int
    max_level: int

    @property
    def depth(self) -> int:
        return -self.min_level


def profile(path: LatticePath) -> PathProfile:
    a, b, lo, hi = _fast_profile(path.steps)
    return PathProfile(a, b, lo, hi)


def family_size(k: int, r: int, alternating: bool = False) -> int:
    """``k! / (r! r! (k-2r)!)`` (plain) or ``C(k, r)^2`` (alternating)."""
    if alternating:
        return comb(k, r) ** 2 if 0 <= r <= k else 0
    return factorial(k) // (factorial(r) ** 2 * factorial(k - 2 * r)) if 0 <= 2 * r <= k else 0


def _check_kr(k, r, alternating):
    if int(k) != k or k < 0:
        raise DomainError("k must be a nonnegative integer")
    top = k if alternating else k // 2
    if int(r) != r or not 0 <= r <= top:
        raise DomainError(f"r must lie in [0, {top}]")
    limit = MAX_ALTERNATING_K if alternating else MAX_PLAIN_K
    if k > limit:
        raise EnumerationSizeError(f"k = {k} exceeds the enumeration limit {limit}")
    return int(k), int(r)


def _dfs(k, r, alternating):
    length = 2 * k if alternating else k
    out = []
    steps = []

    def rec(pos, y, downs, ups):
        if pos == length:
            if y == 0:
                out.append(tuple(steps))
            return
        remaining = length - pos
        if abs(y) > remaining:
            return
        if alternating:
            choices = (-1, 0) if pos % 2 == 0 else (1, 0)
        else:
            choices = (1, -1, 0)
        for s in choices:
            nd, nu = downs + (s == -1), ups + (s == 1)
            if nd > r or nu > r:
                continue
            # the remaining r - nd downs and r - nu ups still have to fit
            if (r - nd) + (r - nu) > remaining - 1:
                continue
            steps.append(s)
            rec(pos + 1, y + s, nd, nu)
            steps.pop()

    rec(0, 0, 0, 0)
    return out


_cache: dict = {}
_lock = threading.Lock()


def _raw(k, r, alternating):
    key = (k, r, alternating)
    hit = _cache.get(key)
    if hit is None:
        with _lock:
            hit = _cache.get(key)
            if hit is None:
                hit = _cache[key] = tuple(_dfs(k, r, alternating))
    return hit


def enumerate_paths(k: int, r: int, alternating: bool = False) -> list:
    """All paths with ``r`` down steps (length ``k`` plain, ``2k`` alternating)."""
    k, r = _check_kr(k, r, alternating)
    return [LatticePath(s, alternating) for s in _raw(k, r, alternating)]


def descent_class_count(k: int, r: int, i: int, alternating: bool = False) -> int:
    """Number of paths whose minimum level is exactly ``-i``."""
    if i < 0:
        raise DomainError("i must be nonnegative")
    return class_sums(k, r, alternating).depth_histogram.get(int(i), 0)


def height_class_count(k: int, r: int, i: int, alternating: bool = False) -> int:
    """Number of paths whose maximum level is exactly ``i``."""
    if i < 0:
        raise DomainError("i must be nonnegative")
    return class_sums(k, r, alternating).height_histogram.get(int(i), 0)


@dataclass(frozen=True)
class ClassSums:
    """Aggregates over one path family used by the general-model formulas."""

    count: int
    depth_sum: int          # sum of max descent depth
    height_sum: int         # sum of max height
    level_moment: int       # sum_P sum_j j a_j
    down_moment: int        # sum_P sum_j j b_j
    level_pairs: int        # sum_P sum_j C(a_j, 2)
    down_pairs: int         # sum_P sum_j C(2 b_j, 2)
    depth_histogram: dict
    height_histogram: dict


_sums_cache: dict = {}


def class_sums(k: int, r: int, alternating: bool = False) -> ClassSums:
    k, r = _check_kr(k, r, alternating)
    key = (k, r, alternating)
    hit = _sums_cache.get(key)
    if hit is not None:
        return hit
    dep = hei = A = B = C = D = 0
    dh, hh = {}, {}
    paths = _raw(k, r, alternating)
    for st in paths:
        a, b, lo, hi = _fast_profile(st)
        dep += -lo
        hei += hi
        dh[-lo] = dh.get(-lo, 0) + 1
        hh[hi] = hh.get(hi, 0) + 1
        A += sum(j * c for j, c in a.items())
        B += sum(j * c for j, c in b.items())
        C += sum(c * (c - 1) // 2 for c in a.values())
        D += sum(c * (2 * c - 1) for c in b.values())
    out = ClassSums(len(paths), dep, hei, A, B, C, D, dh, hh)
    with _lock:
        _sums_cache[key] = out
    return out


def _fast_profile(steps):
    y = lo = hi = 0
    a, b = {}, {}
    for s in steps:
        if s == 0:
            a[y] = a.get(y, 0) + 1
        elif s < 0:
            b[y] = b.get(y, 0) + 1
        y += s
        if y < lo:
            lo = y
        elif y > hi:
            hi = y
    return a, b, lo, hi


def count_table(kmax: int, alternating: bool = False):
    """Rows ``(k, r, i, count)`` for every nonempty descent class with ``k <= kmax``."""
    rows = []
    for k in range(1, kmax + 1):
        for r in range(0, (k if alternating else k // 2) + 1):
            for i, c in sorted(class_sums(k, r, alternating).depth_histogram.items()):
                rows.append((k, r, i, c))
    return rows


# -- quadrature ----------------------------------------------------------------------

_GL_U, _GL_W = np.polynomial.legendre.leggauss(64)


def _nodes(levels: int = 1):
    """Composite Gauss-Legendre nodes in ``u`` on [0, 1], mapped through ``x = u^2``."""
    m = 2**levels
    u = np.concatenate([(_GL_U + 1) / (2 * m) + j / m for j in range(m)])
    w = np.tile(_GL_W / (2 * m), m)
    return u * u, 2 * u * w


_X1, _W1 = _nodes(1)
_X0, _W0 = _nodes(0)


def integrate01(fn, with_error: bool = False):
    """``int_0^1 fn(x) dx`` after the substitution ``x = u^2`` (absorbs ``sqrt(x)`` endpoints).

    A 64-node rule and its bisected 128-node version are compared; the latter
    is returned, with ``|fine - coarse|`` as error estimate when requested.
    """
    fine = float(np.dot(_W1, evaluate(fn, _X1)))
    if not math.isfinite(fine):
        raise DomainError("integrand is not finite on [0, 1]")
    if with_error:
        coarse = float(np.dot(_W0, evaluate(fn, _X0)))
        return fine, abs(fine - coarse)
    return fine


def central_difference(fn, x):
    """Fourth-order central difference, step ``eps^(1/5)`` shrunk to stay inside [0, 1]."""
    x = np.asarray(x, dtype=float)
    h = np.minimum(np.finfo(float).eps ** 0.2, np.minimum(x, 1 - x) / 4)
    h = np.where(h > 0, h, np.finfo(float).eps ** 0.2)
    f = lambda t: evaluate(fn, t)
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


class _Profile:
    """f, g and derivatives sampled once on the quadrature nodes."""

    def __init__(self, spec: GeneralModelSpec):
        x = _X1
        self.spec = spec
        self.f = evaluate(spec.f, x)
        self.g = evaluate(spec.g, x)
        self.fp = evaluate(spec.f_prime, x) if spec.f_prime else central_difference(spec.f, x)
        self.gp = evaluate(spec.g_prime, x) if spec.g_prime else central_difference(spec.g, x)
        self.f_end = [float(evaluate(spec.f, np.array([t]))[0]) for t in (0.0, 1.0)]
        self.g_end = [float(evaluate(spec.g, np.array([t]))[0]) for t in (0.0, 1.0)]
        self._memo = {}

    def integral(self, p: int, q: int, extra: str = "") -> float:
        """``int f^p g^q`` times ``f'`` or ``g'`` when ``extra`` is ``"f"`` or ``"g"``."""
        key = (p, q, extra)
        if key not in self._memo:
            if p < 0 or q < 0:
                raise DomainError(f"negative exponent in integrand f^{p} g^{q}")
            vals = self.f**p * self.g**q
            if extra == "f":
                vals = vals * self.fp
            elif extra == "g":
                vals = vals * self.gp
            out = float(np.dot(_W1, vals))
            if not math.isfinite(out):
                raise DomainError(f"non-finite integral for exponents ({p}, {q}) {extra}")
            self._memo[key] = out
        return self._memo[key]

    def endpoint(self, x: int, p: int, q: int) -> float:
        return self.f_end[x] ** p * self.g_end[x] ** q


def multinomial(k: int, r: int) -> int:
    return factorial(k) // (factorial(r) ** 2 * factorial(k - 2 * r))


def general_moment(k: int, spec: GeneralModelSpec) -> float:
    """Limiting ``k``-th moment of the general model's spectrum.

    Tridiagonal: ``sum_r k!/(r! r! (k-2r)!) int f^(k-2r) g^(2r)``.
    Bidiagonal (Gram matrix): ``sum_r C(k, r)^2 int f^(2k-2r) g^(2r)``.
    """
    if int(k) != k or k < 0:
        raise DomainError("k must be a nonnegative integer")
    P = _Profile(spec)
    if spec.bidiagonal:
        return sum(comb(k, r) ** 2 * P.integral(2 * k - 2 * r, 2 * r) for r in range(k + 1))
    return sum(multinomial(k, r) * P.integral(k - 2 * r, 2 * r) for r in range(k // 2 + 1))


def general_deviation(i: int, spec: GeneralModelSpec, variant: str = "corrected") -> float:
    """First-order correction ``mu_i`` to ``E tr M^i - n m_i``.

    For each down-step count ``r`` with ``h_r = f^(L-2r) g^(2r)`` (``L = i``
    plain, ``2i`` alternating), the corrected form adds

    * ``-h_r(1) * sum_P depth(P) - h_r(0) * sum_P height(P)`` (truncated paths at the two ends),
    * ``(|family| / 2) * (h_r(1) - h_r(0))`` (Riemann-sum endpoint correction),
    * ``-(sum j a_j) int f^(L-2r-1) g^(2r) f' - 2 (sum j b_j) int f^(L-2r) g^(2r-1) g'``,
    * ``sigma2 * (sum C(a_j, 2)) int f^(L-2r-2) g^(2r) + eta2 * (sum C(2 b_j, 2)) int f^(L-2r) g^(2r-2)``.

    ``variant="printed"`` uses instead the end terms
    ``h_r(1) (S_r - |family|/2) + h_r(0) (S_r - 3|family|/2)`` with
    ``S_r = sum_{j<r} (r - j) * descent_class_count(i, r, j)``.
    """
    if variant not in ("corrected", "printed"):
        raise DomainError(f"unknown variant {variant!r}")
    i = int(i)
    if i < 1:
        raise DomainError("i must be positive")
    alt = spec.bidiagonal
    L = 2 * i if alt else i
    P = _Profile(spec)
    total = 0.0
    for r in range(0, (i if alt else i // 2) + 1):
        cs = class_sums(i, r, alt)
        M = cs.count
        nf, ng = L - 2 * r, 2 * r
        h0, h1 = P.endpoint(0, nf, ng), P.endpoint(1, nf, ng)
        if variant == "corrected":
            t = -h1 * cs.depth_sum - h0 * cs.height_sum + 0.5 * M * (h1 - h0)
        else:
            S = sum((r - j) * cs.depth_histogram.get(j, 0) for j in range(r))
            t = h1 * (S - 0.5 * M) + h0 * (S - 1.5 * M)
        if cs.level_moment:
            t -= cs.level_moment * P.integral(nf - 1, ng, "f")
        if cs.down_moment:
            t -= 2 * cs.down_moment * P.integral(nf, ng - 1, "g")
        if spec.sigma2 and cs.level_pairs:
            t += spec.sigma2 * cs.level_pairs * P.integral(nf - 2, ng)
        if spec.eta2 and cs.down_pairs:
            t += spec.eta2 * cs.down_pairs * P.integral(nf, ng - 2)
        total += t
    return total


def general_covariance(i: int, j: int, spec: GeneralModelSpec) -> float:
    """Limiting ``Cov(tr M^i, tr M^j)`` of the general model.

    Tridiagonal::

        sigma2 * sum_{r,s} (i-2r)(j-2s) m(i,r) m(j,s) int f^(i+j-2r-2s-2) g^(2r+2s)
      + eta2   * sum_{r,s>=1} 4 r s m(i,r) m(j,s) int f^(i+j-2r-2s) g^(2r+2s-2)

    with ``m(i, r)`` the multinomial and ranges restricted to nonzero weights.
    Bidiagonal::

        4 sigma2 * sum_{1<=r<=i, 1<=s<=j} r s C(i,r)^2 C(j,s)^2 int f^(2(r+s-1)) g^(2(i+j-r-s))
      + 4 eta2   * sum_{r<i, s<j} (i-r)(j-s) C(i,r)^2 C(j,s)^2 int f^(2(r+s)) g^(2(i+j-r-s-1))
    """
    i, j = int(i), int(j)
    if i < 1 or j < 1:
        raise DomainError("i and j must be positive")
    if spec.sigma2 == 0 and spec.eta2 == 0:
        return 0.0
    P = _Profile(spec)
    tot = 0.0
    if spec.bidiagonal:
        if spec.sigma2:
            tot += 4 * spec.sigma2 * sum(
                r * s * comb(i, r) ** 2 * comb(j, s) ** 2 * P.integral(2 * (r + s - 1), 2 * (i + j - r - s))
                for r in range(1, i + 1) for s in range(1, j + 1))
        if spec.eta2:
            tot += 4 * spec.eta2 * sum(
                (i - r) * (j - s) * comb(i, r) ** 2 * comb(j, s) ** 2 * P.integral(2 * (r + s), 2 * (i + j - r - s - 1))
                for r in range(i) for s in range(j))
        return tot
    if spec.sigma2:
        tot += spec.sigma2 * sum(
            (i - 2 * r) * (j - 2 * s) * multinomial(i, r) * multinomial(j, s) * P.integral(i + j - 2 * r - 2 * s - 2, 2 * r + 2 * s)
            for r in range((i - 1) // 2 + 1) for s in range((j - 1) // 2 + 1))
    if spec.eta2:
        tot += spec.eta2 * sum(
            4 * r * s * multinomial(i, r) * multinomial(j, s) * P.integral(i + j - 2 * r - 2 * s, 2 * r + 2 * s - 2)
            for r in range(1, i // 2 + 1) for s in range(1, j // 2 + 1))
    return tot


def general_covariance_matrix(kmax: int, spec: GeneralModelSpec) -> np.ndarray:
    C = np.empty((kmax, kmax))
    for a in range(kmax):
        for b in range(a, kmax):
            C[a, b] = C[b, a] = general_covariance(a + 1, b + 1, spec)
    return C
