"""Closed-form reference values: law moments, deviation moments, limiting
covariances, finite-n expectation polynomials and Stieltjes transforms.

Two families are covered: the semicircle law on [-1, 1] (scaled Hermite) and
the Marchenko-Pastur law with aspect ``gamma`` on ``[(1-sqrt g)^2, (1+sqrt g)^2]``
(scaled Laguerre). The deviation measures are

* Hermite: ``(delta_{-1} + delta_{1})/4 - (1/2) * arcsine density on [-1, 1]``,
* Laguerre: ``(delta_a + delta_b)/4 - (1/2) * arcsine density on [a, b]``.

Where exactness matters the computation runs on :class:`fractions.Fraction`
and converts to float on return.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
from scipy import integrate

from .errors import DomainError, UnsupportedOrderError


def _nonneg_int(k, name="k") -> int:
    if int(k) != k or k < 0:
        raise DomainError(f"{name} must be a nonnegative integer")
    return int(k)


def _check_gamma(gamma):
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def mp_support(gamma: float):
    _check_gamma(gamma)
    s = math.sqrt(gamma)
    return (1 - s) ** 2, (1 + s) ** 2


# -- law moments -------------------------------------------------------------------

def semicircle_moment_exact(k: int) -> Fraction:
    k = _nonneg_int(k)
    if k % 2:
        return Fraction(0)
    h = k // 2
    return Fraction(comb(k, h), (h + 1) * 4**h)


def semicircle_moment(k: int) -> float:
    """``(2/pi) int t^k sqrt(1-t^2) dt``: Catalan(k/2) / 4^(k/2) for even k, else 0."""
    return float(semicircle_moment_exact(k))


def mp_moment_exact(k: int, gamma) -> Fraction:
    k = _nonneg_int(k)
    g = _q(gamma)
    if k == 0:
        return Fraction(1)
    return sum((Fraction(comb(k, r) * comb(k - 1, r), r + 1) * g**r for r in range(k)), Fraction(0))


def mp_moment(k: int, gamma: float) -> float:
    """Narayana polynomial ``sum_r C(k,r) C(k-1,r) gamma^r / (r+1)``."""
    _check_gamma(gamma)
    k = _nonneg_int(k)
    if k == 0:
        return 1.0
    return float(sum(comb(k, r) * comb(k - 1, r) / (r + 1) * gamma**r for r in range(k)))


# -- deviation moments ------------------------------------------------------------------

def dev_moment_hermite_exact(k: int) -> Fraction:
    k = _nonneg_int(k)
    if k % 2:
        return Fraction(0)
    return Fraction(1, 2) - Fraction(comb(k, k // 2), 2 ** (k + 1))


def dev_moment_hermite(k: int) -> float:
    """``int t^k dmu_H``: atoms 1/4 at +-1 minus half the arcsine moment."""
    return float(dev_moment_hermite_exact(k))


def dev_moment_laguerre(k: int, gamma: float) -> float:
    """``int t^k dmu_L`` via Chebyshev-Gauss quadrature (exact for this polynomial)."""
    k = _nonneg_int(k)
    a, b = mp_support(gamma)
    m = k // 2 + 1
    theta = (2 * np.arange(1, m + 1) - 1) * math.pi / (2 * m)
    nodes = (a + b) / 2 + (b - a) / 2 * np.cos(theta)
    arcsine = float(np.mean(nodes**k))
    return (a**k + b**k) / 4 - arcsine / 2


def dev_moment_laguerre_exact(k: int, gamma) -> Fraction:
    """Rational form: with ``c = 1 + gamma`` and half-width ``h``, ``h^2 = 4 gamma``,
    ``(1/2) sum_{m even} C(k,m) c^{k-m} (4 gamma)^{m/2} (1 - C(m, m/2) / 2^m)``."""
    k = _nonneg_int(k)
    g = _q(gamma)
    _check_gamma(g)
    c = 1 + g
    tot = Fraction(0)
    for m in range(0, k + 1, 2):
        tot += comb(k, m) * c ** (k - m) * (4 * g) ** (m // 2) * (1 - Fraction(comb(m, m // 2), 2**m))
    return tot / 2


# -- covariances ---------------------------------------------------------------------

def _pos_int(i, name):
    if int(i) != i or i < 1:
        raise DomainError(f"{name} must be a positive integer")
    return int(i)


def cov_hermite_exact(i: int, j: int) -> Fraction:
    i, j = _pos_int(i, "i"), _pos_int(j, "j")
    if i % 2 and j % 2:
        return Fraction(2 * i * j, (i + j) * 2 ** (i + j)) * comb(i - 1, (i - 1) // 2) * comb(j - 1, (j - 1) // 2)
    if i % 2 == 0 and j % 2 == 0:
        return Fraction(2 * i * j, (i + j) * 2 ** (i + j + 2)) * comb(i, i // 2) * comb(j, j // 2)
    return Fraction(0)


def cov_hermite(i: int, j: int) -> float:
    """Limiting covariance of ``Y_i, Y_j``; the trace statistics carry an extra ``2/beta``."""
    return float(cov_hermite_exact(i, j))


def fluctuation_sigma2(k: int) -> float:
    """Variance of the monomial fluctuation ``x^k`` written per parity of ``k``."""
    k = _pos_int(k, "k")
    if k % 2:
        return k / 2 ** (2 * k) * comb(k - 1, (k - 1) // 2) ** 2
    return k / 2 ** (2 * k + 2) * comb(k, k // 2) ** 2


def _conv(i, j, l, r_max, s_max, lo, weight):
    # sum over r + s = l, lo <= r <= r_max, lo <= s <= s_max
    tot = 0
    for r in range(max(lo, l - s_max), min(r_max, l - lo) + 1):
        s = l - r
        tot += weight(r, s) * comb(i, r) ** 2 * comb(j, s) ** 2
    return tot


def cov_laguerre_printed_terms(i: int, j: int, gamma):
    """The two printed triple sums ``(T_D, T_S)``, inner index taken as fresh."""
    i, j = _pos_int(i, "i"), _pos_int(j, "j")
    g = _q(gamma)
    N = i + j
    td = Fraction(0)
    for q in range(1, N):
        inner = Fraction(0)
        for l in range(q + 1, N + 1):
            inner += Fraction((-1) ** l, comb(N - 1, l - 1)) * _conv(i, j, l, i, j, 1, lambda r, s: r * s)
        td += (-1) ** (q + 1) * g ** (N - q) * Fraction(comb(N, q), N) * inner
    ts = Fraction(0)
    for q in range(0, N - 1):
        inner = Fraction(0)
        for l in range(q, N - 1):
            inner += Fraction((-1) ** l, comb(N - 1, l)) * _conv(i, j, l, i - 1, j - 1, 0, lambda r, s: (i - r) * (j - s))
        ts += (-1) ** q * g ** (N - q) * Fraction(comb(N, q), N) * inner
    return td, ts


def cov_laguerre_printed(i: int, j: int, gamma: float) -> float:
    """``T_D + T_S`` exactly as displayed (known to overshoot at (1,1) by gamma^2/2)."""
    _check_gamma(gamma)
    td, ts = cov_laguerre_printed_terms(i, j, gamma)
    return float(td + ts)


@lru_cache(maxsize=None)
def _shifted_power_integral(c: Fraction, p: int, q: int) -> Fraction:
    """``int_0^1 (c + x)^p x^q dx``."""
    return sum((comb(p, t) * c ** (p - t) * Fraction(1, t + q + 1) for t in range(p + 1)), Fraction(0))


def cov_laguerre_exact(i: int, j: int, gamma) -> Fraction:
    i, j = _pos_int(i, "i"), _pos_int(j, "j")
    g = _q(gamma)
    _check_gamma(g)
    c = 1 / g - 1
    tot = Fraction(0)
    for r in range(1, i + 1):
        for s in range(1, j + 1):
            tot += r * s * comb(i, r) ** 2 * comb(j, s) ** 2 * _shifted_power_integral(c, r + s - 1, i + j - r - s)
    for r in range(0, i):
        for s in range(0, j):
            tot += (i - r) * (j - s) * comb(i, r) ** 2 * comb(j, s) ** 2 * _shifted_power_integral(c, r + s, i + j - r - s - 1)
    return g ** (i + j) * tot


def cov_laguerre(i: int, j: int, gamma: float) -> float:
    """Limiting covariance for scaled Laguerre traces (before the ``2/beta`` factor).

    Obtained from the bidiagonal profile ``sqrt(gamma) * (sqrt(1/gamma - 1 + x), sqrt(x))``
    with unit-rate noise; equals ``gamma`` at (1, 1), matching the exact
    ``Var tr L = 2 gamma / beta``.
    """
    return float(cov_laguerre_exact(i, j, gamma))


@dataclass
class CovarianceMatrix:
    family: str
    k: int
    entries: np.ndarray
    params: dict = field(default_factory=dict)
    variant: str = "closed-form"

    def scaled(self, beta: float) -> np.ndarray:
        """Covariance of the trace statistics: ``(2/beta) * entries``."""
        return (2.0 / beta) * self.entries

    def as_dict(self) -> dict:
        return {"family": self.family, "k": self.k, "variant": self.variant, "params": self.params,
                "entries": self.entries.tolist()}


def covariance_matrix(family: str, k: int, gamma=None, variant: str = "closed-form") -> CovarianceMatrix:
    """``k x k`` limiting covariance; Laguerre ``variant`` is ``closed-form`` or ``printed``."""
    k = _pos_int(k, "k")
    family = family.lower()
    if family == "hermite":
        fn, params = cov_hermite, {}
        variant = "closed-form"
    elif family == "laguerre":
        _check_gamma(gamma)
        params = {"gamma": gamma}
        if variant == "closed-form":
            fn = lambda i, j: cov_laguerre(i, j, gamma)
        elif variant == "printed":
            fn = lambda i, j: cov_laguerre_printed(i, j, gamma)
        else:
            raise DomainError(f"unknown variant {variant!r}")
    else:
        raise DomainError(f"unknown family {family!r}")
    C = np.empty((k, k))
    for a in range(k):
        for b in range(a, k):
            C[a, b] = C[b, a] = fn(a + 1, b + 1)
    return CovarianceMatrix(family, k, C, params, variant)


# -- finite-n expectations -----------------------------------------------------------

def _hermite_poly(k, n, al):
    # (1/n) E tr(H^k) for the scaled Hermite model, alpha = 2 / beta
    if k == 2:
        return Fraction(1, 4) + (al - 1) / (4 * n)
    if k == 4:
        return Fraction(2, 16) + (5 * al - 5) / (16 * n) + (3 * al**2 - 5 * al + 3) / (16 * n**2)
    if k == 6:
        return (Fraction(5, 64) + (11 * al - 11) / (32 * n) + (16 * al**2 - 27 * al + 16) / (32 * n**2)
                + (15 * al**3 - 32 * al**2 + 32 * al - 15) / (64 * n**3))
    raise UnsupportedOrderError(f"no Hermite reference polynomial for k = {k} (have 2, 4, 6)")


def _laguerre_poly(k, n, al, g):
    if k == 1:
        return Fraction(1)
    if k == 2:
        return (1 + g) + g * (al - 1) / n
    if k == 3:
        return (1 + 3 * g + g**2) + 3 * g * (g + 1) * (al - 1) / n + g**2 * (2 * al**2 - 3 * al + 2) / n**2
    raise UnsupportedOrderError(f"no Laguerre reference polynomial for k = {k} (have 1, 2, 3)")


def finite_n_reference(family: str, k: int, n: int, alpha, gamma=None, exact: bool = False):
    """Exact ``(1/n) E[tr M^k]`` at finite ``n`` for low orders (``alpha = 2/beta``)."""
    family = family.lower()
    n = _pos_int(n, "n")
    al = _q(alpha)
    if family == "hermite":
        val = _hermite_poly(k, n, al)
    elif family == "laguerre":
        if gamma is None:
            raise DomainError("Laguerre reference needs gamma")
        g = _q(gamma)
        _check_gamma(g)
        val = _laguerre_poly(k, n, al, g)
    else:
        raise DomainError(f"unknown family {family!r}")
    return val if exact else float(val)


# -- Stieltjes transforms -----------------------------------------------------------

def _branch_sqrt(z, a, b):
    # sqrt((z-a)(z-b)) with the cut on [a, b] and S ~ z at infinity
    return cmath.sqrt(z - a) * cmath.sqrt(z - b)


def _support(family, gamma):
    family = family.lower()
    if family == "hermite":
        return family, -1.0, 1.0
    if family == "laguerre":
        a, b = mp_support(gamma)
        return family, a, b
    raise DomainError(f"unknown family {family!r}")


def _stieltjes_complex(family, order, z, gamma, derivative=False):
    family, a, b = _support(family, gamma)
    S = _branch_sqrt(z, a, b)
    if family == "hermite":
        if order == 0:
            return 2 - 2 * z / S if derivative else 2 * (z - S)
        return (z - S) / (2 * (z * z - 1))
    g = gamma
    if order == 0:
        if derivative:
            dS = (z - (1 + g)) / S
            return ((1 - dS) * z - (z + g - 1 - S)) / (2 * g * z * z)
        return (z + g - 1 - S) / (2 * g * z)
    return (z - g - 1 - S) / (2 * (z - a) * (z - b))


def stieltjes(family: str, order: int, x, gamma: float = None, derivative: bool = False):
    """Leading (``order=0``) and first-correction (``order=1``) Stieltjes transforms.

    ``m0`` is ``int rho(t) / (x - t) dt`` for the limiting law, ``m1`` is the
    same for the deviation measure. Real ``x`` must lie off the support
    (``x = +-1`` is allowed for the Hermite ``m0``); complex ``x`` is accepted
    anywhere off the cut. ``derivative=True`` returns ``m0'`` (order 0 only).
    """
    if order not in (0, 1):
        raise DomainError("order must be 0 or 1")
    if derivative and order != 0:
        raise DomainError("only the order-0 derivative is provided")
    fam, a, b = _support(family, gamma)
    is_complex = isinstance(x, complex) or np.iscomplexobj(x)
    z = complex(x)
    if not is_complex or z.imag == 0:
        xr = z.real
        if a < xr < b:
            raise DomainError(f"x = {xr} lies on the branch cut [{a}, {b}]")
        endpoint = xr in (a, b)
        if endpoint and (order == 1 or derivative or fam == "laguerre" and xr == 0):
            raise DomainError(f"x = {xr} is a singular endpoint")
        val = _stieltjes_complex(fam, order, complex(xr, 0.0), gamma, derivative)
        return val if is_complex else float(val.real)
    return _stieltjes_complex(fam, order, z, gamma, derivative)


def hermite_ode_residuals(x: float):
    """Residuals of the two leading layers of the Hermite Stieltjes equation.

    ``m0^2 - 4 x m0 + 4`` and ``-2 m0 m1 + 4 x m1 + m0'``.
    """
    m0 = stieltjes("hermite", 0, x)
    m1 = stieltjes("hermite", 1, x)
    dm0 = stieltjes("hermite", 0, x, derivative=True)
    return m0 * m0 - 4 * x * m0 + 4, -2 * m0 * m1 + 4 * x * m1 + dm0


def laguerre_ode_residuals(x: float, gamma: float):
    """Residuals of the two leading layers of the Laguerre Stieltjes equation.

    ``gamma m0^2 - m0 (1 - 1/x + gamma/x) + 1/x`` and
    ``-2 gamma m0 m1 + m1 (1 - 1/x + gamma/x) + gamma m0' + gamma m0 / x``.
    """
    m0 = stieltjes("laguerre", 0, x, gamma)
    m1 = stieltjes("laguerre", 1, x, gamma)
    dm0 = stieltjes("laguerre", 0, x, gamma, derivative=True)
    c = 1 - 1 / x + gamma / x
    return (gamma * m0 * m0 - m0 * c + 1 / x,
            -2 * gamma * m0 * m1 + m1 * c + gamma * dm0 + gamma * m0 / x)


# -- limiting laws ----------------------------------------------------------------------

@dataclass(frozen=True)
class LawMoments:
    """Semicircle or Marchenko-Pastur law with moments, density and CDF."""

    family: str
    gamma: float = None

    def __post_init__(self):
        fam = self.family.lower().replace("-", "_")
        if fam in ("mp", "laguerre"):
            fam = "marchenko_pastur"
        if fam in ("hermite",):
            fam = "semicircle"
        if fam not in ("semicircle", "marchenko_pastur"):
            raise DomainError(f"unknown law {self.family!r}")
        object.__setattr__(self, "family", fam)
        if fam == "marchenko_pastur":
            _check_gamma(self.gamma)

    @property
    def support(self):
        return (-1.0, 1.0) if self.family == "semicircle" else mp_support(self.gamma)

    def moment(self, k: int) -> float:
        return semicircle_moment(k) if self.family == "semicircle" else mp_moment(k, self.gamma)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.support
        inside = (x > a) & (x < b)
        out = np.zeros_like(x)
        xi = x[inside]
        if self.family == "semicircle":
            out[inside] = 2 / np.pi * np.sqrt(1 - xi**2)
        else:
            out[inside] = np.sqrt((b - xi) * (xi - a)) / (2 * np.pi * self.gamma * xi)
        return out

    def cdf(self, x) -> float:
        a, b = self.support
        x = float(x)
        if x <= a:
            return 0.0
        if x >= b:
            return 1.0
        if self.family == "semicircle":
            return 0.5 + (x * math.sqrt(1 - x * x) + math.asin(x)) / math.pi
        # substitution t = c + h cos(theta) removes the endpoint square roots
        c, h = (a + b) / 2, (b - a) / 2
        th = math.acos(max(-1.0, min(1.0, (x - c) / h)))
        f = lambda t: h * h * math.sin(t) ** 2 / (2 * math.pi * self.gamma * (c + h * math.cos(t)))
        return float(integrate.quad(f, th, math.pi, epsabs=1e-13, epsrel=1e-12)[0])

    def bin_probabilities(self, edges) -> np.ndarray:
        F = np.array([self.cdf(e) for e in np.asarray(edges, dtype=float)])
        return np.diff(F)
