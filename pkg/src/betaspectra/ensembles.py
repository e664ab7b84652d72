"""Tridiagonal and bidiagonal matrix models for beta-Hermite and beta-Laguerre.

Conventions (1-based positions ``i`` as in the displayed matrices):

* Hermite ``H``: diagonal i.i.d. N(0, 1), off-diagonal ``i`` is
  ``chi_{(n-i) beta} / sqrt(2)``; the scaled model divides by ``sqrt(2 n beta)``.
* Laguerre factor ``B`` (lower bidiagonal): diagonal ``i`` is
  ``chi_{2a - (i-1) beta}``, subdiagonal ``i`` is ``chi_{beta (n-i)}``; the
  scaled factor is multiplied by ``sqrt(gamma / (n beta))`` so that the Gram
  matrix is ``(gamma / (n beta)) B B^T``.

``beta = math.inf`` selects the deterministic limits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, SamplingError
from .rng import as_generator

INF = math.inf


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class TridiagonalSymmetric:
    """Symmetric tridiagonal matrix stored as diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d, e = _frozen(self.diag), _frozen(self.offdiag)
        if d.ndim != 1 or d.size < 1:
            raise DomainError("diag must be a non-empty vector")
        if e.shape != (d.size - 1,):
            raise DomainError(f"offdiag must have length {d.size - 1}, got {e.shape}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise DomainError("matrix entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def offdiag_squared(self) -> np.ndarray:
        return self.offdiag**2

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def scaled(self, c: float) -> "TridiagonalSymmetric":
        return TridiagonalSymmetric(c * self.diag, c * self.offdiag)

    def __eq__(self, other):
        if not isinstance(other, TridiagonalSymmetric):
            return NotImplemented
        return np.array_equal(self.diag, other.diag) and np.array_equal(self.offdiag, other.offdiag)


@dataclass(frozen=True, eq=False)
class LowerBidiagonal:
    """Lower bidiagonal matrix; ``subdiag[i]`` couples rows ``i`` and ``i+1``."""

    diag: np.ndarray
    subdiag: np.ndarray

    def __post_init__(self):
        d, s = _frozen(self.diag), _frozen(self.subdiag)
        if d.ndim != 1 or d.size < 1:
            raise DomainError("diag must be a non-empty vector")
        if s.shape != (d.size - 1,):
            raise DomainError(f"subdiag must have length {d.size - 1}, got {s.shape}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(s))):
            raise DomainError("matrix entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "subdiag", s)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.subdiag, -1)

    def __eq__(self, other):
        if not isinstance(other, LowerBidiagonal):
            return NotImplemented
        return np.array_equal(self.diag, other.diag) and np.array_equal(self.subdiag, other.subdiag)


@dataclass(frozen=True)
class EnsembleSpec:
    """Which ensemble to sample.

    For Laguerre give exactly one of ``a`` and ``gamma``; the other follows from
    ``a = n beta / (2 gamma)``. At ``beta = inf`` only ``gamma`` is meaningful.
    """

    family: str
    beta: float
    n: int
    a: Optional[float] = None
    gamma: Optional[float] = None
    scaled: bool = True

    def __post_init__(self):
        family = str(self.family).lower()
        if family not in ("hermite", "laguerre"):
            raise DomainError(f"unknown family {self.family!r}")
        object.__setattr__(self, "family", family)
        beta = float(self.beta)
        if not beta > 0:
            raise DomainError("beta must be positive (or inf)")
        object.__setattr__(self, "beta", beta)
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        n = self.n
        if math.isinf(beta) and not self.scaled:
            raise DomainError("the beta = inf models exist only in scaled form")

        if family == "hermite":
            if self.a is not None or self.gamma is not None:
                raise DomainError("Hermite ensembles take no a/gamma parameter")
            return

        if (self.a is None) == (self.gamma is None):
            raise DomainError("supply exactly one of a and gamma")
        if self.gamma is not None:
            gamma = float(self.gamma)
            a = INF if math.isinf(beta) else n * beta / (2 * gamma)
        else:
            if math.isinf(beta):
                raise DomainError("beta = inf Laguerre requires gamma, not a")
            a = float(self.a)
            gamma = n * beta / (2 * a) if a > 0 else INF
        if not 0 < gamma <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
        if not math.isinf(beta) and not a > (n - 1) * beta / 2:
            raise DomainError(f"Laguerre requires a > (n-1) beta / 2 = {(n - 1) * beta / 2}, got {a}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def hermite(cls, beta, n, scaled=True):
        return cls("hermite", beta, n, scaled=scaled)

    @classmethod
    def laguerre(cls, beta, n, gamma=None, a=None, scaled=True):
        return cls("laguerre", beta, n, a=a, gamma=gamma, scaled=scaled)

    @property
    def infinite(self) -> bool:
        return math.isinf(self.beta)

    @property
    def alpha(self) -> float:
        """``2 / beta`` (zero at beta = inf)."""
        return 2.0 / self.beta

    def as_dict(self) -> dict:
        return {"family": self.family, "beta": self.beta, "n": self.n, "a": self.a,
                "gamma": self.gamma, "scaled": self.scaled}


def _gaussian_noise(gen: np.random.Generator, shape) -> np.ndarray:
    return gen.standard_normal(shape)


@dataclass(frozen=True)
class GeneralModelSpec:
    """Deterministic profile ``f`` (diagonal), ``g`` (off/sub-diagonal) plus noise.

    ``noise_sampler(generator, shape)`` must return zero-mean, unit-variance
    variates with bounded moments; they are scaled by ``sqrt(sigma2)`` on the
    diagonal and ``sqrt(eta2)`` off it. ``f`` and ``g`` should accept numpy
    arrays.
    """

    kind: str
    f: Callable
    g: Callable
    f_prime: Optional[Callable] = None
    g_prime: Optional[Callable] = None
    sigma2: float = 0.0
    eta2: float = 0.0
    noise_sampler: Callable = field(default=_gaussian_noise, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("tridiagonal", "bidiagonal"):
            raise DomainError(f"kind must be 'tridiagonal' or 'bidiagonal', got {self.kind!r}")
        if self.sigma2 < 0 or self.eta2 < 0:
            raise DomainError("noise variances must be nonnegative")

    @property
    def bidiagonal(self) -> bool:
        return self.kind == "bidiagonal"


def hermite_specialization(beta: float) -> GeneralModelSpec:
    """General tridiagonal model with the scaled beta-Hermite entry statistics.

    Zero diagonal profile and ``g(x) = sqrt(x)/2`` off the diagonal; the noise
    variances match the scaled Hermite entries, ``1/(2 beta)`` and ``1/(8 beta)``.
    """
    return GeneralModelSpec(
        "tridiagonal",
        f=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        g=lambda x: np.sqrt(x) / 2,
        f_prime=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        g_prime=lambda x: 0.25 / np.sqrt(x),
        sigma2=1 / (2 * beta),
        eta2=1 / (8 * beta),
        label=f"hermite-specialization(beta={beta})",
    )


def laguerre_specialization(beta: float, gamma: float) -> GeneralModelSpec:
    """General bidiagonal model with ``f = sqrt(1/gamma - 1 + x)``, ``g = sqrt(x)``.

    Noise variances ``sigma2 = eta2 = gamma / (2 beta)``. Its Gram matrix times
    ``gamma`` has the Marchenko-Pastur(gamma) limit.
    """
    c = 1 / gamma - 1
    return GeneralModelSpec(
        "bidiagonal",
        f=lambda x: np.sqrt(c + np.asarray(x, dtype=float)),
        g=lambda x: np.sqrt(x),
        f_prime=lambda x: 0.5 / np.sqrt(c + np.asarray(x, dtype=float)),
        g_prime=lambda x: 0.5 / np.sqrt(x),
        sigma2=gamma / (2 * beta),
        eta2=gamma / (2 * beta),
        label=f"laguerre-specialization(beta={beta}, gamma={gamma})",
    )


# -- chi variates -------------------------------------------------------------

def sample_chi(r, rng, size=None):
    """Draw chi_r variates: square roots of Gamma(shape r/2, scale 2) draws.

    ``r`` may be a scalar or an array of positive (not necessarily integer)
    degrees of freedom; it broadcasts against ``size``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("chi degrees of freedom must be positive")
    gen = as_generator(rng)
    out = np.sqrt(2.0 * gen.standard_gamma(r / 2.0, size=size))
    return float(out) if out.ndim == 0 else out


# -- batched samplers ------------------------------------------------------------

def hermite_batch(spec: EnsembleSpec, rng, size: int):
    """``size`` Hermite samples as ``(diag, offdiag)`` arrays of shape (size, n), (size, n-1)."""
    if spec.family != "hermite":
        raise DomainError("spec is not a Hermite ensemble")
    n = spec.n
    if spec.infinite:
        h = hermite_beta_infinity(n)
        return np.broadcast_to(h.diag, (size, n)).copy(), np.broadcast_to(h.offdiag, (size, n - 1)).copy()
    gen = as_generator(rng)
    diag = gen.standard_normal((size, n))
    dof = spec.beta * np.arange(n - 1, 0, -1, dtype=float)
    off = np.sqrt(2.0 * gen.standard_gamma(dof / 2.0, size=(size, n - 1))) / math.sqrt(2.0)
    if spec.scaled:
        c = 1.0 / math.sqrt(2.0 * n * spec.beta)
        diag *= c
        off *= c
    return diag, off


def laguerre_factor_batch(spec: EnsembleSpec, rng, size: int):
    """``size`` Laguerre factors as ``(diag, subdiag)`` arrays."""
    if spec.family != "laguerre":
        raise DomainError("spec is not a Laguerre ensemble")
    n = spec.n
    if spec.infinite:
        b = laguerre_beta_infinity(n, spec.gamma)
        return np.broadcast_to(b.diag, (size, n)).copy(), np.broadcast_to(b.subdiag, (size, n - 1)).copy()
    gen = as_generator(rng)
    beta = spec.beta
    ddof = 2 * spec.a - beta * np.arange(n, dtype=float)
    sdof = beta * np.arange(n - 1, 0, -1, dtype=float)
    if np.any(ddof <= 0):
        raise DomainError("chi degrees of freedom 2a - (i-1) beta must be positive")
    diag = np.sqrt(2.0 * gen.standard_gamma(ddof / 2.0, size=(size, n)))
    sub = np.sqrt(2.0 * gen.standard_gamma(sdof / 2.0, size=(size, n - 1)))
    if spec.scaled:
        c = math.sqrt(spec.gamma / (n * beta))
        diag *= c
        sub *= c
    return diag, sub


def evaluate(fn, x: np.ndarray) -> np.ndarray:
    """Evaluate ``fn`` on an array, falling back to element-wise calls for scalar functions."""
    try:
        y = np.asarray(fn(x), dtype=float)
    except (TypeError, ValueError):
        y = None
    if y is None or (y.shape != x.shape and y.ndim != 0):
        y = np.array([float(fn(float(t))) for t in x.ravel()]).reshape(x.shape)
    return np.array(np.broadcast_to(y, x.shape), dtype=float)


def general_profile(spec: GeneralModelSpec, n: int):
    """Deterministic part: ``f((n-i+1)/n)`` on diagonal ``i``, ``g((n-i)/n)`` off it."""
    i = np.arange(1, n + 1, dtype=float)
    d = evaluate(spec.f, (n - i + 1) / n)
    e = evaluate(spec.g, (n - i[:-1]) / n)
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise SamplingError("model profile f/g evaluated to non-finite values")
    return d, e


def general_batch(spec: GeneralModelSpec, n: int, rng, size: int):
    """``size`` samples of the general model as ``(diag, off)`` arrays."""
    d, e = general_profile(spec, n)
    diag = np.broadcast_to(d, (size, n)).copy()
    off = np.broadcast_to(e, (size, n - 1)).copy()
    gen = as_generator(rng)
    if spec.sigma2 > 0:
        diag += math.sqrt(spec.sigma2 / n) * spec.noise_sampler(gen, (size, n))
    if spec.eta2 > 0 and n > 1:
        off += math.sqrt(spec.eta2 / n) * spec.noise_sampler(gen, (size, n - 1))
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
        raise SamplingError("noise sampler produced non-finite values")
    return diag, off


# -- single-matrix API --------------------------------------------------------------

def sample_hermite(spec: EnsembleSpec, rng) -> TridiagonalSymmetric:
    d, e = hermite_batch(spec, rng, 1)
    return TridiagonalSymmetric(d[0], e[0])


def sample_laguerre_factor(spec: EnsembleSpec, rng) -> LowerBidiagonal:
    d, s = laguerre_factor_batch(spec, rng, 1)
    return LowerBidiagonal(d[0], s[0])


def hermite_beta_infinity(n: int) -> TridiagonalSymmetric:
    """Scaled Hermite matrix at beta = inf; eigenvalues are Hermite roots / sqrt(2n)."""
    if n < 1:
        raise DomainError("n must be positive")
    off = np.sqrt(np.arange(n - 1, 0, -1, dtype=float)) / (2.0 * math.sqrt(n))
    return TridiagonalSymmetric(np.zeros(n), off)


def hermite_beta_infinity_squared(n: int):
    """``(D, E)`` for the Sturm recurrence: zeros and ``(n-1, ..., 1) / (4n)``."""
    return np.zeros(n), np.arange(n - 1, 0, -1, dtype=float) / (4.0 * n)


def laguerre_beta_infinity(n: int, gamma: float) -> LowerBidiagonal:
    """Scaled Laguerre factor at beta = inf; ``B B^T`` has Laguerre roots times gamma/n."""
    if n < 1:
        raise DomainError("n must be positive")
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    c = math.sqrt(gamma / n)
    diag = c * np.sqrt(n / gamma - np.arange(n, dtype=float))
    sub = c * np.sqrt(np.arange(n - 1, 0, -1, dtype=float))
    return LowerBidiagonal(diag, sub)


def sample_general(spec: GeneralModelSpec, n: int, rng):
    """One sample of ``F + R / sqrt(n)`` (tridiagonal) or its bidiagonal factor."""
    d, e = general_batch(spec, n, rng, 1)
    if spec.bidiagonal:
        return LowerBidiagonal(d[0], e[0])
    return TridiagonalSymmetric(d[0], e[0])


def sample(spec: EnsembleSpec, rng):
    """Dispatch on family: Hermite matrix or Laguerre factor."""
    if spec.family == "hermite":
        return sample_hermite(spec, rng)
    return sample_laguerre_factor(spec, rng)
