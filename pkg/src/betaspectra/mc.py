"""Monte Carlo harness for centred trace statistics.

Trials are split into fixed-size chunks; chunk ``c`` draws from
``RngStream(seed).child(c)``, so the sampled matrices, and therefore every
reported number, do not depend on how many worker threads ran the chunks.
Per-trial statistics are kept, and moments are formed in two passes
(mean first, then centred products).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from . import paths, traces
from .ensembles import EnsembleSpec, GeneralModelSpec, general_batch, hermite_batch, laguerre_factor_batch
from .errors import DomainError
from .parallel import ordered_map, resolve_workers
from .rng import RngStream
from .sturm import histogram
from .theory import CovarianceMatrix, LawMoments

CHUNK = 256
JACKKNIFE_BLOCKS = 100


def _sample_tridiagonal(spec, n, rng, size):
    """``(diag, offdiag)`` of the matrices whose traces are studied."""
    if isinstance(spec, EnsembleSpec):
        if spec.family == "hermite":
            return hermite_batch(spec, rng, size)
        return traces.gram_batch(*laguerre_factor_batch(spec, rng, size))
    d, e = general_batch(spec, n, rng, size)
    return traces.gram_batch(d, e) if spec.bidiagonal else (d, e)


def theory_centering(spec, kmax: int, n: Optional[int] = None) -> np.ndarray:
    """Law mean plus first-order deviation, i = 1..kmax."""
    if isinstance(spec, EnsembleSpec):
        if spec.family == "hermite":
            return traces.hermite_centering(spec.n, kmax, spec.beta)
        return traces.laguerre_centering(spec.n, kmax, spec.beta, spec.gamma)
    return np.array([n * paths.general_moment(i, spec) + paths.general_deviation(i, spec)
                     for i in range(1, kmax + 1)])


def spec_echo(spec, n=None) -> dict:
    if isinstance(spec, EnsembleSpec):
        return spec.as_dict()
    return {"kind": spec.kind, "label": spec.label, "sigma2": spec.sigma2, "eta2": spec.eta2, "n": n}


@dataclass
class FluctuationReport:
    spec: object
    n: int
    kmax: int
    trials: int
    seed: int
    mean: np.ndarray
    cov: np.ndarray
    mean_se: np.ndarray
    cov_se: np.ndarray
    centering: np.ndarray
    workers: int = 1
    wall_time: float = 0.0
    samples: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def trace_mean(self) -> np.ndarray:
        """Sample mean of the raw traces ``tr M^i``."""
        return self.mean + self.centering

    def as_dict(self, include_samples: bool = False) -> dict:
        out = {
            "spec": spec_echo(self.spec, self.n), "n": self.n, "kmax": self.kmax, "trials": self.trials,
            "seed": self.seed, "workers": self.workers, "wall_time": self.wall_time,
            "mean": self.mean.tolist(), "mean_se": self.mean_se.tolist(),
            "cov": self.cov.tolist(), "cov_se": self.cov_se.tolist(), "centering": self.centering.tolist(),
        }
        if include_samples and self.samples is not None:
            out["samples"] = self.samples.tolist()
        return out


def sample_statistics(spec, kmax: int, trials: int, seed: int, workers=None, n: Optional[int] = None,
                      center: bool = True) -> np.ndarray:
    """``(trials, kmax)`` array of (centred) statistics ``tr M^i - centering_i``."""
    if isinstance(spec, EnsembleSpec):
        n = spec.n
    elif isinstance(spec, GeneralModelSpec):
        if n is None or n < 1:
            raise DomainError("general models need a matrix size n")
    else:
        raise DomainError("spec must be an EnsembleSpec or GeneralModelSpec")
    trials = int(trials)
    root = RngStream(seed)
    starts = range(0, trials, CHUNK)

    def chunk(c):
        size = min(CHUNK, trials - c * CHUNK)
        d, e = _sample_tridiagonal(spec, n, root.child(c), size)
        return traces.trace_powers_batch(d, e, kmax)

    X = np.concatenate(ordered_map(chunk, range(len(starts)), workers), axis=0)
    if center:
        X -= theory_centering(spec, kmax, n)
    return X


def _jackknife_cov_se(Xc: np.ndarray, blocks: int) -> np.ndarray:
    N, k = Xc.shape
    B = min(blocks, N)
    idx = np.array_split(np.arange(N), B)
    S1 = Xc.sum(axis=0)
    S2 = Xc.T @ Xc
    est = np.empty((B, k, k))
    for b, ix in enumerate(idx):
        xb = Xc[ix]
        m = N - len(ix)
        mu = (S1 - xb.sum(axis=0)) / m
        est[b] = ((S2 - xb.T @ xb) - m * np.outer(mu, mu)) / (m - 1)
    return np.sqrt((B - 1) / B * np.sum((est - est.mean(axis=0)) ** 2, axis=0))


def summarize(X: np.ndarray, blocks: int = JACKKNIFE_BLOCKS):
    """Mean, covariance and their standard errors from per-trial rows."""
    N = X.shape[0]
    if N < 2:
        raise DomainError("need at least two trials")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (N - 1)
    cov = (cov + cov.T) / 2
    mean_se = np.sqrt(np.diag(cov) / N)
    return mean, cov, mean_se, _jackknife_cov_se(Xc, blocks)


def run_trials(spec, kmax: int, trials: int, seed: int, workers=None, n: Optional[int] = None,
               keep_samples: bool = True) -> FluctuationReport:
    """Sample ``trials`` matrices and estimate mean and covariance of ``X_1..X_kmax``."""
    if trials < 2:
        raise DomainError("trials must be at least 2")
    if kmax < 1:
        raise DomainError("kmax must be at least 1")
    w = resolve_workers(workers)
    t0 = time.perf_counter()
    if isinstance(spec, EnsembleSpec):
        n = spec.n
    X = sample_statistics(spec, kmax, trials, seed, w, n, center=False)
    centering = theory_centering(spec, kmax, n)
    X -= centering
    mean, cov, mean_se, cov_se = summarize(X)
    return FluctuationReport(spec=spec, n=n, kmax=kmax, trials=trials, seed=seed, mean=mean, cov=cov,
                             mean_se=mean_se, cov_se=cov_se, centering=centering, workers=w,
                             wall_time=time.perf_counter() - t0, samples=X if keep_samples else None)


# -- Gaussianity ----------------------------------------------------------------------

@dataclass
class GaussianityReport:
    skewness: np.ndarray
    skewness_se: float
    excess_kurtosis: np.ndarray
    kurtosis_se: float
    odd_moments: dict          # order -> array over coordinates
    odd_moment_se: dict        # order -> scalar SE under a Gaussian
    wick: list                 # (i, j, observed E[Xi^2 Xj^2], Wick value, se)

    def max_odd_z(self) -> float:
        return max(float(np.max(np.abs(self.odd_moments[p]) / self.odd_moment_se[p])) for p in self.odd_moments)

    def as_dict(self) -> dict:
        return {"skewness": self.skewness.tolist(), "skewness_se": self.skewness_se,
                "excess_kurtosis": self.excess_kurtosis.tolist(), "kurtosis_se": self.kurtosis_se,
                "odd_moments": {str(p): v.tolist() for p, v in self.odd_moments.items()},
                "odd_moment_se": {str(p): v for p, v in self.odd_moment_se.items()},
                "wick": [list(w) for w in self.wick]}


def _double_factorial(m: int) -> int:
    return math.prod(range(m, 0, -2)) if m > 0 else 1


def gaussianity(samples, center: str = "theory", odd_orders=(1, 3, 5)) -> GaussianityReport:
    """Normality diagnostics on per-trial statistics (rows = trials).

    ``center="theory"`` keeps the given centring (statistics already have the
    theoretical mean removed) and only divides by the sample standard
    deviation; ``"sample"`` also subtracts the sample mean.
    """
    if isinstance(samples, FluctuationReport):
        if samples.samples is None:
            raise DomainError("report does not retain per-trial samples")
        samples = samples.samples
    X = np.asarray(samples, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    N, k = X.shape
    if N < 8:
        raise DomainError("too few samples for moment diagnostics")
    sd = X.std(axis=0, ddof=1)
    if np.any(~(sd > 0)):
        raise DomainError("degenerate (zero) variance in a coordinate")
    Y = X - X.mean(axis=0) if center == "sample" else X
    Z = Y / sd
    skew = stats.skew(X, axis=0, bias=False)
    kurt = stats.kurtosis(X, axis=0, fisher=True, bias=False)
    odd = {p: np.mean(Z**p, axis=0) for p in odd_orders}
    odd_se = {p: math.sqrt(_double_factorial(2 * p - 1) / N) for p in odd_orders}
    Xc = X - X.mean(axis=0)
    wick = []
    for i in range(k):
        for j in range(i, k):
            prod = Xc[:, i] ** 2 * Xc[:, j] ** 2
            cij = np.mean(Xc[:, i] * Xc[:, j])
            expected = np.mean(Xc[:, i] ** 2) * np.mean(Xc[:, j] ** 2) + 2 * cij**2
            wick.append((i + 1, j + 1, float(prod.mean()), float(expected), float(prod.std(ddof=1) / math.sqrt(N))))
    return GaussianityReport(skew, math.sqrt(6 / N), kurt, math.sqrt(24 / N), odd, odd_se, wick)


# -- law of large numbers -------------------------------------------------------------------

def lln_check(spec: EnsembleSpec, bins: int, seed: int = 0, return_histogram: bool = False):
    """L1 distance between the binned spectrum of one sample and the limiting law.

    Bins split the law's support evenly; eigenvalues falling outside count
    fully toward the distance.
    """
    if bins < 1:
        raise DomainError("bins must be positive")
    if not spec.scaled:
        raise DomainError("the density check needs a scaled ensemble")
    rng = RngStream(seed)
    if spec.family == "hermite":
        law = LawMoments("semicircle")
        d, e = hermite_batch(spec, rng, 1)
    else:
        law = LawMoments("marchenko_pastur", spec.gamma)
        d, e = traces.gram_batch(*laguerre_factor_batch(spec, rng, 1))
    a, b = law.support
    edges = np.linspace(a, b, bins + 1)
    h = histogram((d[0], e[0] ** 2), edges)
    dist = float(np.sum(np.abs(h.counts / h.n - law.bin_probabilities(edges))) + (h.below_first + h.above_last) / h.n)
    return (dist, h) if return_histogram else dist


# -- comparison ---------------------------------------------------------------------------

@dataclass
class ZScores:
    z: np.ndarray
    expected: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.z)))

    def as_dict(self) -> dict:
        return {"z": self.z.tolist(), "expected": self.expected.tolist(), "max_abs_z": self.max_abs}


def compare_to_theory(report: FluctuationReport, theory, beta: float) -> ZScores:
    """Entrywise ``(cov - (2/beta) theory) / cov_se``."""
    C = theory.entries if isinstance(theory, CovarianceMatrix) else np.asarray(theory, dtype=float)
    if C.shape != report.cov.shape:
        raise DomainError(f"theory is {C.shape}, report covariance is {report.cov.shape}")
    expected = (2.0 / beta) * C
    diff = report.cov - expected
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(report.cov_se > 0, diff / report.cov_se, np.where(diff == 0, 0.0, np.inf))
    return ZScores(z, expected)
