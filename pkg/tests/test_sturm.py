import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betaspectra.ensembles import EnsembleSpec, TridiagonalSymmetric, hermite_beta_infinity, sample_hermite, sample_laguerre_factor
from betaspectra.errors import DomainError
from betaspectra.rng import RngStream
from betaspectra.sturm import (
    count_in_interval, deviation_experiment, histogram, semicircle_mass, sturm_count, sturm_counts,
    theoretical_count_deviation,
)
from betaspectra.theory import LawMoments
from betaspectra.traces import gram_tridiagonal

import oracles
from conftest import SEED

T3 = TridiagonalSymmetric([0.0, 0.0, 0.0], [1.0, 1.0])


def test_count_examples():
    assert sturm_count(TridiagonalSymmetric([0.0], []), 1.0) == 1
    assert sturm_count(([0.0, 0.0, 0.0], [1.0, 1.0]), 1.0) == 2
    assert sturm_count(([0.0, 0.0, 0.0], [1.0, 1.0]), -2.0) == 0
    assert sturm_count(T3, 1.0) == 2


def test_both_entry_points_agree():
    T = sample_hermite(EnsembleSpec.hermite(1, 60), RngStream(SEED))
    for s in np.linspace(-1.2, 1.2, 13):
        assert sturm_count(T, s) == sturm_count((T.diag, T.offdiag**2), s)


def test_nonfinite_rejected():
    with pytest.raises(DomainError):
        sturm_count(([0.0, np.inf], [1.0]), 0.0)
    with pytest.raises(DomainError):
        sturm_count(([0.0, 0.0], [-1.0]), 0.0)
    with pytest.raises(DomainError):
        sturm_count(T3, np.nan)


def test_shift_on_an_eigenvalue():
    # eigenvalues -sqrt2, 0, sqrt2: the zero pivot counts as negative, so 0 is "<= 0"
    assert sturm_count(T3, 0.0) == 2
    assert sturm_count(([0.0, 0.0], [1.0]), 0.0) == 1
    assert sturm_count(([1.0, 1.0, 1.0], [0.0, 0.0]), 1.0) == 3


def test_matches_dense_random():
    g = np.random.default_rng(SEED)
    for trial in range(60):
        beta = float(g.choice([1, 2, 4]))
        n = int(g.integers(1, 120))
        if trial % 2:
            T = sample_hermite(EnsembleSpec.hermite(beta, n), RngStream(SEED, trial))
        else:
            T = gram_tridiagonal(sample_laguerre_factor(EnsembleSpec.laguerre(beta, n, gamma=0.5), RngStream(SEED, trial)))
        ev = np.linalg.eigvalsh(T.to_dense())
        sig = g.uniform(ev.min() - 0.1, ev.max() + 0.1, size=30)
        assert np.array_equal(sturm_counts(T, sig), [int(np.sum(ev <= s)) for s in sig])


@settings(max_examples=60, deadline=None)
@given(d=st.lists(st.floats(-5, 5), min_size=1, max_size=30), data=st.data())
def test_monotone_and_bounded(d, data):
    n = len(d)
    e = data.draw(st.lists(st.floats(-3, 3), min_size=n - 1, max_size=n - 1))
    T = TridiagonalSymmetric(d, e)
    s1, s2 = sorted(data.draw(st.lists(st.floats(-20, 20), min_size=2, max_size=2)))
    c1, c2 = sturm_count(T, s1), sturm_count(T, s2)
    assert 0 <= c1 <= c2 <= n
    assert sturm_count(T, 1e6) == n
    assert sturm_count(T, -1e6) == 0


@settings(max_examples=40, deadline=None)
@given(d=st.lists(st.floats(-5, 5), min_size=1, max_size=25), data=st.data())
def test_dense_agreement_property(d, data):
    n = len(d)
    e = data.draw(st.lists(st.floats(-3, 3), min_size=n - 1, max_size=n - 1))
    T = TridiagonalSymmetric(d, e)
    ev = np.linalg.eigvalsh(T.to_dense())
    s = data.draw(st.floats(-12, 12))
    # avoid shifts numerically indistinguishable from an eigenvalue
    if np.min(np.abs(ev - s)) > 1e-9:
        assert sturm_count(T, s) == oracles.dense_count(T.to_dense(), s)


def test_histogram_examples():
    h = histogram(TridiagonalSymmetric([5.0], []), [0.0, 10.0])
    assert h.counts.tolist() == [1] and h.below_first == 0 and h.above_last == 0
    T = sample_hermite(EnsembleSpec.hermite(2, 80), RngStream(SEED))
    h = histogram(T, [-1e10, 1e10])
    assert h.counts.sum() == T.n
    with pytest.raises(DomainError):
        histogram(T, [0.0, -1.0, 1.0])
    with pytest.raises(DomainError):
        histogram(T, [0.0])


def test_histogram_invariants_vs_dense():
    T = sample_hermite(EnsembleSpec.hermite(1, 500), RngStream(SEED))
    ev = np.linalg.eigvalsh(T.to_dense())
    edges = np.linspace(-0.9, 0.9, 31)
    h = histogram(T, edges)
    assert h.counts.sum() + h.below_first + h.above_last == T.n
    want = [int(np.sum((ev > edges[j]) & (ev <= edges[j + 1]))) for j in range(30)]
    assert h.counts.tolist() == want
    assert h.below_first == int(np.sum(ev <= edges[0]))


def test_histogram_semicircle_shape_beta_inf():
    T = hermite_beta_infinity(300)
    edges = np.linspace(-1, 1, 26)
    h = histogram(T, edges)
    l1 = np.sum(np.abs(h.counts / 300 - LawMoments("semicircle").bin_probabilities(edges)))
    assert l1 < 0.06


def test_count_in_interval():
    assert count_in_interval(T3, -1, 1) == 1
    assert count_in_interval(T3, -2, 2) == 3
    assert count_in_interval(T3, 5, 6) == 0
    with pytest.raises(DomainError):
        count_in_interval(T3, 1, 1)


def test_theoretical_deviation():
    assert theoretical_count_deviation(0.2, 0.8) == pytest.approx(0.11553, abs=1e-5)
    assert theoretical_count_deviation(-1, 1) == pytest.approx(0.0, abs=1e-15)
    assert theoretical_count_deviation(-0.5, 0.5) == pytest.approx(1 / 6, abs=1e-15)
    with pytest.raises(DomainError):
        theoretical_count_deviation(-1.5, 0.5)
    with pytest.raises(DomainError):
        theoretical_count_deviation(0.5, 0.5)


def test_semicircle_mass_closed_form():
    from scipy.integrate import quad
    for lo, hi in ((0.2, 0.8), (-1, 1), (-0.3, 0.95)):
        ref = quad(lambda x: 2 / math.pi * math.sqrt(1 - x * x), lo, hi, epsabs=1e-14)[0]
        assert semicircle_mass(lo, hi) == pytest.approx(ref, abs=1e-12)


def test_deviation_full_interval_is_zero():
    rep = deviation_experiment(1000, 1, -1.0, 1.0)
    assert rep.per_n_deviations.tolist() == [0.0]
    assert rep.theoretical == pytest.approx(0.0, abs=1e-15)


def test_deviation_worker_independent():
    a = deviation_experiment(5000, 12, 0.2, 0.8, workers=1)
    b = deviation_experiment(5000, 12, 0.2, 0.8, workers=3)
    assert np.array_equal(a.per_n_deviations, b.per_n_deviations)
    assert a.mean_deviation == pytest.approx(np.mean(a.per_n_deviations))


def test_linear_cost():
    per = []
    for n in (10**5, 10**6, 10**7):
        D = np.zeros(n)
        E = np.arange(n - 1, 0, -1) / (4.0 * n)
        sturm_count((D, E), 0.3)  # warm-up / compile
        best = min(_timed(lambda: sturm_count((D, E), 0.3)) for _ in range(5))
        per.append(best / n)
    assert max(per) / min(per) < 2.0


def _timed(fn):
    t = time.perf_counter()
    fn()
    return time.perf_counter() - t
