import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betaspectra.ensembles import EnsembleSpec, LowerBidiagonal, TridiagonalSymmetric, sample_hermite, sample_laguerre_factor
from betaspectra.rng import RngStream
from betaspectra.traces import (
    centered_hermite, centered_laguerre, gram_batch, gram_tridiagonal, trace_powers, trace_powers_batch,
)

from conftest import SEED


def dense_traces(T, kmax):
    M = T.to_dense()
    return np.array([np.trace(np.linalg.matrix_power(M, k)) for k in range(1, kmax + 1)])


def test_gram_examples():
    I = gram_tridiagonal(LowerBidiagonal(np.ones(3), np.zeros(2)))
    assert np.array_equal(I.to_dense(), np.eye(3))
    G = gram_tridiagonal(LowerBidiagonal([1.0, 2.0], [3.0]))
    assert G.diag.tolist() == [1.0, 13.0] and G.offdiag.tolist() == [3.0]


def test_gram_matches_dense():
    g = np.random.default_rng(SEED)
    for n in (1, 2, 20, 50):
        B = LowerBidiagonal(g.normal(size=n), g.normal(size=n - 1))
        M = B.to_dense()
        assert np.allclose(gram_tridiagonal(B).to_dense(), M @ M.T, rtol=0, atol=1e-14)
        d, o = gram_batch(B.diag[None, :].copy(), B.subdiag[None, :].copy())
        assert np.allclose(d[0], gram_tridiagonal(B).diag) and np.allclose(o[0], gram_tridiagonal(B).offdiag)


def test_trace_examples():
    assert trace_powers(TridiagonalSymmetric([1.0, 1.0], [0.0]), 5).tolist() == [2, 2, 2, 2, 2]
    assert trace_powers(TridiagonalSymmetric([1.0, 2.0], [0.0]), 2).tolist() == [3, 5]
    assert trace_powers(TridiagonalSymmetric([0.0, 0.0], [1.0]), 4).tolist() == [0, 2, 0, 2]


def test_banded_vs_dense_random():
    g = np.random.default_rng(SEED)
    for _ in range(50):
        n = int(g.integers(1, 101))
        kmax = int(g.integers(1, 9))
        T = TridiagonalSymmetric(g.normal(size=n), g.normal(size=n - 1))
        ref = dense_traces(T, kmax)
        got = trace_powers(T, kmax)
        assert np.all(np.abs(got - ref) <= 1e-12 * np.maximum(1.0, np.abs(ref)))


def test_similarity_invariance():
    T = sample_hermite(EnsembleSpec.hermite(1, 60), RngStream(SEED))
    ev = np.linalg.eigvalsh(T.to_dense())
    ref = np.array([np.sum(ev**k) for k in range(1, 9)])
    assert np.allclose(trace_powers(T, 8), ref, rtol=1e-10, atol=1e-12)


def test_large_kmax_falls_back():
    T = TridiagonalSymmetric([0.3, -0.2, 0.5], [0.4, 0.1])
    assert np.allclose(trace_powers(T, 10), dense_traces(T, 10), rtol=1e-13)
    out = trace_powers_batch(np.array([T.diag]), np.array([T.offdiag]), 10)
    assert np.allclose(out[0], dense_traces(T, 10), rtol=1e-13)


def test_batch_equals_single():
    g = np.random.default_rng(SEED)
    D, E = g.normal(size=(5, 40)), g.normal(size=(5, 39))
    out = trace_powers_batch(D, E, 6)
    for m in range(5):
        assert np.array_equal(out[m], trace_powers(TridiagonalSymmetric(D[m], E[m]), 6))


dyadic = st.integers(-64, 64).map(lambda v: v / 8.0)


@settings(max_examples=60, deadline=None)
@given(d=st.lists(dyadic, min_size=2, max_size=40), data=st.data())
def test_low_order_identities_exact(d, data):
    n = len(d)
    e = data.draw(st.lists(dyadic, min_size=n - 1, max_size=n - 1))
    T = TridiagonalSymmetric(d, e)
    t = trace_powers(T, 2)
    assert t[0] == math.fsum(d)
    assert t[1] == math.fsum([x * x for x in d]) + 2 * math.fsum([x * x for x in e])


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 60), s=st.integers(0, 2**32))
def test_low_order_identities_random(n, s):
    g = np.random.default_rng(s)
    T = TridiagonalSymmetric(g.normal(size=n), g.normal(size=n - 1))
    t = trace_powers(T, 2)
    assert t[0] == pytest.approx(math.fsum(T.diag), rel=1e-15, abs=1e-15)
    assert t[1] == pytest.approx(math.fsum(T.diag**2) + 2 * math.fsum(T.offdiag**2), rel=1e-14)


def test_centered_hermite():
    n = 40
    T = sample_hermite(EnsembleSpec.hermite(2, n), RngStream(SEED))
    tr = trace_powers(T, 3)
    X = centered_hermite(T, 3, 2.0)
    assert X[1] == pytest.approx(tr[1] - n / 4, abs=1e-13)
    assert X[0] == tr[0] and X[2] == tr[2]
    X1 = centered_hermite(T, 2, 1.0)
    assert X1[1] == pytest.approx(tr[1] - n / 4 - 1 / 4, abs=1e-13)


def test_centered_laguerre():
    n, g = 40, 0.5
    L = gram_tridiagonal(sample_laguerre_factor(EnsembleSpec.laguerre(2, n, gamma=g), RngStream(SEED)))
    tr = trace_powers(L, 2)
    X = centered_laguerre(L, 2, 2.0, g)
    assert X[0] == pytest.approx(tr[0] - n, abs=1e-12)
    assert X[1] == pytest.approx(tr[1] - 1.5 * n, abs=1e-12)
    X1 = centered_laguerre(L, 2, 1.0, g)
    assert X1[1] == pytest.approx(tr[1] - 1.5 * n - 0.5, abs=1e-12)
