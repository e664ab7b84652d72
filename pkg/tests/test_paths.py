import math
import time
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betaspectra import paths, theory
from betaspectra.ensembles import GeneralModelSpec, hermite_specialization, laguerre_specialization
from betaspectra.errors import DomainError, EnumerationSizeError
from betaspectra.mc import run_trials

import oracles
from conftest import SEED


def test_small_families():
    assert [str(p) for p in paths.enumerate_paths(2, 1)] == ["UD", "DU"]
    assert len(paths.enumerate_paths(4, 1)) == 12
    assert len(paths.enumerate_paths(2, 1, alternating=True)) == 4
    assert paths.family_size(4, 1) == 12
    assert paths.family_size(3, 2, alternating=True) == 9


@pytest.mark.parametrize("alt", [False, True])
def test_sizes_and_class_partition(alt):
    for k in range(1, 11):
        for r in range(0, (k if alt else k // 2) + 1):
            cs = paths.class_sums(k, r, alt)
            assert cs.count == paths.family_size(k, r, alt)
            assert sum(cs.depth_histogram.values()) == cs.count
            assert sum(cs.height_histogram.values()) == cs.count
            assert sum(paths.descent_class_count(k, r, i, alt) for i in range(0, k + 1)) == cs.count


def test_total_count_is_trinomial():
    for k in range(1, 11):
        total = sum(paths.family_size(k, r) for r in range(k // 2 + 1))
        assert total == sum(comb(k, j) * comb(k - j, j) for j in range(k // 2 + 1))
        assert sum(paths.family_size(k, r, True) for r in range(k + 1)) == comb(2 * k, k)


def test_profile_examples():
    p = paths.profile(paths.LatticePath((0, 1, 0, -1, -1, 1)))
    assert p.a == {0: 1, 1: 1} and p.b == {1: 1, 0: 1}
    assert p.min_level == -1 and p.max_level == 1 and p.depth == 1
    with pytest.raises(DomainError):
        paths.LatticePath((1, 1, -1))
    with pytest.raises(DomainError):
        paths.LatticePath((1, -1), alternating=True)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(1, 8), alt=st.booleans(), data=st.data())
def test_per_path_invariants(k, alt, data):
    r = data.draw(st.integers(0, k if alt else k // 2))
    ps = paths.enumerate_paths(k, r, alt)
    p = ps[data.draw(st.integers(0, len(ps) - 1))]
    pr = paths.profile(p)
    L = 2 * k if alt else k
    assert len(p.steps) == L and p.down_count == r
    assert sum(pr.a.values()) == L - 2 * r
    assert sum(pr.b.values()) == r
    assert pr.min_level <= 0 <= pr.max_level
    assert all(pr.min_level + 1 <= j <= pr.max_level for j in pr.b)
    assert len(set(ps)) == len(ps)


def test_size_limits():
    with pytest.raises(EnumerationSizeError):
        paths.enumerate_paths(13, 2)
    with pytest.raises(EnumerationSizeError):
        paths.class_sums(11, 2, alternating=True)
    with pytest.raises(DomainError):
        paths.enumerate_paths(4, 3)


def test_count_table():
    rows = paths.count_table(4)
    assert (2, 1, 1, 1) in rows and (2, 1, 0, 1) in rows
    assert sum(c for k, r, i, c in rows if k == 4) == 19


def test_integrate_and_difference():
    assert paths.integrate01(lambda x: np.sqrt(x)) == pytest.approx(2 / 3, abs=1e-14)
    val, err = paths.integrate01(lambda x: np.exp(x), with_error=True)
    assert val == pytest.approx(math.e - 1, abs=1e-14) and err < 1e-12
    x = np.array([1e-6, 0.3, 0.999])
    assert np.allclose(paths.central_difference(np.sin, x), np.cos(x), atol=1e-9)


def test_general_moment_examples():
    flat = GeneralModelSpec("tridiagonal", f=lambda x: 0 * x, g=lambda x: 0 * x + 1)
    assert paths.general_moment(2, flat) == pytest.approx(2.0)
    assert paths.general_moment(4, flat) == pytest.approx(6.0)
    lin = GeneralModelSpec("tridiagonal", f=lambda x: x, g=lambda x: 0 * x)
    assert paths.general_moment(3, lin) == pytest.approx(0.25)


def test_specialization_moments():
    for k in range(1, 9):
        assert paths.general_moment(k, hermite_specialization(2.0)) == pytest.approx(theory.semicircle_moment(k), abs=1e-13)
        for g in (0.25, 0.5, 1.0):
            assert g**k * paths.general_moment(k, laguerre_specialization(2.0, g)) == pytest.approx(theory.mp_moment(k, g), rel=1e-12)


TRI = GeneralModelSpec("tridiagonal", f=lambda x: x * x, g=lambda x: 1 + x / 2,
                       f_prime=lambda x: 2 * x, g_prime=lambda x: 0 * x + 0.5)
BI = GeneralModelSpec("bidiagonal", f=lambda x: 1 + x, g=lambda x: np.cos(x))


@pytest.mark.parametrize("i", [1, 2, 3, 4, 5])
def test_deviation_against_brute_force(i):
    ref = oracles.brute_force_deviation(TRI.f, TRI.g, paths.general_moment(i, TRI), i)
    got = paths.general_deviation(i, TRI)
    assert abs(got - ref) <= 0.05 * abs(ref) + 1e-4
    ref = oracles.brute_force_deviation(BI.f, BI.g, paths.general_moment(i, BI), i, bidiagonal=True)
    got = paths.general_deviation(i, BI)
    assert abs(got - ref) <= 0.05 * abs(ref) + 1e-4


def test_printed_deviation_disagrees_with_brute_force():
    ref = oracles.brute_force_deviation(TRI.f, TRI.g, paths.general_moment(2, TRI), 2)
    assert abs(paths.general_deviation(2, TRI, "printed") - ref) > 0.1
    with pytest.raises(DomainError):
        paths.general_deviation(2, TRI, "other")


def test_zero_noise_covariance():
    assert paths.general_covariance(2, 3, TRI) == 0.0
    assert np.all(paths.general_covariance_matrix(3, BI) == 0)


def test_hermite_specialization_covariance():
    for beta in (1.0, 2.0, 4.0):
        spec = hermite_specialization(beta)
        for i in range(1, 7):
            for j in range(1, 7):
                assert paths.general_covariance(i, j, spec) == pytest.approx((2 / beta) * theory.cov_hermite(i, j), abs=1e-10)


def test_laguerre_specialization_covariance_scaling():
    for g in (0.25, 0.5):
        spec = laguerre_specialization(2.0, g)
        for i in range(1, 5):
            for j in range(1, 5):
                lhs = g ** (i + j - 1) * paths.general_covariance(i, j, GeneralModelSpec(
                    "bidiagonal", spec.f, spec.g, spec.f_prime, spec.g_prime, g / 4, g / 4))
                assert lhs == pytest.approx(theory.cov_laguerre(i, j, g), rel=1e-10)


def test_hermite_specialization_deviation_is_model_specific():
    beta = 2.0
    spec = hermite_specialization(beta)
    for i in (2, 4):
        ensemble_value = (2 / beta - 1) * theory.dev_moment_hermite(i)
        assert abs(paths.general_deviation(i, spec) - ensemble_value) > 1e-3
    rep = run_trials(spec, 4, 4000, SEED, n=400)
    # rep.mean is the sample mean of tr M^i - n m_i - mu_i; remaining bias is O(1/n)
    assert np.all(np.abs(rep.mean) <= 4 * rep.mean_se + 2.0 / 400)


def test_enumeration_speed():
    paths._sums_cache.clear()
    paths._cache.clear()
    t0 = time.perf_counter()
    for alt in (False, True):
        for k in range(1, 11):
            for r in range(0, (k if alt else k // 2) + 1):
                paths.class_sums(k, r, alt)
    assert time.perf_counter() - t0 < 30
