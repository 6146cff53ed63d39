from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdirac.errors import ParameterError
from qdirac.qalgebra import (
    DeformationParam,
    annihilation,
    commutator,
    creation,
    log_q_factorial,
    nonlinearity_F,
    number_op,
    q_factorial,
    q_number,
    q_number_op,
)


def exact_q_number(n, q: Fraction) -> Fraction:
    return sum((q**k for k in range(n)), Fraction(0))


@pytest.mark.parametrize(
    "n,q,expected",
    [(0, 0.3, 0.0), (5, 1.0, 5.0), (2, 0.5, 1.5), (10, 0.0, 1.0), (1, 0.7, 1.0)],
)
def test_q_number_values(n, q, expected):
    assert q_number(n, q) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("q", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(99, 100)])
def test_q_number_matches_exact_sum(q):
    n = np.arange(40)
    exact = np.array([float(exact_q_number(k, q)) for k in n])
    np.testing.assert_allclose(q_number(n, float(q)), exact, rtol=1e-14)


def test_q_number_near_one_is_stable():
    # 1 - 1e-12: the naive ratio loses about four digits here
    q = 1.0 - 1e-12
    n = np.arange(1, 30)
    np.testing.assert_allclose(q_number(n, q), n - 1e-12 * n * (n - 1) / 2, rtol=1e-14)


@given(st.integers(2, 60), st.floats(0.01, 0.98), st.floats(0.001, 0.019))
def test_q_number_increasing_in_q(n, q, dq):
    assert q_number(n, q) < q_number(n, q + dq)


@given(st.integers(0, 80), st.floats(0.0, 1.0))
def test_q_number_bounds(n, q):
    v = q_number(n, q)
    assert 0.0 <= v <= n + 1e-12


def test_q_factorial_exact():
    q = Fraction(1, 2)
    exact = Fraction(1)
    for k in range(1, 8):
        exact *= exact_q_number(k, q)
    assert q_factorial(7, 0.5) == pytest.approx(float(exact), rel=1e-14)
    assert q_factorial(0, 0.5) == 1.0
    assert np.exp(log_q_factorial(7, 0.5)) == pytest.approx(float(exact), rel=1e-13)


@pytest.mark.parametrize("q", [0.0, 1e-300, 1.0])
def test_deformation_param_edges(q):
    d = DeformationParam(q)
    if q == 1.0:
        assert d.epsilon == 0.0 and d.alpha == 0.0
    assert d.alpha**2 == pytest.approx(d.epsilon / 2) or d.epsilon == np.inf


@pytest.mark.parametrize("bad", [-0.1, 1.0001, float("nan")])
def test_deformation_param_rejects(bad):
    with pytest.raises(ParameterError):
        DeformationParam(bad)


@pytest.mark.parametrize("q", [0.25, 0.5, 0.75, 1.0])
def test_q_commutator_on_interior(q):
    dim = 12
    a, ad = annihilation(q, dim), creation(q, dim)
    r = a @ ad - q * ad @ a - np.eye(dim)
    assert np.abs(r[:-1, :-1]).max() < 1e-14
    # the truncation artifact sits in the top corner only
    assert abs(r[-1, -1]) > 0.1


@pytest.mark.parametrize("q", [0.3, 0.9, 1.0])
def test_commutator_with_number_operator(q):
    dim = 10
    a = annihilation(q, dim)
    c = commutator(a, number_op(dim))
    np.testing.assert_allclose(c[:-1, :-1], a[:-1, :-1], atol=1e-15)


def test_q_number_operator_is_adag_a():
    a = annihilation(0.6, 9)
    np.testing.assert_allclose(a.conj().T @ a, q_number_op(0.6, 9), atol=1e-14)


@pytest.mark.parametrize("q", [0.2, 0.8])
def test_f_factorization(q):
    dim = 15
    F = np.diag(nonlinearity_F(np.arange(dim), q))
    np.testing.assert_allclose(annihilation(q, dim), F @ annihilation(1.0, dim), rtol=1e-15, atol=0)


def test_undeformed_limit_rate():
    dim = 8
    diffs = []
    for eps in (1e-2, 1e-3, 1e-4):
        diffs.append(np.abs(annihilation(np.exp(-eps), dim) - annihilation(1.0, dim)).max())
    ratios = np.array(diffs[:-1]) / np.array(diffs[1:])
    np.testing.assert_allclose(ratios, 10.0, rtol=0.05)


@pytest.mark.parametrize("dim", [1, 0, 2.5])
def test_bad_dim(dim):
    with pytest.raises(ParameterError):
        annihilation(0.5, dim)
