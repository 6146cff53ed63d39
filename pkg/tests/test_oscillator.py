import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qdirac.errors import ParameterError
from qdirac.oscillator import (
    GROUND_ENERGY,
    SIGMA_X,
    SIGMA_Z,
    AjcParams,
    angular_momenta,
    block_indices,
    block_propagator,
    build_ajc_q,
    build_dirac_q,
    build_jc_q,
    eigenstates,
    energy,
    equivalence_map,
    spectrum_analytic,
    subspace_block,
)
from qdirac.qalgebra import commutator, q_number

Q_GRID = [0.25, 0.5, 0.75, 1.0]
XI_GRID = [0.1, 0.25, 1.0]


def test_energy_values():
    assert energy(0, 0.3, 0.5) == 1.0
    assert energy(2, 0.25, 0.5) == pytest.approx(math.sqrt(2.5))
    assert energy(3, 0.5, 1.0) == pytest.approx(math.sqrt(7.0))


@pytest.mark.parametrize("q", Q_GRID)
@pytest.mark.parametrize("xi", XI_GRID)
def test_spectrum_matches_diagonalization(q, xi):
    dim = 40
    w = np.linalg.eigvalsh(build_dirac_q(xi, q, dim))
    # expected multiset: E_0 = +1, +-E_n for n < dim, and the edge state -1
    e = energy(np.arange(1, dim), xi, q)
    expected = np.sort(np.concatenate([[GROUND_ENERGY, -1.0], e, -e]))
    np.testing.assert_allclose(w, expected, rtol=1e-12)
    assert np.sum(np.isclose(w, 1.0, atol=1e-10)) == 1


@pytest.mark.parametrize("q", Q_GRID)
def test_builders_hermitian_and_block_diagonal(q):
    dim = 10
    p = AjcParams(0.7, 0.3, 0.4)
    for H in (build_dirac_q(0.3, q, dim), build_ajc_q(p, q, dim)):
        assert np.array_equal(H, H.conj().T)
        for n in range(1, dim):
            i, j = block_indices(n)
            others = [k for k in range(2 * dim) if k not in (i, j)]
            assert np.all(H[np.ix_([i, j], others)] == 0)
    jc = build_jc_q(p, q, dim)
    assert np.array_equal(jc, jc.conj().T)


@pytest.mark.parametrize("q", Q_GRID)
@pytest.mark.parametrize("xi", XI_GRID)
def test_equivalence(q, xi):
    diff = build_dirac_q(xi, q, 30) - build_ajc_q(equivalence_map(xi), q, 30)
    assert np.abs(diff).max() < 1e-14


def test_equivalence_map_values():
    p = equivalence_map(0.25)
    assert (p.delta, p.eta, p.phi) == (1.0, 1.0, math.pi / 2)


def test_jc_is_not_equivalent():
    H = build_dirac_q(0.25, 0.5, 8)
    assert np.abs(H - build_jc_q(equivalence_map(0.25), 0.5, 8)).max() > 0.5


@pytest.mark.parametrize("n", [1, 2, 5])
def test_eigenstates(n):
    xi, q, dim = 0.4, 0.6, 8
    H = build_dirac_q(xi, q, dim)
    plus, minus = eigenstates(xi, q, n, dim)
    e = energy(n, xi, q)
    np.testing.assert_allclose(H @ plus, e * plus, atol=1e-14)
    np.testing.assert_allclose(H @ minus, -e * minus, atol=1e-14)
    assert abs(np.vdot(plus, minus)) < 1e-15


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.floats(0.01, 1.0), st.floats(0.0, 3.0), st.floats(-10, 10))
def test_block_propagator_matches_expm(n, q, xi, tau):
    b = subspace_block(xi, q, n)
    np.testing.assert_allclose(block_propagator(b, tau), scipy.linalg.expm(-1j * tau * b.h2), atol=1e-12)


def test_block_is_rotated_sigma_z():
    b = subspace_block(0.3, 0.5, 3)
    rot = scipy.linalg.expm(-1j * b.theta * SIGMA_X)
    np.testing.assert_allclose(b.h2, b.energy * rot @ SIGMA_Z @ rot.conj().T, atol=1e-14)
    assert math.tan(2 * b.theta) == pytest.approx(math.sqrt(4 * 0.3 * q_number(3, 0.5)))


def test_block_matches_full_hamiltonian():
    H = build_dirac_q(0.3, 0.5, 6)
    for n in range(1, 6):
        idx = block_indices(n)
        np.testing.assert_allclose(H[np.ix_(idx, idx)], subspace_block(0.3, 0.5, n).h2, atol=1e-15)


def test_propagator_vectorized():
    b = subspace_block(0.2, 0.7, 2)
    taus = np.array([0.0, 0.5, 1.0])
    out = block_propagator(b, taus)
    assert out.shape == (3, 2, 2)
    np.testing.assert_allclose(out[0], np.eye(2), atol=1e-15)


@pytest.mark.parametrize("q", Q_GRID)
def test_angular_momentum_conservation(q):
    dim = 20
    H = build_dirac_q(0.5, q, dim)
    inner = 2 * (dim - 1)
    deformed = commutator(H, angular_momenta(q, dim, "deformed")[2])[:inner, :inner]
    standard = commutator(H, angular_momenta(q, dim, "standard")[2])[:inner, :inner]
    assert np.linalg.norm(standard, 2) < 1e-12
    if q == 1.0:
        assert np.linalg.norm(deformed, 2) < 1e-12
    else:
        assert np.linalg.norm(deformed, 2) > 1e-3


def test_spectrum_analytic_rows():
    s = spectrum_analytic(0.25, 0.5, 3)
    np.testing.assert_allclose(s[:, 0], [1, 2, 3])
    np.testing.assert_allclose(s[:, 1], -s[:, 2])


@pytest.mark.parametrize("bad", [-0.1, float("inf"), float("nan")])
def test_bad_xi(bad):
    with pytest.raises(ParameterError):
        build_dirac_q(bad, 0.5, 5)


def test_bad_convention():
    with pytest.raises(ParameterError):
        angular_momenta(0.5, 5, "weird")
