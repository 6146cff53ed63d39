import math
import warnings

import numpy as np
import pytest

from qdirac import dynamics, nonrel
from qdirac.errors import ParameterError
from qdirac.oscillator import angular_momenta, build_dirac_q, energy
from qdirac.qalgebra import commutator


@pytest.mark.parametrize("q", [0.25, 0.75, 1.0])
@pytest.mark.parametrize("convention", ["deformed", "standard"])
def test_heff_commutes_exactly(q, convention):
    heff = nonrel.effective_hamiltonian(0.005, q, 10)
    lz, sz, _ = angular_momenta(q, 10, convention)
    assert not np.any(commutator(heff, sz))
    assert not np.any(commutator(heff, lz))


def test_heff_diagonal_entries():
    h = np.diag(nonrel.effective_hamiltonian(0.01, 0.5, 3)).real
    np.testing.assert_allclose(h, [1.0, -1.02, 1.02, -1.03, 1.03, -1.035])


@pytest.mark.parametrize("q", [0.25, 0.5, 0.75, 1.0])
@pytest.mark.parametrize("n", [1, 3, 5])
def test_first_order_error_is_second_order(q, n):
    err = [abs(energy(n, xi, q) - nonrel.first_order_energy(n, xi, q)) for xi in (0.01, 0.005, 0.0025)]
    for a, b in zip(err, err[1:]):
        assert 3.5 <= a / b <= 4.5


@pytest.mark.parametrize("q", [0.3, 1.0])
@pytest.mark.parametrize("c_up,c_down", [(0.6, 0.8), (1 / math.sqrt(2), -1 / math.sqrt(2))])
def test_m_closed_form_under_heff(q, c_up, c_down):
    n, xi, dim = 2, 0.02, 5
    tau = np.linspace(0.0, 10.0, 41)
    psi = dynamics.evolve(nonrel.effective_hamiltonian(xi, q, dim), nonrel.superposition_state(n, c_up, c_down, dim), tau)
    brute = dynamics.expectation(nonrel.m_observable(q, dim), psi)
    np.testing.assert_allclose(nonrel.m_expectation_closed(n, c_up, c_down, xi, q, tau), brute, atol=1e-12)


def test_m_under_full_hamiltonian_scales_as_sqrt_xi():
    # the block rotation axis tilts by 2 sqrt(xi [n]); unequal weights feel it at first order
    n, q, dim = 2, 0.75, 5
    devs = []
    for xi in (0.004, 0.001):
        tau = np.linspace(0.0, math.pi / nonrel.first_order_energy(n, xi, q), 400)
        psi0 = nonrel.superposition_state(n, 0.6, 0.8, dim)
        full = dynamics.expectation(nonrel.m_observable(q, dim), dynamics.evolve(build_dirac_q(xi, q, dim), psi0, tau))
        devs.append(np.abs(full - nonrel.m_expectation_closed(n, 0.6, 0.8, xi, q, tau)).max())
    assert devs[0] / devs[1] == pytest.approx(2.0, rel=0.05)


def test_jz_first_order_limits():
    tau = np.linspace(0, 5, 11)
    np.testing.assert_allclose(nonrel.jz_first_order(1, 0.01, 0.5, tau), -0.5)
    assert np.ptp(nonrel.jz_first_order(3, 0.01, 1.0, tau)) == 0.0


def test_weak_coupling_warning():
    with pytest.warns(UserWarning):
        nonrel.effective_hamiltonian(0.1, 1.0, 10)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        nonrel.effective_hamiltonian(0.001, 0.5, 10)


@pytest.mark.parametrize("c", [(0.6, 0.6), (0.6j, 0.8)])
def test_bad_coefficients(c):
    with pytest.raises(ParameterError):
        nonrel.superposition_state(1, *c, 4)
