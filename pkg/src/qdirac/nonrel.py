"""Non-relativistic (small xi) limit of the q-deformed Dirac oscillator."""
from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import ParameterError
from .oscillator import SIGMA_MINUS, SIGMA_PLUS, check_xi, spinor_op
from .qalgebra import annihilation, as_q, check_dim, q_number

# xi [n] above this is outside the regime where first order in xi is meaningful
WEAK_COUPLING = 0.1


def effective_hamiltonian(xi: float, q, dim: int) -> np.ndarray:
    """Diagonal first-order Hamiltonian.

    ``|n>|up>`` sits at ``1 + 2 xi [n]`` and ``|n>|down>`` at
    ``-1 - 2 xi [n+1]``.
    """
    xi = check_xi(xi)
    dim = check_dim(dim)
    if xi * q_number(dim, q) > WEAK_COUPLING:
        warnings.warn(
            f"xi [N] = {xi * q_number(dim, q):.3g} exceeds {WEAK_COUPLING}; "
            "the first-order Hamiltonian is a poor approximation",
            stacklevel=2,
        )
    n = np.arange(dim)
    diag = np.empty(2 * dim)
    diag[0::2] = 1.0 + 2.0 * xi * q_number(n, q)
    diag[1::2] = -1.0 - 2.0 * xi * q_number(n + 1, q)
    return np.diag(diag).astype(complex)


def first_order_energy(n, xi: float, q):
    return 1.0 + 2.0 * check_xi(xi) * np.asarray(q_number(n, q))


def m_observable(q, dim: int) -> np.ndarray:
    """``M = sigma_- a_q + sigma_+ a_q^+``."""
    a = annihilation(q, dim)
    return spinor_op(a, SIGMA_MINUS) + spinor_op(a.conj().T, SIGMA_PLUS)


def _check_coefficients(c_up: float, c_down: float):
    if isinstance(c_up, complex) or isinstance(c_down, complex):
        raise ParameterError("c_up and c_down must be real")
    if abs(c_up * c_up + c_down * c_down - 1.0) > 1e-12:
        raise ParameterError("c_up^2 + c_down^2 must equal 1")


def superposition_state(n: int, c_up: float, c_down: float, dim: int) -> np.ndarray:
    """``c_up |n>|up> + c_down |n-1>|down>``."""
    _check_coefficients(c_up, c_down)
    if n < 1 or dim < n + 1:
        raise ParameterError("need 1 <= n <= dim - 1")
    psi = np.zeros(2 * dim, dtype=complex)
    psi[2 * n] = c_up
    psi[2 * n - 1] = c_down
    return psi


def m_expectation_closed(n: int, c_up: float, c_down: float, xi: float, q, tau):
    """``<M> = 2 c_up c_down sqrt([n]) cos(2 w_n tau)`` with ``w_n = 1 + 2 xi [n]``."""
    _check_coefficients(c_up, c_down)
    if n < 1:
        raise ParameterError("n must be >= 1")
    w = first_order_energy(n, xi, q)
    return 2.0 * c_up * c_down * math.sqrt(q_number(n, q)) * np.cos(2.0 * w * np.asarray(tau, dtype=float))


def jz_first_order(n: int, xi: float, q, tau):
    """``<J_z>`` for ``|n-1>|down>`` with beam splitters to first order in xi."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    q = as_q(q)
    qn = q_number(n, q)
    w = first_order_energy(n, xi, q)
    tau = np.asarray(tau, dtype=float)
    return -0.5 * (1.0 + 2.0 * q_number(n - 1, q)) + 4.0 * xi * qn * (1.0 - q ** (n - 1)) * np.sin(w * tau) ** 2
