"""q-deformed Dirac oscillator and the (anti-)Jaynes-Cummings Hamiltonians.

Units: ``mc^2 = hbar = 1``, coupling ``xi = hbar*omega/(mc^2)``, time
``tau = mc^2 t/hbar``. Only the left-handed chiral mode is kept (the
right-handed one stays in vacuum).

Spinor operators act on ``C^dim (x) C^2`` with interleaved ordering:
index ``2n`` is ``|n>|up>`` and index ``2n+1`` is ``|n>|down>``. The
two-dimensional invariant subspace ``H_n = span{|n>|up>, |n-1>|down>}``
then occupies the contiguous indices ``2n-1, 2n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ParameterError
from .qalgebra import annihilation, as_q, check_dim, number_op, q_number, q_number_op

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |up><down|
SIGMA_MINUS = SIGMA_PLUS.T.copy()
ID2 = np.eye(2, dtype=complex)

GROUND_ENERGY = 1.0  # the unpaired level |0>|up>, in units of mc^2

Convention = Literal["deformed", "standard"]


def check_xi(xi: float) -> float:
    xi = float(xi)
    if not xi >= 0.0 or math.isinf(xi):
        raise ParameterError(f"coupling xi must be finite and >= 0, got {xi!r}")
    return xi


@dataclass(frozen=True)
class AjcParams:
    """Detuning ``delta``, coupling ``eta`` and phase ``phi`` (mc^2 units)."""

    delta: float
    eta: float
    phi: float

    def __post_init__(self):
        for name in ("delta", "eta", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")


@dataclass(frozen=True)
class SubspaceBlock:
    """Dirac Hamiltonian restricted to ``H_n`` in the basis ``(|n>|up>, |n-1>|down>)``."""

    n: int
    theta: float
    energy: float
    h2: np.ndarray


def spinor_op(boson: np.ndarray, spin: np.ndarray) -> np.ndarray:
    return np.kron(boson, spin)


def state_index(n: int, spin: Literal["up", "down"]) -> int:
    return 2 * n + (0 if spin == "up" else 1)


def block_indices(n: int) -> tuple[int, int]:
    """Spinor indices of ``(|n>|up>, |n-1>|down>)``."""
    if n < 1:
        raise ParameterError("two-dimensional subspaces start at n = 1")
    return 2 * n, 2 * n - 1


def build_dirac_q(xi: float, q, dim: int) -> np.ndarray:
    """``H = sigma_z + i sqrt(4 xi) (sigma_+ a_q^+ - sigma_- a_q)``."""
    xi = check_xi(xi)
    a = annihilation(q, dim)
    g = math.sqrt(4.0 * xi)
    return spinor_op(np.eye(dim), SIGMA_Z) + 1j * g * (
        spinor_op(a.conj().T, SIGMA_PLUS) - spinor_op(a, SIGMA_MINUS)
    )


def build_ajc_q(p: AjcParams, q, dim: int) -> np.ndarray:
    """Anti-Jaynes-Cummings: ``delta sz + eta (s+ a^+ e^{i phi} + s- a e^{-i phi})``."""
    a = annihilation(q, dim)
    ph = np.exp(1j * p.phi)
    return p.delta * spinor_op(np.eye(dim), SIGMA_Z) + p.eta * (
        ph * spinor_op(a.conj().T, SIGMA_PLUS) + np.conj(ph) * spinor_op(a, SIGMA_MINUS)
    )


def build_jc_q(p: AjcParams, q, dim: int) -> np.ndarray:
    """Jaynes-Cummings: ``delta sz + eta (s+ a e^{i phi} + s- a^+ e^{-i phi})``."""
    a = annihilation(q, dim)
    ph = np.exp(1j * p.phi)
    return p.delta * spinor_op(np.eye(dim), SIGMA_Z) + p.eta * (
        ph * spinor_op(a, SIGMA_PLUS) + np.conj(ph) * spinor_op(a.conj().T, SIGMA_MINUS)
    )


def equivalence_map(xi: float) -> AjcParams:
    """AJC parameters that reproduce the Dirac oscillator exactly."""
    return AjcParams(delta=1.0, eta=2.0 * math.sqrt(check_xi(xi)), phi=math.pi / 2)


def energy(n, xi: float, q):
    """``E_n = sqrt(1 + 4 xi [n])``; elementwise in ``n``."""
    out = np.sqrt(1.0 + 4.0 * check_xi(xi) * np.asarray(q_number(n, q)))
    return float(out) if np.ndim(out) == 0 else out


def spectrum_analytic(xi: float, q, n_max: int) -> np.ndarray:
    """Rows ``(n, +E_n, -E_n)`` for ``n = 1..n_max``.

    The unpaired level ``E_0 = +1`` is :data:`GROUND_ENERGY`.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    n = np.arange(1, n_max + 1)
    e = energy(n, xi, q)
    return np.column_stack([n, e, -e])


def eigenstates(xi: float, q, n: int, dim: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors ``|+E_n>, |-E_n>`` as length ``2*dim`` spinor arrays.

    ``|+-E_n> = c_+- |n>|up> -+ i c_-+ |n-1>|down>`` with
    ``c_+- = sqrt((E_n +- 1) / (2 E_n))``.
    """
    if n < 1:
        raise ParameterError("eigenstates |+-E_n> exist for n >= 1")
    dim = check_dim(n + 1 if dim is None else dim)
    if dim < n + 1:
        raise ParameterError(f"dimension {dim} cannot hold |{n}>")
    e = energy(n, xi, q)
    cp, cm = math.sqrt((e + 1) / (2 * e)), math.sqrt((e - 1) / (2 * e))
    up, down = block_indices(n)
    plus = np.zeros(2 * dim, dtype=complex)
    minus = np.zeros(2 * dim, dtype=complex)
    plus[up], plus[down] = cp, -1j * cm
    minus[up], minus[down] = cm, 1j * cp
    return plus, minus


def subspace_block(xi: float, q, n: int) -> SubspaceBlock:
    """``h2 = sigma_z - sqrt(4 xi [n]) sigma_y = E_n e^{-i theta sx} sz e^{i theta sx}``."""
    if n < 1:
        raise ParameterError("two-dimensional subspaces start at n = 1")
    g = math.sqrt(4.0 * check_xi(xi) * q_number(n, q))
    return SubspaceBlock(
        n=n,
        theta=0.5 * math.atan(g),
        energy=math.sqrt(1.0 + g * g),
        h2=SIGMA_Z - g * SIGMA_Y,
    )


def block_propagator(b: SubspaceBlock, tau):
    """Interferometer form ``e^{-i theta sx} e^{-i E tau sz} e^{i theta sx}``.

    ``tau`` may be an array; the result then has shape ``tau.shape + (2, 2)``.
    """
    tau = np.asarray(tau, dtype=float)
    c, s = math.cos(b.theta), math.sin(b.theta)
    split_in = c * ID2 + 1j * s * SIGMA_X
    split_out = c * ID2 - 1j * s * SIGMA_X
    phase = np.zeros(tau.shape + (2, 2), dtype=complex)
    phase[..., 0, 0] = np.exp(-1j * b.energy * tau)
    phase[..., 1, 1] = np.exp(1j * b.energy * tau)
    return split_out @ phase @ split_in


def angular_momenta(q, dim: int, convention: Convention = "deformed"):
    """``(L_z, S_z, J_z)`` in units of hbar with the right-handed mode in vacuum.

    ``deformed``: ``L_z = -[n]``; ``standard``: ``L_z = -n``.
    """
    as_q(q)
    if convention == "deformed":
        orbital = q_number_op(q, dim)
    elif convention == "standard":
        orbital = number_op(dim)
    else:
        raise ParameterError(f"unknown angular momentum convention {convention!r}")
    lz = -spinor_op(orbital, ID2)
    sz = 0.5 * spinor_op(np.eye(dim), SIGMA_Z)
    return lz, sz, lz + sz
