"""Grid realization of the q-deformed annihilation operator.

The differential form

    a_q = [exp(-2i alpha z) - exp(i alpha d/dz) exp(-i alpha z)] / (-i sqrt(1 - exp(-2 alpha^2)))

is built on a periodic grid of the wavenumber ``p`` conjugate to ``z``.
There ``exp(-i alpha z)`` shifts ``p`` by ``alpha`` and
``exp(i alpha d/dz) = exp(-alpha p)`` is diagonal. With grid spacing
``alpha/k`` the shift is an exact ``k``-cell permutation:

    (a_q psi)(p) = i [psi(p + 2 alpha) - exp(-alpha p) psi(p + alpha)] / sqrt(1 - q)

``exp(i alpha d/dz)`` is an imaginary translation, not a unitary one. The
q-commutator holds only with that reading.

The grid splits into ``k`` sublattices ``p = p0 + alpha Z`` ("sectors")
that the operator never mixes. Each sector carries its own copy of the
q-Fock ladder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import IncommensurateGrid, ParameterError
from .oscillator import SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, AjcParams, check_xi, energy, spinor_op
from .qalgebra import DeformationParam, q_number

Kind = Literal["dirac", "ajc", "jc"]

MIN_EXTENT = 10.0  # wavenumber window, in units of the ground-state width
# largest alpha * |p| on the grid; exp(25) ~ 7e10 keeps the rounding error
# of the ladder matrix (about 1e-16 * exp(alpha |p|)) below 1e-5
MAX_DECAY_EXPONENT = 25.0


@dataclass(frozen=True)
class GridConfig:
    """Periodic wavenumber grid with ``points`` nodes and spacing ``alpha/shift_steps``."""

    q: float
    points: int
    shift_steps: int = 8

    def __post_init__(self):
        d = DeformationParam(self.q)
        if d.q in (0.0, 1.0):
            raise ParameterError("the grid realization needs 0 < q < 1")
        object.__setattr__(self, "q", d.q)
        if self.shift_steps < 1 or self.points < 4 * self.shift_steps:
            raise ParameterError("need shift_steps >= 1 and points >= 4 * shift_steps")
        if self.points % (2 * self.shift_steps):
            raise ParameterError("points must be a multiple of 2 * shift_steps")
        if self.extent < MIN_EXTENT:
            raise ParameterError(
                f"grid window {self.extent:.3g} is narrower than {MIN_EXTENT}; add points"
            )
        if self.alpha * self.extent / 2 > MAX_DECAY_EXPONENT:
            raise ParameterError(
                f"exp(alpha p) spans e^{self.alpha * self.extent / 2:.3g} on this window, "
                "beyond double precision; use fewer points or larger shift_steps"
            )

    @classmethod
    def from_spacing(cls, q: float, spacing: float, points: int) -> GridConfig:
        """Build from an explicit spacing, which must divide ``alpha`` exactly."""
        alpha = DeformationParam(q).alpha
        k = alpha / spacing
        if spacing <= 0 or abs(k - round(k)) > 1e-9 * max(1.0, k) or round(k) < 1:
            raise IncommensurateGrid(f"spacing {spacing!r} does not divide alpha = {alpha!r}")
        return cls(q, points, int(round(k)))

    @property
    def alpha(self) -> float:
        return DeformationParam(self.q).alpha

    @property
    def spacing(self) -> float:
        return self.alpha / self.shift_steps

    @property
    def extent(self) -> float:
        return self.points * self.spacing

    @property
    def wavenumbers(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.spacing

    def sector(self, r: int = 0) -> np.ndarray:
        """Indices of the sublattice ``p = r*spacing + alpha Z``; sector 0 contains ``p = 0``."""
        if not 0 <= r < self.shift_steps:
            raise ParameterError(f"sector must be in [0, {self.shift_steps})")
        j = np.arange(self.points)
        return j[(j - self.points // 2) % self.shift_steps == r]


def shift_difference(g: GridConfig) -> np.ndarray:
    """Numerator ``exp(-2i alpha z) - exp(i alpha d/dz) exp(-i alpha z)`` as a matrix."""
    m, k = g.points, g.shift_steps
    i = np.arange(m)
    out = np.zeros((m, m), dtype=complex)
    out[i, (i + 2 * k) % m] += 1.0
    out[i, (i + k) % m] -= np.exp(-g.alpha * g.wavenumbers)
    return out


def _restrict(op: np.ndarray, g: GridConfig, sector: int | None) -> np.ndarray:
    if sector is None:
        return op
    idx = g.sector(sector)
    return op[np.ix_(idx, idx)]


def grid_annihilation(g: GridConfig, sector: int | None = None) -> np.ndarray:
    """``a_q`` on the grid; restricted to one sublattice when ``sector`` is given."""
    a = shift_difference(g) / (-1j * math.sqrt(-math.expm1(-2.0 * g.alpha**2)))
    return _restrict(a, g, sector)


def grid_hamiltonian(
    g: GridConfig,
    kind: Kind = "dirac",
    xi: float | None = None,
    params: AjcParams | None = None,
    sector: int | None = None,
) -> np.ndarray:
    """Dirac, AJC or JC Hamiltonian assembled over the grid ladder operator.

    Interleaved spinor ordering as in :mod:`qdirac.oscillator`.
    """
    a = grid_annihilation(g, sector)
    ad = a.conj().T
    eye = np.eye(len(a))
    if kind == "dirac":
        if xi is None:
            raise ParameterError("the Dirac grid Hamiltonian needs xi")
        c = math.sqrt(4.0 * check_xi(xi))
        return spinor_op(eye, SIGMA_Z) + 1j * c * (spinor_op(ad, SIGMA_PLUS) - spinor_op(a, SIGMA_MINUS))
    if params is None:
        raise ParameterError(f"the {kind} grid Hamiltonian needs AjcParams")
    ph = np.exp(1j * params.phi)
    if kind == "ajc":
        coupling = ph * spinor_op(ad, SIGMA_PLUS) + np.conj(ph) * spinor_op(a, SIGMA_MINUS)
    elif kind == "jc":
        coupling = ph * spinor_op(a, SIGMA_PLUS) + np.conj(ph) * spinor_op(ad, SIGMA_MINUS)
    else:
        raise ParameterError(f"unknown Hamiltonian kind {kind!r}")
    return params.delta * spinor_op(eye, SIGMA_Z) + params.eta * coupling


def check_G_constant(xi: float, q: float) -> float:
    """Prefactor ``G = sqrt(xi) / sqrt(2 (1 - exp(-2 alpha^2)))`` of the expanded
    Dirac Hamiltonian (``c sqrt(hbar m omega) = sqrt(xi)`` in natural units)."""
    d = DeformationParam(q)
    if d.q in (0.0, 1.0):
        raise ParameterError("G is defined for 0 < q < 1")
    return math.sqrt(check_xi(xi)) / math.sqrt(-2.0 * math.expm1(-2.0 * d.alpha**2))


def coupling_mismatch(xi: float, g: GridConfig) -> float:
    """Relative mismatch between the Dirac grid coupling block and ``2 sqrt(2) G N^+``.

    ``N`` is :func:`shift_difference`. Zero up to rounding when the
    assembled coupling equals ``sqrt(4 xi)`` times the normalized ladder.
    """
    h = grid_hamiltonian(g, "dirac", xi=xi)
    block = h[0::2, 1::2]  # <up| H |down>
    expected = 2.0 * math.sqrt(2.0) * check_G_constant(xi, g.q) * shift_difference(g).conj().T
    return float(np.linalg.norm(block - expected) / np.linalg.norm(expected))


def number_spectrum(g: GridConfig, levels: int = 6, sector: int = 0):
    """Lowest eigenvalues and eigenvectors of ``a_q^+ a_q`` on one sector.

    Taken from the singular value decomposition of ``a_q``: the diagonal
    ``exp(-alpha p)`` spans many decades across the window, and forming
    ``a_q^+ a_q`` explicitly would square that range.
    """
    a = grid_annihilation(g, sector)
    _, s, vh = np.linalg.svd(a)
    order = np.argsort(s)[:levels]
    return s[order] ** 2, vh.conj().T[:, order]


def commutator_residual(g: GridConfig, states: int = 5, sector: int = 0) -> float:
    """Largest ``||(a a^+ - q a^+ a - 1) psi||`` over the lowest ``a^+ a`` eigenstates."""
    a = grid_annihilation(g, sector)
    ad = a.conj().T
    _, v = number_spectrum(g, states, sector)
    r = a @ (ad @ v) - g.q * ad @ (a @ v) - v
    return float(np.linalg.norm(r, axis=0).max())


def vacuum_residual(g: GridConfig, sector: int = 0) -> float:
    """``||a_q psi_0|| / ||psi_0||`` for the lowest eigenvector of ``a^+ a``."""
    a = grid_annihilation(g, sector)
    _, v = number_spectrum(g, 1, sector)
    return float(np.linalg.norm(a @ v[:, 0]))


def dirac_levels(xi: float, g: GridConfig, count: int = 3, sector: int = 0) -> np.ndarray:
    """Grid approximations of ``E_1..E_count``.

    Rows are ``(positive branch, |negative branch|)``. The unpaired
    ``E_0 = +1`` is dropped from the positive branch. Since
    ``a a^+ = 1 + q a^+ a >= 1``, a negative level with ``|E|^2 < 1 + 2 xi``
    can only come from the kernel of the grid ``a^+`` at the top
    wavenumber (the analogue of the Fock truncation edge) and is dropped.
    """
    xi = check_xi(xi)
    w = np.linalg.eigvalsh(grid_hamiltonian(g, "dirac", xi=xi, sector=sector))
    pos = np.sort(w[w > 0])[1 : count + 1]
    neg = np.sort(-w[w < -math.sqrt(1.0 + 2.0 * xi)])[:count]
    return np.column_stack([pos, neg])


def convergence_table(xi: float, q: float, points=(256, 512, 1024), shift_steps: int = 8) -> np.ndarray:
    """Rows ``M, h, commutator_residual, eig_err_n1, eig_err_n2, eig_err_n3`` at fixed spacing.

    ``eig_err_n`` is the largest relative error of the two grid levels
    against ``sqrt(1 + 4 xi [n])``.
    """
    exact = energy(np.arange(1, 4), xi, q)
    rows = []
    for m in points:
        g = GridConfig(q, m, shift_steps)
        lv = dirac_levels(xi, g, 3)
        err = np.abs(lv - exact[:, None]).max(axis=1) / exact
        rows.append((m, g.spacing, commutator_residual(g), *err))
    return np.array(rows, dtype=float)


def number_errors(g: GridConfig, levels: int = 6, sector: int = 0) -> np.ndarray:
    """``|lambda_n - [n]|`` for the lowest ``levels`` eigenvalues of ``a^+ a``."""
    w, _ = number_spectrum(g, levels, sector)
    return np.abs(w - q_number(np.arange(levels), g.q))


def hermite_functions(p: np.ndarray, n_max: int) -> np.ndarray:
    """Normalized momentum-space oscillator eigenfunctions ``(-i)^n h_n(p)``.

    Row ``n`` holds the function sampled on ``p`` (not multiplied by the
    quadrature weight).
    """
    h = np.zeros((n_max + 1, len(p)))
    h[0] = math.pi**-0.25 * np.exp(-0.5 * p * p)
    if n_max >= 1:
        h[1] = math.sqrt(2.0) * p * h[0]
    for n in range(2, n_max + 1):
        h[n] = math.sqrt(2.0 / n) * p * h[n - 1] - math.sqrt((n - 1) / n) * h[n - 2]
    return h * ((-1j) ** np.arange(n_max + 1))[:, None]


def ladder_elements(g: GridConfig, n_max: int) -> np.ndarray:
    """``<phi_{n-1}| a_q |phi_n>`` for ``n = 1..n_max`` with Hermite functions ``phi_n``.

    Approaches ``sqrt(n)`` as ``q -> 1``.
    """
    phi = hermite_functions(g.wavenumbers, n_max) * math.sqrt(g.spacing)
    a = grid_annihilation(g)
    return np.array([np.vdot(phi[n - 1], a @ phi[n]) for n in range(1, n_max + 1)])
