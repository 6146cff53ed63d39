"""Time evolution, Zitterbewegung observables and collapse-revival traces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ParameterError
from .oscillator import angular_momenta, energy, state_index
from .qalgebra import as_q, q_number
from .states import coherent_probabilities, coherent_state, suggest_dim

COLLAPSE_FRACTION = 0.25
REVIVAL_FACTOR = 2.0


class AngularMomenta(NamedTuple):
    Lz: np.ndarray
    Sz: np.ndarray
    Jz: np.ndarray


@dataclass
class TimeSeries:
    """Observables sampled on a strictly increasing grid of times ``tau``."""

    tau: np.ndarray
    columns: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=float)
        if self.tau.ndim != 1 or np.any(np.diff(self.tau) <= 0):
            raise ParameterError("tau must be a strictly increasing 1-d grid")
        self.columns = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}
        for name, col in self.columns.items():
            if col.shape != self.tau.shape:
                raise ParameterError(f"column {name!r} does not match the tau grid")


def block_mask(size: int) -> np.ndarray:
    idx = np.arange(size)
    # partner of 2n is 2n-1 and vice versa; index 0 and the top |N-1>|down> are alone
    partner = np.where(idx % 2 == 0, idx - 1, idx + 1)
    mask = np.eye(size, dtype=bool)
    ok = (partner >= 0) & (partner < size)
    mask[idx[ok], partner[ok]] = True
    return mask


def evolve(H: np.ndarray, psi0: np.ndarray, tau) -> np.ndarray:
    """Propagate ``psi0`` under ``exp(-i H tau)``.

    ``H`` must be block diagonal in the subspaces ``H_n`` (true for the
    Dirac, AJC and effective Hamiltonians); each 2x2 block is exponentiated
    in closed form. A scalar ``tau`` returns one state, an array of times
    returns one row per time.
    """
    H = np.asarray(H)
    psi0 = np.asarray(psi0, dtype=complex)
    size = len(psi0)
    if H.shape != (size, size) or size % 2:
        raise ParameterError("H and psi0 must share an even spinor dimension")
    scale = max(1.0, float(np.abs(H).max()))
    if np.abs(H[~block_mask(size)]).max(initial=0.0) > 1e-13 * scale:
        raise ParameterError("H couples states outside the invariant subspaces H_n")
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))[:, None]

    out = np.empty((tau_arr.shape[0], size), dtype=complex)
    # one-dimensional subspaces: |0>|up> and the truncation edge |N-1>|down>
    for i in (0, size - 1):
        out[:, i] = np.exp(-1j * H[i, i].real * tau_arr[:, 0]) * psi0[i]

    up = np.arange(2, size - 1, 2)  # |n>|up>, n >= 1
    down = up - 1  # |n-1>|down>
    h_uu, h_dd, h_ud = H[up, up].real, H[down, down].real, H[up, down]
    a0 = 0.5 * (h_uu + h_dd)
    az = 0.5 * (h_uu - h_dd)
    ax, ay = h_ud.real, -h_ud.imag
    norm = np.sqrt(ax * ax + ay * ay + az * az)
    c = np.cos(norm * tau_arr)
    s_over = tau_arr * np.sinc(norm * tau_arr / math.pi)  # sin(|a| t)/|a|
    glob = np.exp(-1j * a0 * tau_arr)
    pu, pd = psi0[up], psi0[down]
    # exp(-i t a.sigma) = cos - i sin/|a| (a.sigma), sigma in basis (up, down)
    out[:, up] = glob * (c * pu - 1j * s_over * (az * pu + h_ud * pd))
    out[:, down] = glob * (c * pd - 1j * s_over * (np.conj(h_ud) * pu - az * pd))
    return out[0] if np.ndim(tau) == 0 else out


def expectation(op: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Real part of ``<psi|op|psi>`` for one state or a stack of states."""
    states = np.asarray(states)
    return np.einsum("...i,ij,...j->...", states.conj(), op, states).real


def number_spinor(n: int, spin: str, dim: int) -> np.ndarray:
    psi = np.zeros(2 * dim, dtype=complex)
    psi[state_index(n, spin)] = 1.0
    return psi


def coherent_spinor(alpha, q, dim: int | None = None) -> np.ndarray:
    """``|alpha> (x) |down>`` with the coherent part normalized on the truncation."""
    c = coherent_state(alpha, q, dim)
    psi = np.zeros(2 * len(c), dtype=complex)
    psi[1::2] = c
    return psi


def angular_observables(H, psi0, tau, q, convention="deformed") -> AngularMomenta:
    """``<L_z>, <S_z>, <J_z>`` along the evolution of ``psi0`` under ``H``."""
    states = evolve(H, psi0, tau)
    ops = angular_momenta(q, len(psi0) // 2, convention)
    return AngularMomenta(*(expectation(op, states) for op in ops))


def visibility(n, xi: float, q):
    """Amplitude ``4 xi [n] / (1 + 4 xi [n])`` of the spin oscillation."""
    g2 = 4.0 * xi * np.asarray(q_number(n, q))
    return g2 / (1.0 + g2)


def zitter_number_closed(n: int, xi: float, q, tau) -> AngularMomenta:
    """Closed forms for the initial state ``|n-1>|down>``, ``n >= 1``."""
    if n < 1:
        raise ParameterError("Zitterbewegung of |n-1>|down> needs n >= 1")
    q = as_q(q)
    tau = np.asarray(tau, dtype=float)
    osc = visibility(n, xi, q) * np.sin(energy(n, xi, q) * tau) ** 2
    qn1 = q_number(n - 1, q)
    lz = -qn1 - q ** (n - 1) * osc
    sz = -0.5 + osc
    jz = -0.5 * (1.0 + 2.0 * qn1) + (1.0 - q ** (n - 1)) * osc
    return AngularMomenta(lz, sz, jz)


def zitter_coherent_closed(alpha, xi: float, q, tau, dim: int | None = None) -> AngularMomenta:
    """Series for the initial state ``|alpha>|down>``.

    Each number component ``|m>`` contributes the oscillation of subspace
    ``H_{m+1}``; the weights are the number distribution of the truncated
    coherent state, cut at the same dimension as :func:`coherent_state`.
    """
    q = as_q(q)
    probs = coherent_probabilities(alpha, q, dim)
    m = np.arange(len(probs))
    qm = q_number(m, q)
    tau = np.asarray(tau, dtype=float)
    s = visibility(m + 1, xi, q) * np.sin(np.multiply.outer(tau, energy(m + 1, xi, q))) ** 2
    mean_qn = float(probs @ qm)
    lz = -mean_qn - s @ (probs * q ** m)
    sz = -0.5 + s @ probs
    jz = -0.5 - mean_qn + (1.0 - q) * (s @ (probs * qm))
    return AngularMomenta(lz, sz, jz)


def fig2_trace(tau, alpha=1.0, q=0.75, xi: float = 0.25, dim: int | None = None) -> TimeSeries:
    """``<L_z>, <S_z>, <J_z>`` for a coherent initial state over ``tau``."""
    vals = zitter_coherent_closed(alpha, xi, q, tau, dim)
    meta = {
        "q": as_q(q),
        "xi": float(xi),
        "alpha": complex(alpha) if complex(alpha).imag else float(complex(alpha).real),
        "dim": dim if dim is not None else suggest_dim(alpha, q),
        "convention": "deformed",
    }
    return TimeSeries(tau, vals._asdict(), meta)


def envelope(values, tau, window: float) -> tuple[np.ndarray, np.ndarray]:
    """Forward moving-window peak-to-peak amplitude.

    Returns ``(tau_start, amplitude)``; window ``i`` covers
    ``[tau_i, tau_i + window]``. Assumes a uniform ``tau`` grid.
    """
    values = np.asarray(values, dtype=float)
    tau = np.asarray(tau, dtype=float)
    step = tau[1] - tau[0]
    width = int(round(window / step)) + 1
    if width > len(values):
        raise ParameterError("window is longer than the trace")
    win = sliding_window_view(values, width)
    return tau[: len(win)], win.max(axis=1) - win.min(axis=1)


@dataclass(frozen=True)
class CollapseRevival:
    initial: float
    minimum: float
    tau_minimum: float
    revival_peak: float
    tau_revival: float
    collapsed: bool
    revived: bool


def fast_window(xi: float, q, periods: int = 3) -> float:
    """``periods`` oscillation periods of ``sin^2(E_1 tau)``, i.e. ``periods * pi / E_1``."""
    return periods * math.pi / energy(1, xi, q)


def collapse_revival(values, tau, window: float) -> CollapseRevival:
    """Detect a collapse and a later revival in the envelope of ``values``.

    Collapse: the envelope drops below ``COLLAPSE_FRACTION`` of its initial
    value. The collapse minimum is the lowest envelope value before it first
    climbs back above that level. Revival: the envelope later exceeds
    ``REVIVAL_FACTOR`` times the collapse minimum; the reported peak is the
    largest envelope value after the minimum.
    """
    t, env = envelope(values, tau, window)
    initial = float(env[0])
    level = COLLAPSE_FRACTION * initial
    below = np.nonzero(env < level)[0]
    if initial == 0.0 or below.size == 0:
        i = int(np.argmin(env))
        return CollapseRevival(initial, float(env[i]), float(t[i]), math.nan, math.nan, False, False)
    start = int(below[0])
    above = np.nonzero(env[start:] >= level)[0]
    stop = start + int(above[0]) if above.size else len(env)
    i = start + int(np.argmin(env[start:stop]))
    if i == len(env) - 1:
        return CollapseRevival(initial, float(env[i]), float(t[i]), math.nan, math.nan, True, False)
    j = i + int(np.argmax(env[i:]))
    revived = bool(env[j] > REVIVAL_FACTOR * env[i])
    return CollapseRevival(initial, float(env[i]), float(t[i]), float(env[j]), float(t[j]), True, revived)
