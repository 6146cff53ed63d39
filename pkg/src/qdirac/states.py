"""Number and q-coherent states, the q-exponential, and photon statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .errors import DivergentSeries, TruncationTooSmall, UndefinedStatistic
from .qalgebra import DeformationParam, annihilation, as_q, check_dim, log_q_factorial, q_number

TAIL_TOL = 1e-10
RESIDUAL_TOL = 1e-10
_MAX_DIM = 1 << 20


@dataclass(frozen=True)
class CoherentParam:
    """Eigenvalue ``alpha`` of ``a_q`` and the deformation.

    For ``q < 1`` the state exists only for ``|alpha|**2 < 1/(1-q)``.
    """

    alpha: complex
    q: DeformationParam

    def __post_init__(self):
        q = self.q if isinstance(self.q, DeformationParam) else DeformationParam(self.q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "alpha", complex(self.alpha))
        if not abs(self.alpha) ** 2 < q.radius:
            raise DivergentSeries(
                f"|alpha|^2 = {abs(self.alpha) ** 2:g} is outside the convergence "
                f"radius 1/(1-q) = {q.radius:g}"
            )

    @property
    def alpha_sq(self) -> float:
        return abs(self.alpha) ** 2


def basis_state(n: int, dim: int) -> np.ndarray:
    dim = check_dim(dim)
    if not 0 <= n < dim:
        raise ValueError(f"number state |{n}> does not fit in dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


class QSeries(NamedTuple):
    value: float
    tail_bound: float
    terms: int


def _log_terms(z: float, q: float, count: int) -> np.ndarray:
    # log(z**n / [n]!) for n < count, z > 0
    n = np.arange(count)
    return n * math.log(z) - log_q_factorial(n, q)


def _log_tail_bound(z: float, q: float, log_terms: np.ndarray) -> np.ndarray:
    """Log of a bound on ``sum_{k >= N} z**k/[k]!`` for N = 0..len-1.

    The term ratio ``z/[k+1]`` decreases with k, so the tail after N is
    dominated by a geometric series with ratio ``z/[N+1]``.
    """
    n = np.arange(len(log_terms))
    ratio = z / q_number(n + 1, q)
    with np.errstate(divide="ignore"):
        return np.where(ratio < 1.0, log_terms - np.log1p(-np.minimum(ratio, 0.999999999999)), np.inf)


def q_exponential(z: float, q, terms: int | None = None) -> QSeries:
    """Partial sum of ``e_q(z) = sum_n z**n / [n]!`` and a bound on the dropped tail.

    With ``terms=None`` the series is summed until the tail bound falls
    below 1e-16 relative to the partial sum.
    """
    q = as_q(q)
    if z < 0:
        raise ValueError("q_exponential is implemented for z >= 0")
    if q < 1.0 and z >= 1.0 / (1.0 - q):
        raise DivergentSeries(f"e_q(z) diverges for z = {z:g} >= 1/(1-q) = {1 / (1 - q):g}")
    if z == 0.0:
        return QSeries(1.0, 0.0, terms or 1)
    count = terms if terms is not None else 64
    while True:
        lt = _log_terms(z, q, count + 1)
        lsum = np.logaddexp.accumulate(lt)
        ltail = _log_tail_bound(z, q, lt)
        if terms is not None:
            return QSeries(float(np.exp(lsum[terms - 1])), float(np.exp(ltail[terms])), terms)
        ok = np.nonzero(ltail[1:] - lsum[:-1] < math.log(1e-16))[0]
        if ok.size:
            n = int(ok[0]) + 1
            return QSeries(float(np.exp(lsum[n - 1])), float(np.exp(ltail[n])), n)
        if count >= _MAX_DIM:
            raise DivergentSeries("q-exponential did not converge within the dimension cap")
        count *= 2


def truncation_tail(alpha, q, dim: int) -> float:
    """Upper bound on the probability a q-coherent state puts above ``|dim-1>``."""
    p = CoherentParam(alpha, q)
    if p.alpha_sq == 0.0:
        return 0.0
    lt = _log_terms(p.alpha_sq, p.q.q, dim + 1)
    ltail = _log_tail_bound(p.alpha_sq, p.q.q, lt)[dim]
    return float(min(1.0, math.exp(ltail - logsumexp(lt[:dim]))))


def suggest_dim(alpha, q, tail_tol: float = TAIL_TOL, residual_tol: float = RESIDUAL_TOL) -> int:
    """Smallest truncation for which the coherent state is trustworthy.

    Requires both the dropped probability ``<= tail_tol`` and the
    eigenvalue residual ``|alpha| |c_{dim-1}| <= residual_tol``; the latter
    is the only component of ``a_q|alpha> - alpha|alpha>`` that survives
    truncation.
    """
    p = CoherentParam(alpha, q)
    z = p.alpha_sq
    if z == 0.0:
        return 2
    count = 64
    while count <= _MAX_DIM:
        lt = _log_terms(z, p.q.q, count + 1)
        lsum = np.logaddexp.accumulate(lt)[:-1]  # lsum[N-1] = log S_N
        ltail = _log_tail_bound(z, p.q.q, lt)[1:]  # ltail[N-1] bounds sum_{k >= N}
        dims = np.arange(1, count + 1)
        tail_ok = ltail - lsum <= math.log(tail_tol)
        edge = math.log(z) + lt[:-1] - lsum  # log(|alpha|^2 p_{N-1})
        res_ok = edge <= 2.0 * math.log(residual_tol)
        ok = np.nonzero(tail_ok & res_ok & (dims >= 2))[0]
        if ok.size:
            return int(dims[ok[0]])
        count *= 2
    raise TruncationTooSmall("no truncation below the dimension cap meets the tolerance")


def coherent_state(alpha, q, dim: int | None = None) -> np.ndarray:
    """Normalized q-coherent state with amplitudes ``alpha**n / sqrt([n]!)``.

    The truncated vector is renormalized to unit norm. When ``dim`` is
    omitted :func:`suggest_dim` picks it; an explicit ``dim`` that drops
    more than ``TAIL_TOL`` probability raises :class:`TruncationTooSmall`.
    """
    p = CoherentParam(alpha, q)
    if dim is None:
        dim = suggest_dim(p.alpha, p.q)
    dim = check_dim(dim)
    if p.alpha == 0:
        return basis_state(0, dim)
    tail = truncation_tail(p.alpha, p.q, dim)
    if tail > TAIL_TOL:
        raise TruncationTooSmall(
            f"dimension {dim} drops probability up to {tail:.3g} > {TAIL_TOL:g}",
            suggested_dim=suggest_dim(p.alpha, p.q),
        )
    n = np.arange(dim)
    logw = 0.5 * _log_terms(p.alpha_sq, p.q.q, dim)
    logw -= logw.max()
    amps = np.exp(logw) * np.exp(1j * math.atan2(p.alpha.imag, p.alpha.real) * n)
    return amps / np.linalg.norm(amps)


def coherent_probabilities(alpha, q, dim: int | None = None) -> np.ndarray:
    """Number distribution ``|<n|alpha>|^2`` of the truncated, normalized state."""
    return np.abs(coherent_state(alpha, q, dim)) ** 2


def eigen_residual(alpha, q, dim: int | None = None) -> float:
    """``|| a_q|alpha> - alpha|alpha> ||`` computed with the truncated matrices."""
    psi = coherent_state(alpha, q, dim)
    a = annihilation(q, len(psi))
    return float(np.linalg.norm(a @ psi - complex(alpha) * psi))


def _mandel(values: np.ndarray, probs: np.ndarray) -> float:
    mean = float(probs @ values)
    if mean == 0.0:
        raise UndefinedStatistic("Mandel parameter is undefined when the mean number is zero")
    var = float(probs @ (values - mean) ** 2)
    return var / mean - 1.0


def mandel_Qq(alpha, q) -> float:
    """Closed form of the deformed Mandel parameter, ``(q - 1)|alpha|^2``."""
    p = CoherentParam(alpha, q)
    return (p.q.q - 1.0) * p.alpha_sq


def mandel_Qq_numeric(alpha, q, dim: int | None = None) -> float:
    """Deformed Mandel parameter from ``[n]`` moments of the truncated state."""
    probs = coherent_probabilities(alpha, q, dim)
    return _mandel(q_number(np.arange(len(probs)), q), probs)


def mandel_Q(alpha, q, dim: int | None = None) -> float:
    """Ordinary Mandel parameter ``Var(n)/<n> - 1`` of the q-coherent state."""
    probs = coherent_probabilities(alpha, q, dim)
    return _mandel(np.arange(len(probs), dtype=float), probs)


def fig1_data(q, alpha_sq) -> np.ndarray:
    """Table with columns ``alpha_sq, Qq, Q`` over a grid of ``|alpha|^2``.

    ``Q`` is NaN at ``alpha_sq = 0`` where it is undefined.
    """
    rows = []
    for z in np.asarray(alpha_sq, dtype=float):
        alpha = math.sqrt(z)
        CoherentParam(alpha, q)
        Q = math.nan if z == 0.0 else mandel_Q(alpha, q)
        rows.append((z, mandel_Qq(alpha, q), Q))
    return np.array(rows, dtype=float).reshape(-1, 3)
