"""q-deformed numbers and ladder operators on a truncated Fock space.

The deformed algebra is ``a a^+ - q a^+ a = 1`` with ``0 <= q <= 1``.
All operators are dense ``numpy`` arrays over the number basis
``|0>, ..., |dim-1>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# below this distance from q = 1 the closed form loses digits to cancellation
_NEAR_ONE = 1e-8


@dataclass(frozen=True)
class DeformationParam:
    """Deformation parameter ``q`` together with ``epsilon = -ln q`` and
    ``alpha = sqrt(-ln q / 2)``.

    ``q = 0`` is accepted (Susskind-Glogower regime) and gives
    ``epsilon = alpha = inf``.
    """

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 <= q <= 1.0) or math.isnan(q):
            raise ParameterError(f"deformation q must lie in [0, 1], got {self.q!r}")
        object.__setattr__(self, "q", q)

    @property
    def epsilon(self) -> float:
        return math.inf if self.q == 0.0 else -math.log(self.q)

    @property
    def alpha(self) -> float:
        return math.sqrt(self.epsilon / 2.0)

    @property
    def radius(self) -> float:
        """Convergence radius of the q-exponential, ``1/(1-q)``."""
        return math.inf if self.q == 1.0 else 1.0 / (1.0 - self.q)


def as_q(q) -> float:
    """Validate ``q`` (a float or :class:`DeformationParam`) and return it as float."""
    if isinstance(q, DeformationParam):
        return q.q
    return DeformationParam(q).q


def check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 2:
        raise ParameterError(f"truncation dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def q_number(n, q):
    """Deformed integer ``[n] = (1 - q**n) / (1 - q)``.

    Works elementwise on arrays. ``q = 1`` returns ``n`` exactly; close to
    ``q = 1`` the ratio is evaluated as ``expm1(n ln q) / expm1(ln q)``.
    """
    q = as_q(q)
    n = np.asarray(n)
    if np.any(n < 0):
        raise ParameterError("q_number is defined for non-negative integers")
    if q == 1.0:
        out = n.astype(float)
    elif q == 0.0:
        out = (n > 0).astype(float)
    elif q < 1.0 - _NEAR_ONE:
        out = (1.0 - q ** n.astype(float)) / (1.0 - q)
    else:
        lq = math.log(q)
        out = np.expm1(n * lq) / math.expm1(lq)
    return float(out) if out.ndim == 0 else out


def log_q_factorial(n, q):
    """Natural log of ``[n]!``; elementwise for array ``n``."""
    n = np.asarray(n)
    top = int(n.max()) if n.size else 0
    table = np.zeros(top + 1)
    if top >= 1:
        table[1:] = np.cumsum(np.log(q_number(np.arange(1, top + 1), q)))
    out = table[n]
    return float(out) if np.ndim(out) == 0 else out


def q_factorial(n: int, q) -> float:
    """``[n]! = [n][n-1]...[1]`` with ``[0]! = 1``."""
    if n < 0:
        raise ParameterError("q_factorial is defined for non-negative integers")
    if n == 0:
        return 1.0
    return float(np.prod(q_number(np.arange(1, n + 1), q)))


def nonlinearity_F(n, q):
    """Nonlinear map ``F(n) = sqrt([n+1] / (n+1))`` with ``a_q = F(a^+ a) a``."""
    n = np.asarray(n)
    out = np.sqrt(q_number(n + 1, q) / (n + 1.0))
    return float(out) if out.ndim == 0 else out


def annihilation(q, dim: int) -> np.ndarray:
    """Matrix of ``a_q`` with ``<n-1|a_q|n> = sqrt([n])``."""
    dim = check_dim(dim)
    return np.diag(np.sqrt(q_number(np.arange(1, dim), q)), k=1).astype(complex)


def creation(q, dim: int) -> np.ndarray:
    return annihilation(q, dim).conj().T


def number_op(dim: int) -> np.ndarray:
    """Ordinary number operator ``n`` (satisfies ``[a_q, n] = a_q``)."""
    dim = check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def q_number_op(q, dim: int) -> np.ndarray:
    """Deformed number operator ``[n] = a_q^+ a_q``."""
    dim = check_dim(dim)
    return np.diag(q_number(np.arange(dim), q)).astype(complex)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def interior(op: np.ndarray, size: int) -> np.ndarray:
    """Restrict ``op`` to its leading ``size`` rows and columns.

    Truncated ladder operators break the algebra only in the top number
    state, so identities are checked on the leading block.
    """
    return op[:size, :size]
