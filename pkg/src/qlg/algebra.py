"""
Dense complex matrix kernel for the lattice-gas operators.

Holds the Pauli/Dirac constructors, the number-operator classifier, the
closed-form exponentials of involution / idempotent / tri-idempotent
generators, a scaling-and-squaring matrix exponential used as an
independent oracle, and the Lie-Trotter baseline.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

TOL_ALG = 1e-10
TOL_EXACT = 1e-12

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def max_norm(a) -> float:
    """Largest absolute entry; the residual norm used throughout."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, tol: float = TOL_ALG) -> bool:
    return max_norm(a - dagger(a)) <= tol


def is_unitary(u: np.ndarray, tol: float = TOL_ALG) -> bool:
    return max_norm(dagger(u) @ u - np.eye(u.shape[0])) <= tol


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


@dataclass(frozen=True)
class GridUnits:
    """Grid length, grid time, action scale and (optional) mass unit.

    Natural units are the default: ``hbar = 1`` and ``c = ell / tau = 1``.
    """

    ell: float = 1.0
    tau: float = 1.0
    hbar: float = 1.0
    m0: float | None = None

    def __post_init__(self):
        if self.ell <= 0 or self.tau <= 0 or self.hbar <= 0:
            raise DomainError("grid units must be positive")
        if self.m0 is not None:
            expected = self.m0 * self.ell**2 / (2 * math.pi * self.tau)
            if not math.isclose(self.hbar, expected, rel_tol=1e-12):
                raise DomainError(
                    f"hbar={self.hbar} inconsistent with m0*ell^2/(2 pi tau)={expected}"
                )

    @classmethod
    def from_mass_unit(cls, m0: float, ell: float = 1.0, tau: float = 1.0) -> "GridUnits":
        return cls(ell=ell, tau=tau, hbar=m0 * ell**2 / (2 * math.pi * tau), m0=m0)

    @property
    def c(self) -> float:
        return self.ell / self.tau

    def gate_angle_argument(self, energy: float) -> float:
        """Dimensionless ``E tau / hbar``."""
        return energy * self.tau / self.hbar


# ---------------------------------------------------------------------------
# Dirac matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiracMatrices:
    sigma: tuple[np.ndarray, np.ndarray, np.ndarray]
    alpha: tuple[np.ndarray, np.ndarray, np.ndarray]
    beta: np.ndarray
    gamma: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    gamma5: np.ndarray

    @property
    def sigma_x(self):
        return self.sigma[0]

    @property
    def sigma_y(self):
        return self.sigma[1]

    @property
    def sigma_z(self):
        return self.sigma[2]


def pauli_and_dirac_matrices(representation: str = "chiral") -> DiracMatrices:
    """Pauli and Dirac matrices in the chiral representation.

    Spinor ordering is ``(L_up, L_dn, R_up, R_dn)``. ``gamma^0 = sigma_x (x) 1``
    and ``gamma^i = i sigma_y (x) sigma_i``. The velocity matrices are taken as
    ``alpha_i = sigma_z (x) sigma_i``, which is block diagonal so that
    ``alpha_3`` streams each component in a single direction. (With these
    gammas the product ``gamma^0 gamma^i`` equals ``-alpha_i``; both signs
    satisfy the same Clifford relations with ``beta``.)
    """
    if representation != "chiral":
        raise ValueError(f"unknown representation {representation!r}; only 'chiral' is supported")
    sig = (SIGMA_X, SIGMA_Y, SIGMA_Z)
    g0 = np.kron(SIGMA_X, SIGMA_0)
    gs = tuple(1j * np.kron(SIGMA_Y, s) for s in sig)
    alpha = tuple(np.kron(SIGMA_Z, s) for s in sig)
    g5 = 1j * g0 @ gs[0] @ gs[1] @ gs[2]
    return DiracMatrices(
        sigma=tuple(s.copy() for s in sig),
        alpha=alpha,
        beta=g0.copy(),
        gamma=(g0, *gs),
        gamma5=g5,
    )


# ---------------------------------------------------------------------------
# Number operators
# ---------------------------------------------------------------------------


class NumberOperatorKind(enum.Enum):
    INVOLUTION_REGULAR = "InvolutionRegular"
    INVOLUTION_SKEW = "InvolutionSkew"
    IDEMPOTENT_REGULAR = "IdempotentRegular"
    IDEMPOTENT_SKEW = "IdempotentSkew"
    TRI_IDEMPOTENT_REGULAR = "TriIdempotentRegular"
    TRI_IDEMPOTENT_SKEW = "TriIdempotentSkew"
    UNCLASSIFIED = "Unclassified"

    @property
    def is_regular(self) -> bool:
        return self in (
            NumberOperatorKind.INVOLUTION_REGULAR,
            NumberOperatorKind.IDEMPOTENT_REGULAR,
            NumberOperatorKind.TRI_IDEMPOTENT_REGULAR,
        )


@dataclass(frozen=True)
class NumberOperatorClass:
    kind: NumberOperatorKind
    residuals: dict[str, float] = field(default_factory=dict)


# Precedence fixes ties such as N = 1 (both N^2 = 1 and N^2 = N).
_PRECEDENCE = (
    ("N^2-1", NumberOperatorKind.INVOLUTION_REGULAR),
    ("N^2+1", NumberOperatorKind.INVOLUTION_SKEW),
    ("N^2-N", NumberOperatorKind.IDEMPOTENT_REGULAR),
    ("N^2+N", NumberOperatorKind.IDEMPOTENT_SKEW),
    ("N^3-N", NumberOperatorKind.TRI_IDEMPOTENT_REGULAR),
    ("N^3+N", NumberOperatorKind.TRI_IDEMPOTENT_SKEW),
)


def classify_number_operator(n: np.ndarray, tol: float = TOL_ALG) -> NumberOperatorClass:
    """Classify a candidate generator as involution, idempotent or tri-idempotent.

    Parameters
    ----------
    n : ndarray
        Square complex matrix.
    tol : float
        Max-entry tolerance applied to every identity.

    Returns
    -------
    NumberOperatorClass
        The first matching kind in the order involution > idempotent >
        tri-idempotent (regular before skew), with every residual. Non-hermitian
        input is reported as ``Unclassified``.
    """
    n = np.asarray(n, dtype=complex)
    if n.ndim != 2 or n.shape[0] != n.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {n.shape}")
    one = np.eye(n.shape[0])
    n2 = n @ n
    n3 = n2 @ n
    residuals = {
        "hermiticity": max_norm(n - dagger(n)),
        "N^2-1": max_norm(n2 - one),
        "N^2+1": max_norm(n2 + one),
        "N^2-N": max_norm(n2 - n),
        "N^2+N": max_norm(n2 + n),
        "N^3-N": max_norm(n3 - n),
        "N^3+N": max_norm(n3 + n),
    }
    if residuals["hermiticity"] > tol:
        return NumberOperatorClass(NumberOperatorKind.UNCLASSIFIED, residuals)
    for key, kind in _PRECEDENCE:
        if residuals[key] <= tol:
            return NumberOperatorClass(kind, residuals)
    return NumberOperatorClass(NumberOperatorKind.UNCLASSIFIED, residuals)


def epsilon(x: float) -> float:
    """``sqrt(1 - x^2) - 1``, defined on ``|x| <= 1``."""
    if not abs(x) <= 1.0:
        raise DomainError(f"epsilon: |x| = {abs(x)!r} exceeds 1 (gate angle bound)")
    return math.sqrt(1.0 - x * x) - 1.0


def gate_angle(x: float) -> float:
    """Rotation angle ``arccos sqrt(1 - x^2)`` for ``0 <= x <= 1``.

    Evaluated as ``atan2(x, sqrt(1 - x^2))``; the arccos form loses about half
    the digits for small ``x``.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"gate angle argument {x!r} outside [0, 1]")
    return math.atan2(x, math.sqrt(1.0 - x * x))


def closed_form_exp(
    n: np.ndarray,
    theta: float,
    kind: NumberOperatorKind | None = None,
    tol: float = TOL_ALG,
) -> np.ndarray:
    """``exp(-i theta N)`` for a regular involution, idempotent or tri-idempotent N.

    No series or limit is taken; the result is a linear combination of
    ``1``, ``N`` and ``N^2``. Pass ``kind`` to skip classification.
    """
    n = np.asarray(n, dtype=complex)
    if kind is None:
        kind = classify_number_operator(n, tol).kind
    one = np.eye(n.shape[0], dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    if kind is NumberOperatorKind.INVOLUTION_REGULAR:
        return c * one - 1j * s * n
    if kind is NumberOperatorKind.IDEMPOTENT_REGULAR:
        return one + (c - 1.0) * n - 1j * s * n
    if kind is NumberOperatorKind.TRI_IDEMPOTENT_REGULAR:
        return one + (c - 1.0) * (n @ n) - 1j * s * n
    raise ValueError(f"closed_form_exp needs a regular number operator, got {kind.value}")


def unit_gate(n: np.ndarray, x: float, kind: NumberOperatorKind | None = None) -> np.ndarray:
    """Building-block unitary ``1 + eps(x) P - i x N`` with ``x = E tau / hbar``.

    ``P`` is ``1``, ``N`` or ``N^2`` for involution, idempotent and
    tri-idempotent N respectively; equals ``closed_form_exp(N, gate_angle(x))``.
    """
    n = np.asarray(n, dtype=complex)
    if kind is None:
        kind = classify_number_operator(n).kind
    one = np.eye(n.shape[0], dtype=complex)
    eps = epsilon(x)
    if kind is NumberOperatorKind.INVOLUTION_REGULAR:
        p = one
    elif kind is NumberOperatorKind.IDEMPOTENT_REGULAR:
        p = n
    elif kind is NumberOperatorKind.TRI_IDEMPOTENT_REGULAR:
        p = n @ n
    else:
        raise ValueError(f"unit_gate needs a regular number operator, got {kind.value}")
    gate_angle(x)
    return one + eps * p - 1j * x * n


# ---------------------------------------------------------------------------
# Oracle and Trotter baseline
# ---------------------------------------------------------------------------

_TAYLOR_ORDER = 18
_SCALE_TARGET = 0.5


def expm_oracle(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a degree-18 Taylor polynomial.

    The matrix is halved until its 1-norm is at most 0.5, the polynomial is
    evaluated by Horner's rule, and the result squared back.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("expm_oracle: non-finite entries")
    dim = m.shape[0]
    norm1 = float(np.max(np.sum(np.abs(m), axis=0))) if dim else 0.0
    s = 0
    if norm1 > _SCALE_TARGET:
        s = int(math.ceil(math.log2(norm1 / _SCALE_TARGET)))
    x = m / (2.0**s)
    one = np.eye(dim, dtype=complex)
    out = one / math.factorial(_TAYLOR_ORDER)
    for k in range(_TAYLOR_ORDER - 1, -1, -1):
        out = x @ out + one / math.factorial(k)
    for _ in range(s):
        out = out @ out
    return out


def trotter_product(h0: np.ndarray, h1: np.ndarray, t: float, n: int) -> np.ndarray:
    """Lie-Trotter approximation ``(exp(-i t h0/n) exp(-i t h1/n))^n``."""
    if int(n) != n or n < 1:
        raise ValueError(f"trotter_product: n must be a positive integer, got {n!r}")
    n = int(n)
    step = expm_oracle(-1j * t * np.asarray(h0) / n) @ expm_oracle(-1j * t * np.asarray(h1) / n)
    return np.linalg.matrix_power(step, n)
