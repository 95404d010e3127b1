"""
Nonlinear relativistic Fermi condensate.

The pairing interaction is generated by the involution
``Nf = [[0, u], [u*, 0]]`` with ``u = Delta / |Delta|``, acting on the chiral
index. For a uniform gap one grid step is

    psi(t + tau, x) = sqrt(1 - |Delta|^2 tau^2) (S psi)(x) - i tau (Delta_offdiag (x) 1) psi(t, x)

which mirrors the free Dirac step with ``m -> |Delta|`` and ``beta -> Nf (x) 1``.
A site-dependent gap uses the collide-then-stream split ``S C(x)``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .algebra import SIGMA_0, SIGMA_Z, GridUnits, NumberOperatorKind, closed_form_exp, max_norm
from .dirac import DIRAC, ALPHA, ID4
from .errors import DomainError, GapOverflowError
from .lattice import pairwise_sum, stream_1d, validate_field

NJL_TOL = 1e-12

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    SIGMA_Z,
)


class PairingMode(enum.Enum):
    UNIFORM = "uniform"
    LOCAL = "local"
    GLOBAL_MEAN = "global_mean"


@dataclass(frozen=True)
class NonlinearAlgebra:
    sigma: tuple[np.ndarray, np.ndarray, np.ndarray]
    gamma: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    @property
    def n_prime(self) -> np.ndarray:
        return self.sigma[0]


def nonlinear_algebra(delta: complex) -> NonlinearAlgebra:
    """Phase-dressed SU(2) generators and the matching gamma matrices.

    ``Sigma_x`` is the pairing involution, ``Sigma_y = [[0, -i u], [i u*, 0]]``,
    ``Sigma_z = sigma_z``; ``Gamma^0 = Sigma_x (x) 1`` and
    ``Gamma^i = i Sigma_y (x) sigma_i``.
    """
    if delta == 0:
        raise DomainError("pairing phase undefined for delta = 0")
    # via the argument: delta / |delta| is off the unit circle for subnormal delta
    u = cmath.rect(1.0, cmath.phase(complex(delta)))
    sx = np.array([[0, u], [u.conjugate(), 0]], dtype=complex)
    sy = np.array([[0, -1j * u], [1j * u.conjugate(), 0]], dtype=complex)
    sz = SIGMA_Z.copy()
    g0 = np.kron(sx, SIGMA_0)
    gs = tuple(1j * np.kron(sy, s) for s in _PAULI)
    return NonlinearAlgebra(sigma=(sx, sy, sz), gamma=(g0, *gs))


def su2_closure_residual(alg: NonlinearAlgebra) -> float:
    s = alg.sigma
    worst = max(max_norm(si @ si - SIGMA_0) for si in s)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        worst = max(worst, max_norm(s[i] @ s[j] - s[j] @ s[i] - 2j * s[k]))
    return worst


def gamma_reduction_residual(alg: NonlinearAlgebra) -> float:
    g = DIRAC.gamma
    return max(max_norm(alg.gamma[0] @ alg.gamma[mu] - g[0] @ g[mu]) for mu in range(4))


# ---------------------------------------------------------------------------
# Interaction densities
# ---------------------------------------------------------------------------


def _lr_bilinears(psi):
    """``psi_L^dag psi_R`` per spin, as ``(up, dn)`` arrays over the leading axes."""
    psi = np.asarray(psi, dtype=complex)
    return np.conj(psi[..., 0]) * psi[..., 2], np.conj(psi[..., 1]) * psi[..., 3]


def nl_interaction_density(psi, delta) -> np.ndarray | float:
    """``Delta psi*_L psi_R + Delta* psi*_R psi_L`` summed over spin.

    Accepts one spinor or a stack with the spin components last; ``delta``
    broadcasts against the leading axes.
    """
    up, dn = _lr_bilinears(psi)
    delta = np.asarray(delta, dtype=complex)
    val = delta * up + delta * dn + np.conj(delta) * np.conj(up) + np.conj(delta) * np.conj(dn)
    scale = 1.0 + np.abs(delta) * (np.abs(up) + np.abs(dn))
    if np.any(np.abs(val.imag) > 1e-14 * scale):
        raise ArithmeticError("interaction density has a non-negligible imaginary part")
    out = val.real
    return float(out) if out.ndim == 0 else out


def njl_forms(psi, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the NJL identity, evaluated independently.

    Returns ``lam/4 [(psibar psi)^2 - (psibar g5 psi)^2]`` from the chiral gamma
    matrices and ``lam (psi_L^dag psi_R)(psi_R^dag psi_L)`` from the components.
    """
    psi = np.asarray(psi, dtype=complex)
    g0, g5 = DIRAC.gamma[0], DIRAC.gamma5
    psibar = np.conj(psi) @ g0
    scalar = np.sum(psibar * psi, axis=-1)
    pseudo = np.sum(psibar * (psi @ g5.T), axis=-1)
    lhs = (lam / 4) * (scalar**2 - pseudo**2)
    l_r = np.sum(np.conj(psi[..., :2]) * psi[..., 2:], axis=-1)
    r_l = np.sum(np.conj(psi[..., 2:]) * psi[..., :2], axis=-1)
    rhs = lam * l_r * r_l
    return lhs, rhs


def njl_interaction_density(psi, lam: float) -> np.ndarray | float:
    """NJL four-fermion density; raises if the two equivalent forms disagree."""
    lhs, rhs = njl_forms(psi, lam)
    scale = 1.0 + np.abs(rhs)
    gap = np.abs(lhs - rhs)
    if np.any(gap > NJL_TOL * scale):
        raise ArithmeticError(f"NJL identity violated by {float(np.max(gap)):.3g}: gamma convention bug")
    out = rhs.real
    return float(out) if np.ndim(out) == 0 else out


def partially_contracted_density(psi: np.ndarray, lam: float) -> np.ndarray:
    """Mean-field NJL density with the lattice average standing in for ``<.>``."""
    psi = validate_field(psi)
    l_up, l_dn = _lr_bilinears(psi)
    r_up, r_dn = np.conj(l_up), np.conj(l_dn)
    n = psi.shape[0]
    m_l_up = pairwise_sum(l_up) / n
    m_l_dn = pairwise_sum(l_dn) / n
    m_r_up = pairwise_sum(r_up) / n
    m_r_dn = pairwise_sum(r_dn) / n
    val = lam * (l_up * m_r_up + m_l_up * r_dn + m_l_dn * r_up + l_dn * m_r_dn)
    return val.real


# ---------------------------------------------------------------------------
# Gap update and stepping
# ---------------------------------------------------------------------------


@dataclass
class PairingParams:
    lam: float = 0.0
    delta: complex | np.ndarray = 0.0
    mode: PairingMode = PairingMode.GLOBAL_MEAN
    tau: float = 1.0

    def __post_init__(self):
        self.mode = PairingMode(self.mode)
        if self.tau <= 0:
            raise DomainError("tau must be positive")


@dataclass
class GapUpdate:
    delta: complex | np.ndarray
    polarization: float


def _check_gap(delta, tau: float) -> None:
    mag = np.abs(np.asarray(delta)) * tau
    if mag.ndim == 0:
        if mag > 1.0:
            raise GapOverflowError(-1, float(mag))
        return
    over = np.flatnonzero(mag > 1.0)
    if over.size:
        raise GapOverflowError(int(over[0]), float(mag[over[0]]))


def pairing_update(psi: np.ndarray, p: PairingParams) -> GapUpdate:
    """Gap from the spin-averaged bilinear ``psi*_R psi_L``.

    ``local`` gives one value per site, ``global_mean`` the lattice average
    (a scalar), ``uniform`` returns the stored gap unchanged. The polarization
    diagnostic is the largest ``|up - down|`` difference of the two spin
    estimates entering the gap.
    """
    psi = validate_field(psi)
    if p.mode is PairingMode.UNIFORM:
        _check_gap(p.delta, p.tau)
        return GapUpdate(p.delta, 0.0)
    up = np.conj(psi[:, 2]) * psi[:, 0]
    dn = np.conj(psi[:, 3]) * psi[:, 1]
    if p.mode is PairingMode.LOCAL:
        delta = p.lam * 0.5 * (up + dn)
        pol = float(np.max(np.abs(up - dn))) if up.size else 0.0
    else:
        n = psi.shape[0]
        m_up = pairwise_sum(up) / n
        m_dn = pairwise_sum(dn) / n
        delta = complex(p.lam * 0.5 * (m_up + m_dn))
        pol = float(abs(m_up - m_dn))
    _check_gap(delta, p.tau)
    return GapUpdate(delta, pol)


def _pairing_apply(psi: np.ndarray, delta) -> np.ndarray:
    """``(Delta_offdiag (x) 1) psi``: ``L -> Delta R`` and ``R -> Delta* L``."""
    d = np.asarray(delta, dtype=complex)
    if d.ndim:
        d = d[:, None]
    out = np.empty_like(psi)
    out[:, :2] = d * psi[:, 2:]
    out[:, 2:] = np.conj(d) * psi[:, :2]
    return out


def apply_superfluid_step(psi: np.ndarray, delta, tau: float = 1.0) -> np.ndarray:
    """One step at a given gap: collapsed form for a scalar gap, split form for a field."""
    psi = validate_field(psi)
    _check_gap(delta, tau)
    d = np.asarray(delta, dtype=complex)
    if d.ndim == 0:
        c = math.sqrt(1.0 - (abs(complex(d)) * tau) ** 2)
        return c * stream_1d(psi) - 1j * tau * _pairing_apply(psi, d)
    if d.shape != (psi.shape[0],):
        raise ValueError(f"gap field has shape {d.shape}, lattice has {psi.shape[0]} sites")
    c = np.sqrt(1.0 - (np.abs(d) * tau) ** 2)[:, None]
    collided = c * psi - 1j * tau * _pairing_apply(psi, d)
    return stream_1d(collided)


def step_superfluid(psi: np.ndarray, p: PairingParams) -> np.ndarray:
    """Update the gap from ``psi(t)`` (unless uniform) and advance one step."""
    gap = pairing_update(psi, p)
    return apply_superfluid_step(psi, gap.delta, p.tau)


def superfluid_step_matrix(k_ell: float, delta: complex, tau: float = 1.0) -> np.ndarray:
    """Momentum-space step of the collapsed form at uniform gap."""
    _check_gap(delta, tau)
    c = math.sqrt(1.0 - (abs(delta) * tau) ** 2)
    off = np.array([[0, delta], [np.conj(delta), 0]], dtype=complex)
    stream = math.cos(k_ell) * ID4 + 1j * math.sin(k_ell) * ALPHA[2]
    return c * stream - 1j * tau * np.kron(off, SIGMA_0)


def split_step_matrix(k_ell: float, delta: complex, tau: float = 1.0) -> np.ndarray:
    """Momentum-space ``S C`` with ``C = exp(-i theta Nf (x) 1)`` from the closed form."""
    _check_gap(delta, tau)
    stream = math.cos(k_ell) * ID4 + 1j * math.sin(k_ell) * ALPHA[2]
    if delta == 0:
        return stream
    gen = np.kron(nonlinear_algebra(delta).n_prime, SIGMA_0)
    theta = math.asin(abs(delta) * tau)
    return stream @ closed_form_exp(gen, theta, kind=NumberOperatorKind.INVOLUTION_REGULAR)


def superfluid_hamiltonian_step(k_ell: float, delta: complex, tau: float = 1.0) -> np.ndarray:
    """``sqrt(1 - (E tau)^2) - i tau h_NL`` with the lattice effective momentum.

    ``tau h_NL = -c sin(k) alpha_3 + tau Delta_offdiag (x) 1`` and
    ``E tau = sqrt(p_eff^2 + |Delta|^2 tau^2)``. The square root takes the sign
    of ``cos k`` so that the form holds on the whole Brillouin zone.
    """
    _check_gap(delta, tau)
    c = math.sqrt(1.0 - (abs(delta) * tau) ** 2)
    p_eff = c * math.sin(k_ell)
    e_tau = math.hypot(p_eff, abs(delta) * tau)
    off = np.array([[0, delta], [np.conj(delta), 0]], dtype=complex)
    h_tau = -p_eff * ALPHA[2] + tau * np.kron(off, SIGMA_0)
    root = math.copysign(math.sqrt(max(0.0, 1.0 - e_tau * e_tau)), math.cos(k_ell))
    return root * ID4 - 1j * h_tau


def effective_mass(delta: complex, grid: GridUnits | None = None) -> float:
    """``|Delta| / c^2``."""
    grid = grid or GridUnits()
    return abs(delta) / grid.c**2


def uniform_condensate(sites: int, spinor=None) -> np.ndarray:
    """Spatially uniform field with equal left and right chiral weight.

    Equal chiral weight makes the uniform state a fixed point of the gap
    modulus under the update-then-step loop; equal spin components keep it
    unpolarized.
    """
    if spinor is None:
        spinor = np.array([1.0, 1.0, 1j, 1j])
    spinor = np.asarray(spinor, dtype=complex)
    spinor = spinor / np.linalg.norm(spinor)
    return np.tile(spinor, (sites, 1)) / math.sqrt(sites)
