"""
Periodic 1D lattice of 4-component spinors.

A spinor field is a complex array of shape ``(sites, 4)`` with components
ordered ``(L_up, L_dn, R_up, R_dn)``. Boundaries are periodic.
"""

from __future__ import annotations

import numpy as np

COMPONENTS = ("L_up", "L_dn", "R_up", "R_dn")

# alpha_3 = sigma_z (x) sigma_z is diag(+1, -1, -1, +1)
STREAM_DIRECTION = np.array([1, -1, -1, 1])


def pairwise_sum(values) -> float | complex:
    """Fixed-order pairwise tree sum of a 1D array.

    The array is zero-padded to a power of two and folded in halves, so the
    addition order depends only on the length.
    """
    v = np.asarray(values).ravel()
    if v.size == 0:
        return v.dtype.type(0)
    size = 1 << (v.size - 1).bit_length()
    buf = np.zeros(size, dtype=v.dtype)
    buf[: v.size] = v
    while buf.size > 1:
        half = buf.size // 2
        buf = buf[:half] + buf[half:]
    return buf[0]


def validate_field(psi) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.ndim != 2 or psi.shape[1] != 4 or psi.shape[0] < 1:
        raise ValueError(f"spinor field must have shape (sites, 4), got {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise ValueError("spinor field has non-finite amplitudes")
    return psi.astype(complex, copy=False)


def density(psi: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(psi) ** 2, axis=1)


def field_norm2(psi: np.ndarray) -> float:
    """Global ``sum_x sum_s |psi_s(x)|^2`` via the deterministic tree sum."""
    return float(pairwise_sum(np.abs(np.asarray(psi)).ravel() ** 2))


def inner(phi: np.ndarray, psi: np.ndarray) -> complex:
    return complex(pairwise_sum((np.conj(phi) * psi).ravel()))


def normalize(psi: np.ndarray) -> np.ndarray:
    return psi / np.sqrt(field_norm2(psi))


def stream_1d(psi: np.ndarray) -> np.ndarray:
    """Shift components with ``alpha_3 = +1`` from ``x + 1`` and the others from ``x - 1``."""
    psi = validate_field(psi)
    out = np.empty_like(psi)
    for s, a in enumerate(STREAM_DIRECTION):
        out[:, s] = np.roll(psi[:, s], -a)
    return out


def plane_wave_field(sites: int, k_index: int, spinor) -> np.ndarray:
    """``spinor * exp(i k x) / sqrt(sites)`` with ``k = 2 pi k_index / sites``."""
    if not 0 <= k_index < sites:
        raise ValueError(f"k_index {k_index} outside [0, {sites})")
    spinor = np.asarray(spinor, dtype=complex)
    if spinor.shape != (4,):
        raise ValueError("spinor must have 4 components")
    k = 2 * np.pi * k_index / sites
    x = np.arange(sites)
    return np.exp(1j * k * x)[:, None] * spinor[None, :] / np.sqrt(sites)


def lattice_k(sites: int, k_index: int) -> float:
    """Wavenumber ``k ell`` of a lattice mode wrapped into ``(-pi, pi]``."""
    k = 2 * np.pi * k_index / sites
    if k > np.pi:
        k -= 2 * np.pi
    return k


def random_field(sites: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal((sites, 4)) + 1j * rng.standard_normal((sites, 4))
    return normalize(psi)


def gaussian_packet(sites: int, width: float, k_ell: float = 0.0, spinor=None) -> np.ndarray:
    """Normalized Gaussian envelope centred on the lattice with carrier ``k_ell``."""
    if spinor is None:
        spinor = np.array([1, 0, 1, 0]) / np.sqrt(2)
    x = np.arange(sites) - sites / 2
    env = np.exp(-(x**2) / (2 * width**2) + 1j * k_ell * x)
    return normalize(env[:, None] * np.asarray(spinor, dtype=complex)[None, :])
