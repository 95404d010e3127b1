"""Seeded random constructions shared by the verification suite and tests."""

from __future__ import annotations

import numpy as np

from .algebra import NumberOperatorKind

RNG_ALGORITHM = "numpy Philox4x64-10 via SeedSequence.spawn"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent streams whose draws do not depend on evaluation order."""
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from a phase-corrected QR factorization."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_spectrum(kind: NumberOperatorKind, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Eigenvalues that realise exactly ``kind`` (never a higher-precedence class)."""
    if kind is NumberOperatorKind.INVOLUTION_REGULAR:
        return rng.choice([-1.0, 1.0], size=dim)
    if kind is NumberOperatorKind.IDEMPOTENT_REGULAR:
        d = rng.choice([0.0, 1.0], size=dim)
        d[0] = 0.0
        return d
    if kind is NumberOperatorKind.TRI_IDEMPOTENT_REGULAR:
        # without all three eigenvalues the operator is an involution or idempotent
        if dim < 3:
            raise ValueError("a tri-idempotent operator needs dim >= 3")
        d = rng.choice([-1.0, 0.0, 1.0], size=dim)
        d[0], d[1], d[2] = -1.0, 0.0, 1.0
        return rng.permutation(d)
    raise ValueError(f"no spectrum recipe for {kind.value}")


def random_number_operator(kind: NumberOperatorKind, dim: int, rng: np.random.Generator) -> np.ndarray:
    v = random_unitary(dim, rng)
    d = random_spectrum(kind, dim, rng)
    n = (v * d) @ v.conj().T
    return 0.5 * (n + n.conj().T)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def random_spinors(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))


def random_gap(rng: np.random.Generator, low: float = 0.0, high: float = 1.0) -> complex:
    return rng.uniform(low, high) * np.exp(1j * rng.uniform(-np.pi, np.pi))
