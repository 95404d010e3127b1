"""
Fock-space BCS engine.

Qubit ``alpha`` (1-based) is the alpha-th tensor factor from the left, so it
sits at bit ``Q - alpha`` of a basis index. Bit value 1 means occupied.
Jordan-Wigner conventions: ``sigma_z|0> = +|0>``, ``n = (1 - sigma_z)/2`` and
the singleton annihilator is ``a = [[0, 1], [0, 0]]``. With these,
``a1^dag a2^dag |00> = +|11>``.

The BdG 4-spinor ``(psi_1, .., psi_4)`` is mapped onto the pair block as
``(|11>, |10>, |01>, |00>)``, i.e. component ``j`` is block index ``3 - j``
(see :data:`BDG_BLOCK_ORDER`). That is the ordering for which
``E (N+ - N-)`` reproduces the BdG matrix with ``+E_k`` on the doubly
occupied state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import SIGMA_Z, epsilon, gate_angle, max_norm
from .errors import DomainError

MAX_QUBITS = 12
DENSE_QUBITS = 6

A_SINGLE = np.array([[0, 1], [0, 0]], dtype=complex)
BDG_BLOCK_ORDER = (3, 2, 1, 0)


def _check_qubits(q: int) -> None:
    if not 1 <= q <= MAX_QUBITS:
        raise ValueError(f"qubit count {q} outside [1, {MAX_QUBITS}]")


@lru_cache(maxsize=None)
def _ladder(q: int, alpha: int) -> np.ndarray:
    op = np.eye(1, dtype=complex)
    for j in range(1, q + 1):
        if j < alpha:
            factor = SIGMA_Z
        elif j == alpha:
            factor = A_SINGLE
        else:
            factor = np.eye(2, dtype=complex)
        op = np.kron(op, factor)
    op.setflags(write=False)
    return op


def jordan_wigner_ops(q: int, alpha: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation operators of mode ``alpha`` on ``q`` qubits."""
    _check_qubits(q)
    if not 1 <= alpha <= q:
        raise ValueError(f"mode {alpha} outside [1, {q}]")
    a = _ladder(q, alpha).copy()
    return a, a.conj().T


def number_op(q: int, alpha: int) -> np.ndarray:
    a, ad = jordan_wigner_ops(q, alpha)
    return ad @ a


@dataclass(frozen=True)
class BcsParams:
    eps: float
    delta: complex
    tau: float = 1.0
    sign: str = "plus"

    def __post_init__(self):
        if self.sign not in ("plus", "minus"):
            raise ValueError(f"sign must be 'plus' or 'minus', got {self.sign!r}")
        if not self.E > 0:
            raise DomainError("E = sqrt(eps^2 + |delta|^2) must be positive")
        if self.tau <= 0:
            raise DomainError("tau must be positive")

    @property
    def E(self) -> float:
        return math.hypot(self.eps, abs(self.delta))

    @property
    def E_tau(self) -> float:
        return self.E * self.tau


def bcs_number_operator(q: int, alpha: int, beta: int, p: BcsParams) -> np.ndarray:
    """Joint pairing number operator ``N+`` or ``N-`` on modes ``alpha, beta``.

    N = 1/2 (1 +- eps/E) n_alpha + 1/2 (1 -+ eps/E) a_beta a_beta^dag
        +- (delta / 2E) a_alpha^dag a_beta^dag +- (delta^* / 2E) a_beta a_alpha

    This is the number operator of a Bogoliubov quasiparticle: its spectrum
    is ``{0, 0, 1, 1}`` on the pair block, so ``N^2 = N`` (and hence
    ``N^3 = N``) for every gap. The difference ``N+ - N-`` has spectrum
    ``{-1, 0, 0, 1}`` and is genuinely tri-idempotent.
    """
    if alpha == beta:
        raise ValueError("pair modes must differ")
    a_a, ad_a = jordan_wigner_ops(q, alpha)
    a_b, ad_b = jordan_wigner_ops(q, beta)
    s = 1.0 if p.sign == "plus" else -1.0
    r = p.eps / p.E
    # divide the parts separately: complex division by a subnormal E overflows
    delta = complex(p.delta)
    u = complex(delta.real / p.E, delta.imag / p.E)
    return (
        0.5 * (1 + s * r) * (ad_a @ a_a)
        + 0.5 * (1 - s * r) * (a_b @ ad_b)
        + 0.5 * s * u * (ad_a @ ad_b)
        + 0.5 * s * u.conjugate() * (a_b @ a_a)
    )


def bcs_gate(n: np.ndarray, e_tau: float) -> np.ndarray:
    """Entangling gate ``1 + eps(E tau) N^2 - i E tau N``; exact for idempotent or tri-idempotent N."""
    if not 0.0 <= e_tau <= 1.0:
        raise DomainError(f"E tau = {e_tau!r} outside [0, 1]")
    n = np.asarray(n, dtype=complex)
    return np.eye(n.shape[0]) + epsilon(e_tau) * (n @ n) - 1j * e_tau * n


def bcs_angle(e_tau: float) -> float:
    return gate_angle(e_tau)


def bdg_hamiltonian(eps: float, delta: complex) -> np.ndarray:
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = eps
    h[0, 3] = delta
    h[3, 0] = np.conj(delta)
    h[3, 3] = -eps
    return h


def bdg_from_number_operators(eps: float, delta: complex) -> np.ndarray:
    """``E (N+ - N-)`` on a two-qubit block, reordered into BdG spinor order."""
    plus = bcs_number_operator(2, 1, 2, BcsParams(eps, delta, sign="plus"))
    minus = bcs_number_operator(2, 1, 2, BcsParams(eps, delta, sign="minus"))
    e = math.hypot(eps, abs(delta))
    h = e * (plus - minus)
    idx = list(BDG_BLOCK_ORDER)
    return h[np.ix_(idx, idx)]


def step_bdg(psi4, eps: float, delta: complex, tau: float = 1.0) -> np.ndarray:
    """One grid step of the BdG spinor; exactly norm preserving.

    On the support of ``H_BdG`` (the ``|00>``/``|11>`` pair) this is
    ``sqrt(1 - (E tau)^2) psi - i tau H_BdG psi``. ``H_BdG / E`` squares to the
    projector onto that support, so the step is written as
    ``1 + eps(E tau) (H/E)^2 - i tau H``, which leaves the two unpaired
    components untouched.
    """
    e = math.hypot(eps, abs(delta))
    e_tau = e * tau
    if e_tau > 1.0:
        raise DomainError(f"E tau = {e_tau!r} exceeds 1")
    psi4 = np.asarray(psi4, dtype=complex)
    if e == 0.0:
        return psi4.copy()
    d = complex(delta)
    # unit-scale H/E keeps tiny E from underflowing in E^2
    hn = bdg_hamiltonian(eps / e, complex(d.real / e, d.imag / e))
    hp = hn @ psi4
    return psi4 + epsilon(e_tau) * (hn @ hp) - 1j * e_tau * hp


# ---------------------------------------------------------------------------
# State vectors
# ---------------------------------------------------------------------------


def vacuum(q: int) -> np.ndarray:
    _check_qubits(q)
    state = np.zeros(1 << q, dtype=complex)
    state[0] = 1.0
    return state


def basis_state(q: int, occupied) -> np.ndarray:
    """Basis vector with the listed (1-based) modes occupied."""
    _check_qubits(q)
    idx = 0
    for alpha in occupied:
        idx |= 1 << (q - alpha)
    state = np.zeros(1 << q, dtype=complex)
    state[idx] = 1.0
    return state


def _bits(q: int, qubit: int) -> np.ndarray:
    return (np.arange(1 << q) >> (q - qubit)) & 1


def _count_below(q: int, qubit: int, indices: np.ndarray) -> np.ndarray:
    """Number of occupied qubits strictly to the left of ``qubit``."""
    shift = q - qubit + 1
    return np.bitwise_count(np.asarray(indices, dtype=np.int64) >> shift).astype(np.int64)


def _block_unit(s_out: int, s_in: int, a: np.ndarray, ad: np.ndarray) -> np.ndarray:
    if (s_out, s_in) == (0, 0):
        return a @ ad
    if (s_out, s_in) == (1, 1):
        return ad @ a
    if (s_out, s_in) == (1, 0):
        return ad
    return a


def embed_pair_gate(q: int, gate: np.ndarray, alpha: int, beta: int) -> np.ndarray:
    """Dense ``2^q`` operator of a two-mode gate, built from ladder operators.

    ``gate`` is given on the ``q = 2`` block with mode ``alpha`` as the first
    qubit. Each matrix unit ``|s' ><s|`` is rewritten as a product of ladder
    operators (with the parity factor the two-qubit Jordan-Wigner string
    implies) and re-expressed on the full register.
    """
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (4, 4):
        raise ValueError(f"pair gate must be 4x4, got {gate.shape}")
    if alpha == beta:
        raise ValueError("pair modes must differ")
    a_a, ad_a = jordan_wigner_ops(q, alpha)
    a_b, ad_b = jordan_wigner_ops(q, beta)
    parity_a = np.eye(1 << q) - 2 * (ad_a @ a_a)
    out = np.zeros((1 << q, 1 << q), dtype=complex)
    for row in range(4):
        for col in range(4):
            g = gate[row, col]
            if g == 0:
                continue
            sa_out, sb_out = row >> 1, row & 1
            sa_in, sb_in = col >> 1, col & 1
            op_a = _block_unit(sa_out, sa_in, a_a, ad_a)
            op_b = _block_unit(sb_out, sb_in, a_b, ad_b)
            if sb_out != sb_in:
                op_a = op_a @ parity_a
            out += g * (op_a @ op_b)
    return out


def apply_pair_gate(state: np.ndarray, gate: np.ndarray, alpha: int, beta: int) -> np.ndarray:
    """Apply a two-mode gate to a Fock state with Jordan-Wigner consistent signs.

    Works on amplitudes directly; no ``2^q x 2^q`` matrix is formed. The gate
    convention matches :func:`embed_pair_gate`.
    """
    state = np.asarray(state, dtype=complex)
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (4, 4):
        raise ValueError(f"pair gate must be 4x4, got {gate.shape}")
    dim = state.shape[0]
    q = dim.bit_length() - 1
    if state.ndim != 1 or dim != 1 << q:
        raise ValueError(f"state length {dim} is not a power of two")
    _check_qubits(q)
    if alpha == beta or not (1 <= alpha <= q and 1 <= beta <= q):
        raise ValueError(f"invalid pair ({alpha}, {beta}) for {q} qubits")

    idx = np.arange(dim)
    bit_a, bit_b = 1 << (q - alpha), 1 << (q - beta)
    s_a = (idx & bit_a) != 0
    s_b = (idx & bit_b) != 0
    below_b = _count_below(q, beta, idx)
    out = np.zeros_like(state)
    for row in range(4):
        for col in range(4):
            g = gate[row, col]
            if g == 0:
                continue
            sa_out, sb_out = row >> 1, row & 1
            sa_in, sb_in = col >> 1, col & 1
            mask = (s_a == bool(sa_in)) & (s_b == bool(sb_in))
            src = idx[mask]
            flip_a, flip_b = sa_out != sa_in, sb_out != sb_in
            dst = src ^ (bit_a if flip_a else 0) ^ (bit_b if flip_b else 0)
            parity = np.zeros(src.shape, dtype=np.int64)
            if flip_b:
                # string of a_beta on the input, plus the block's own parity factor on alpha
                parity += below_b[mask] + sa_in
            if flip_a:
                # string of a_alpha, evaluated after beta has been flipped
                after_b = src ^ (bit_b if flip_b else 0)
                parity += _count_below(q, alpha, after_b)
            sign = 1 - 2 * (parity & 1)
            np.add.at(out, dst, g * sign * state[src])
    return out


def apply_pair_layer(state: np.ndarray, gate: np.ndarray, pairs) -> np.ndarray:
    for alpha, beta in pairs:
        state = apply_pair_gate(state, gate, alpha, beta)
    return state


def expectation(state: np.ndarray, op: np.ndarray) -> complex:
    return complex(np.vdot(state, op @ state))


def occupations(state: np.ndarray) -> np.ndarray:
    """``<n_alpha>`` for ``alpha = 1..q``."""
    q = state.shape[0].bit_length() - 1
    prob = np.abs(state) ** 2
    return np.array([float(np.sum(prob[_bits(q, a) == 1])) for a in range(1, q + 1)])


def anticommutator_residual(q: int) -> float:
    """Largest deviation from the canonical anticommutation relations on ``q`` modes."""
    worst = 0.0
    one = np.eye(1 << q)
    for i in range(1, q + 1):
        a_i, ad_i = jordan_wigner_ops(q, i)
        for j in range(1, q + 1):
            a_j, ad_j = jordan_wigner_ops(q, j)
            worst = max(
                worst,
                max_norm(a_i @ ad_j + ad_j @ a_i - (one if i == j else 0)),
                max_norm(a_i @ a_j + a_j @ a_i),
                max_norm(ad_i @ ad_j + ad_j @ ad_i),
            )
    return worst
