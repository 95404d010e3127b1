"""
Invariant suites run by the ``verify`` experiment.

Each suite draws from its own seeded stream and returns a list of
:class:`Check` records carrying the measured residual and the tolerance it
was tested against.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import algebra, dirac, fock, lattice, sampling, superfluid
from .algebra import NumberOperatorKind, max_norm

REGULAR_KINDS = (
    NumberOperatorKind.INVOLUTION_REGULAR,
    NumberOperatorKind.IDEMPOTENT_REGULAR,
    NumberOperatorKind.TRI_IDEMPOTENT_REGULAR,
)


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    comparator: str = "<="
    detail: str = ""

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.residual):
            return False
        if self.comparator == "<=":
            return self.residual <= self.tolerance
        if self.comparator == ">":
            return self.residual > self.tolerance
        raise ValueError(f"unknown comparator {self.comparator!r}")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "comparator": self.comparator,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def algebra_suite(rng: np.random.Generator, draws: int = 1000) -> list[Check]:
    dm = algebra.pauli_and_dirac_matrices("chiral")
    cliff = 0.0
    for i in range(3):
        for j in range(3):
            cliff = max(cliff, max_norm(algebra.anticommutator(dm.alpha[i], dm.alpha[j]) - 2 * (i == j) * np.eye(4)))
        cliff = max(cliff, max_norm(algebra.anticommutator(dm.alpha[i], dm.beta)))
    out = [Check("algebra.clifford", cliff, algebra.TOL_EXACT)]

    worst_oracle = worst_unitary = 0.0
    misclassified = 0
    for kind in REGULAR_KINDS:
        for _ in range(draws):
            dim = int(rng.integers(3, 9))
            n = sampling.random_number_operator(kind, dim, rng)
            if algebra.classify_number_operator(n).kind is not kind:
                misclassified += 1
            theta = rng.uniform(0.0, math.pi)
            u = algebra.closed_form_exp(n, theta, kind=kind)
            worst_oracle = max(worst_oracle, max_norm(u - algebra.expm_oracle(-1j * theta * n)))
            worst_unitary = max(worst_unitary, max_norm(u.conj().T @ u - np.eye(dim)))
    out.append(Check("algebra.closed_form_vs_oracle", worst_oracle, algebra.TOL_EXACT, detail=f"{draws} per class"))
    out.append(Check("algebra.closed_form_unitarity", worst_unitary, algebra.TOL_EXACT))
    out.append(Check("algebra.classification_soundness", float(misclassified), 0.0, detail="misclassified count"))
    return out


def dirac_suite(rng: np.random.Generator, sites: int = 64, long_steps: int = 10_000, long_sites: int = 256) -> list[Check]:
    consistency = disp = 0.0
    for m_tau in (0.0, 0.1, 0.5, 0.9):
        for j in range(sites):
            k = lattice.lattice_k(sites, j)
            lam, vecs = np.linalg.eig(dirac.dirac_step_matrix(k, m_tau))
            for b in range(4):
                psi = lattice.plane_wave_field(sites, j, vecs[:, b] / np.linalg.norm(vecs[:, b]))
                consistency = max(consistency, max_norm(dirac.step_dirac(psi, m_tau) - lam[b] * psi))
            disp = max(disp, dirac.dispersion_residual(dirac.step_eigenphases(dirac.dirac_step_matrix(k, m_tau)), k, m_tau))
    cont = 0.0
    for m_tau in np.linspace(0.0, 0.05, 6):
        for k in np.linspace(-0.05, 0.05, 11):
            om = dirac.step_eigenphases(dirac.dirac_step_matrix(k, m_tau))
            cont = max(cont, float(np.max(np.abs(np.abs(om) - dirac.continuum_energy(k, m_tau)))))
    rows = dirac.trotter_comparison(0.5, 0.5)
    errs = [r.trotter_error for r in rows]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    psi = lattice.random_field(long_sites, rng)
    drift = 0.0
    for _ in range(long_steps):
        psi = dirac.step_dirac(psi, 0.3)
    drift = abs(lattice.field_norm2(psi) - 1.0)
    return [
        Check("dirac.position_momentum_consistency", consistency, algebra.TOL_EXACT),
        Check("dirac.lattice_dispersion", disp, algebra.TOL_EXACT),
        Check("dirac.continuum_limit", cont, 1e-4),
        Check("dirac.trotter_monotone", 0.0 if decreasing else 1.0, 0.0, detail="1 if not strictly decreasing"),
        Check("dirac.trotter_error_n256", errs[-1], 1e-6, comparator=">"),
        Check("dirac.product_vs_oracle", rows[0].product_error, algebra.TOL_EXACT),
        Check("dirac.unitarity", drift, 1e-10, detail=f"{long_steps} steps on {long_sites} sites"),
    ]


def bcs_suite(rng: np.random.Generator, draws: int = 100, max_qubits: int = 6) -> list[Check]:
    anti = max(fock.anticommutator_residual(q) for q in range(1, max_qubits + 1))
    tri = idem_gap = gate = low_e = 0.0
    idem_gap = math.inf
    q = 4
    for _ in range(draws):
        delta = sampling.random_gap(rng, 0.2, 1.0)
        eps = rng.uniform(-1.0, 1.0)
        tau = rng.uniform(0.05, 1.0) / math.hypot(eps, abs(delta))
        p = fock.BcsParams(eps, delta, tau=tau, sign=str(rng.choice(["plus", "minus"])))
        n = fock.bcs_number_operator(q, 1, 3, p)
        tri = max(tri, max_norm(n @ n @ n - n))
        idem_gap = min(idem_gap, max_norm(n @ n - n))
        u = fock.bcs_gate(n, p.E_tau)
        gate = max(gate, max_norm(u - algebra.expm_oracle(-1j * algebra.gate_angle(p.E_tau) * n)))
        small = p.E_tau * 0.1
        ul = fock.bcs_gate(n, small)
        low_e = max(low_e, max_norm(ul - (np.eye(1 << q) - 1j * small * n)) - small**2)
    p12 = fock.BcsParams(0.3, 0.4j, tau=1.5)
    p34 = fock.BcsParams(-0.2, 0.5, tau=1.5)
    n12 = fock.bcs_number_operator(4, 1, 2, p12)
    n34 = fock.bcs_number_operator(4, 3, 4, p34)
    th = algebra.gate_angle(p12.E_tau), algebra.gate_angle(p34.E_tau)
    disjoint = max_norm(
        fock.bcs_gate(n12, p12.E_tau) @ fock.bcs_gate(n34, p34.E_tau)
        - algebra.expm_oracle(-1j * (th[0] * n12 + th[1] * n34))
    )
    return [
        Check("bcs.anticommutators", anti, algebra.TOL_EXACT, detail=f"Q <= {max_qubits}"),
        Check("bcs.tri_idempotency", tri, algebra.TOL_EXACT),
        Check("bcs.not_idempotent", idem_gap, 0.1, comparator=">", detail="min over draws of |N^2 - N|"),
        Check("bcs.gate_vs_oracle", gate, algebra.TOL_EXACT),
        Check("bcs.disjoint_pairs", disjoint, algebra.TOL_EXACT),
        Check("bcs.low_energy_remainder", max(low_e, 0.0), 0.0, detail="excess over (E tau)^2"),
    ]


def bdg_suite(rng: np.random.Generator, draws: int = 100, steps: int = 1000) -> list[Check]:
    ident = invol = 0.0
    for _ in range(draws):
        eps = rng.uniform(-2.0, 2.0)
        delta = sampling.random_gap(rng, 0.0, 2.0)
        ident = max(ident, max_norm(fock.bdg_from_number_operators(eps, delta) - fock.bdg_hamiltonian(eps, delta)))
        e = math.hypot(eps, abs(delta))
        h = fock.bdg_hamiltonian(eps, delta) / e
        support = np.diag([1.0, 0.0, 0.0, 1.0])
        invol = max(invol, max_norm(h @ h - support))
    eps, delta = 0.3, 0.5 * np.exp(0.4j)
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi /= np.linalg.norm(psi)
    per_step = 0.0
    norm = 1.0
    for _ in range(steps):
        psi = fock.step_bdg(psi, eps, delta, tau=1.0)
        new = float(np.vdot(psi, psi).real)
        per_step = max(per_step, abs(new - norm))
        norm = new
    return [
        Check("bdg.number_operator_identity", ident, algebra.TOL_EXACT),
        Check("bdg.involution_on_support", invol, algebra.TOL_EXACT),
        Check("bdg.norm_per_step", per_step, 1e-14),
    ]


def superfluid_suite(rng: np.random.Generator, draws: int = 10_000, sites: int = 256, steps: int = 1000) -> list[Check]:
    su2 = red = 0.0
    for phase in rng.uniform(-math.pi, math.pi, size=100):
        alg = superfluid.nonlinear_algebra(rng.uniform(0.1, 2.0) * np.exp(1j * phase))
        su2 = max(su2, superfluid.su2_closure_residual(alg))
        red = max(red, superfluid.gamma_reduction_residual(alg))
    spinors = sampling.random_spinors(draws, rng)
    lhs, rhs = superfluid.njl_forms(spinors, 1.0)
    njl = float(np.max(np.abs(lhs - rhs)))
    disp = 0.0
    for k in np.linspace(-math.pi, math.pi, 65)[1:]:
        d = sampling.random_gap(rng, 0.0, 1.0)
        a = dirac.step_eigenphases(superfluid.superfluid_step_matrix(k, d))
        b = dirac.step_eigenphases(dirac.dirac_step_matrix(k, abs(d)))
        disp = max(disp, float(np.max(np.abs(a - b))))

    psi = lattice.random_field(sites, rng)
    p = superfluid.PairingParams(lam=0.25 * sites, mode="local")
    for _ in range(steps):
        psi = superfluid.step_superfluid(psi, p)
    drift = abs(lattice.field_norm2(psi) - 1.0)

    psi = superfluid.uniform_condensate(sites)
    d0 = abs(superfluid.pairing_update(psi, p).delta[0])
    fixed = 0.0
    for _ in range(steps):
        gap = superfluid.pairing_update(psi, p)
        fixed = max(fixed, float(np.max(np.abs(np.abs(gap.delta) - d0))))
        psi = superfluid.apply_superfluid_step(psi, gap.delta, p.tau)
    return [
        Check("superfluid.su2_closure", su2, algebra.TOL_EXACT),
        Check("superfluid.gamma_reduction", red, algebra.TOL_EXACT),
        Check("superfluid.njl_identity", njl, algebra.TOL_EXACT, detail=f"{draws} spinors"),
        Check("superfluid.dispersion_equals_dirac", disp, algebra.TOL_EXACT),
        Check("superfluid.self_consistent_norm", drift, 1e-10, detail=f"{steps} steps on {sites} sites"),
        Check("superfluid.uniform_gap_fixed_point", fixed, 1e-10),
    ]


SUITES = (algebra_suite, dirac_suite, bcs_suite, bdg_suite, superfluid_suite)


def run_all(seed: int, threads: int = 1) -> list[Check]:
    """Every suite, each on its own spawned stream; order is fixed."""
    rngs = sampling.spawn_rngs(seed, len(SUITES))
    jobs = list(zip(SUITES, rngs))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: job[0](job[1]), jobs))
    else:
        results = [suite(rng) for suite, rng in jobs]
    return [c for suite_checks in results for c in suite_checks]
