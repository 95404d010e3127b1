"""
Experiment drivers.

Each driver turns a :class:`~qlg.config.SimConfig` into a :class:`RunReport`
holding one table of per-step (or per-k) scalars, an optional final field,
and the checks that decide the exit code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, checks, dirac, fock, lattice, sampling, superfluid
from .algebra import TOL_EXACT
from .checks import Check
from .config import SimConfig
from .errors import DomainError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


@dataclass
class RunReport:
    experiment: str
    table_name: str | None = None
    columns: tuple[str, ...] = ()
    rows: list[tuple] = field(default_factory=list)
    snapshot: np.ndarray | None = None
    checks: list[Check] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.ok else EXIT_VERIFY

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "ok": self.ok,
            "errors": list(self.errors),
            "summary": self.summary,
            "checks": [c.as_dict() for c in self.checks],
            "metadata": self.metadata,
        }


def _initial_field(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.initial == "random":
        return lattice.random_field(cfg.sites, rng)
    if cfg.initial == "gaussian":
        return lattice.gaussian_packet(cfg.sites, cfg.width, lattice.lattice_k(cfg.sites, cfg.k_index))
    if cfg.initial == "plane":
        return lattice.plane_wave_field(cfg.sites, cfg.k_index, np.array([1, 0, 1, 0]) / math.sqrt(2))
    return superfluid.uniform_condensate(cfg.sites)


def _final(psi: np.ndarray, cfg: SimConfig):
    return psi if cfg.snapshot else None


def _dirac1d(cfg, report, threads):
    rng = sampling.make_rng(cfg.seed)
    psi = _initial_field(cfg, rng)
    report.table_name = "timeseries"
    report.columns = ("step", "norm", "norm_deviation", "energy")
    n0 = lattice.field_norm2(psi)
    worst = 0.0
    for step in range(cfg.steps + 1):
        norm = lattice.field_norm2(psi)
        dev = norm - n0
        worst = max(worst, abs(dev))
        nxt = dirac.step_dirac(psi, cfg.m_tau)
        energy = -lattice.inner(psi, nxt).imag / cfg.tau
        report.rows.append((step, norm, dev, energy))
        if step < cfg.steps:
            psi = nxt
    report.snapshot = _final(psi, cfg)
    energies = [r[3] for r in report.rows]
    report.summary = {
        "max_norm_deviation": worst,
        "energy_drift": max(energies) - min(energies),
    }
    report.checks.append(Check("dirac1d.norm_conservation", worst, 1e-10, detail=f"{cfg.steps} steps"))


def _dispersion(cfg, report, threads):
    n = cfg.k_points or cfg.sites
    ks = [lattice.lattice_k(n, j) for j in range(n)]
    ks.sort()
    records = dirac.measure_dispersion(cfg.m_tau, ks, threads=threads)
    report.table_name = "dispersion"
    report.columns = ("k_ell", "omega_tau_1", "omega_tau_2", "omega_tau_3", "omega_tau_4", "p_eff_ell", "residual")
    for r in records:
        report.rows.append((r.k_ell, *r.omega_tau_branches, r.p_eff_ell, r.residual))
        if r.error:
            report.errors.append(f"k_ell={r.k_ell!r}: {r.error}")
    finite = [r.residual for r in records if math.isfinite(r.residual)]
    worst = max(finite) if finite else math.nan
    report.summary = {"k_points": n, "max_residual": worst}
    report.checks.append(Check("dispersion.lattice_relation", worst, TOL_EXACT))


def _trotter(cfg, report, threads):
    m_tau = 0.5 if cfg.m_tau is None else cfg.m_tau
    steps = cfg.steps or 64
    rows = dirac.trotter_comparison(cfg.k_ell, m_tau, steps=steps)
    report.table_name = "trotter"
    report.columns = ("substeps", "trotter_error", "product_error")
    report.rows = [(r.substeps, r.trotter_error, r.product_error) for r in rows]
    errs = [r.trotter_error for r in rows]
    monotone = all(b < a for a, b in zip(errs, errs[1:]))
    report.summary = {"k_ell": cfg.k_ell, "m_tau": m_tau, "steps": steps}
    report.checks += [
        Check("trotter.strictly_decreasing", 0.0 if monotone else 1.0, 0.0, detail="1 if not strictly decreasing"),
        Check("trotter.product_vs_oracle", rows[0].product_error, TOL_EXACT),
    ]


def _bcs(cfg, report, threads):
    p = fock.BcsParams(cfg.eps, cfg.delta, tau=cfg.tau, sign=cfg.sign)
    n_block = fock.bcs_number_operator(2, 1, 2, p)
    gate = fock.bcs_gate(n_block, p.E_tau)
    state = fock.vacuum(cfg.qubits)
    report.table_name = "timeseries"
    report.columns = ("step", "norm", "mean_occupation", "energy")
    worst = 0.0
    for step in range(cfg.steps + 1):
        norm = float(np.vdot(state, state).real)
        worst = max(worst, abs(norm - 1.0))
        occ = fock.occupations(state)
        energy = sum(p.E * np.vdot(state, fock.apply_pair_gate(state, n_block, a, b)).real for a, b in cfg.pairs)
        report.rows.append((step, norm, float(np.mean(occ)), float(energy)))
        if step < cfg.steps:
            state = fock.apply_pair_layer(state, gate, cfg.pairs)
    report.summary = {"E": p.E, "E_tau": p.E_tau, "max_norm_deviation": worst}
    report.checks.append(Check("bcs.norm_conservation", worst, TOL_EXACT))


def _bdg(cfg, report, threads):
    e = math.hypot(cfg.eps, abs(cfg.delta))
    psi = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
    h = fock.bdg_hamiltonian(cfg.eps, cfg.delta)
    report.table_name = "timeseries"
    report.columns = ("step", "norm", "energy", "re_1", "im_1", "re_2", "im_2", "re_3", "im_3", "re_4", "im_4")
    per_step = 0.0
    prev = 1.0
    for step in range(cfg.steps + 1):
        norm = float(np.vdot(psi, psi).real)
        per_step = max(per_step, abs(norm - prev))
        prev = norm
        energy = float(np.vdot(psi, h @ psi).real)
        comps = [v for amp in psi for v in (amp.real, amp.imag)]
        report.rows.append((step, norm, energy, *comps))
        if step < cfg.steps:
            psi = fock.step_bdg(psi, cfg.eps, cfg.delta, cfg.tau)
    report.summary = {"E": e, "E_tau": e * cfg.tau, "max_norm_change_per_step": per_step}
    report.checks.append(Check("bdg.norm_per_step", per_step, 1e-14))


def _superfluid(cfg, report, threads):
    rng = sampling.make_rng(cfg.seed)
    psi = _initial_field(cfg, rng)
    mode = superfluid.PairingMode(cfg.pairing_mode)
    p = superfluid.PairingParams(lam=cfg.lam, delta=cfg.delta if cfg.delta is not None else 0.0, mode=mode, tau=cfg.tau)
    report.table_name = "timeseries"
    report.columns = ("step", "norm", "norm_deviation", "delta_mean_abs", "delta_max_abs", "polarization", "energy")
    n0 = lattice.field_norm2(psi)
    worst = 0.0
    for step in range(cfg.steps + 1):
        norm = lattice.field_norm2(psi)
        worst = max(worst, abs(norm - n0))
        try:
            gap = superfluid.pairing_update(psi, p)
        except DomainError as exc:
            report.errors.append(f"step {step}: {exc}")
            break
        mags = np.abs(np.broadcast_to(np.asarray(gap.delta), (psi.shape[0],)))
        nxt = superfluid.apply_superfluid_step(psi, gap.delta, p.tau)
        energy = -lattice.inner(psi, nxt).imag / p.tau
        report.rows.append(
            (step, norm, norm - n0, float(lattice.pairwise_sum(mags)) / mags.size, float(mags.max()), gap.polarization, energy)
        )
        if step < cfg.steps:
            psi = nxt
    report.snapshot = _final(psi, cfg)
    report.summary = {"pairing_mode": mode.value, "max_norm_deviation": worst}
    report.checks.append(Check("superfluid.norm_conservation", worst, 1e-10, detail=f"{cfg.steps} steps"))


def _verify(cfg, report, threads):
    # the pass/fail table lives in report.json
    report.checks = checks.run_all(cfg.seed, threads=threads)
    report.summary = {"total": len(report.checks), "failed": sum(not c.passed for c in report.checks)}


DRIVERS = {
    "dirac1d": _dirac1d,
    "dispersion": _dispersion,
    "trotter-compare": _trotter,
    "bcs": _bcs,
    "bdg": _bdg,
    "superfluid": _superfluid,
    "verify": _verify,
}


def run(cfg: SimConfig, threads: int = 1) -> RunReport:
    """Execute the configured experiment.

    Runtime domain failures (gap overflow, eigen-solver errors) land in
    ``report.errors`` and make the exit code 2.
    """
    report = RunReport(experiment=cfg.experiment)
    report.metadata = {
        "package": "qlg",
        "version": __version__,
        "rng": sampling.RNG_ALGORITHM,
        "seed": cfg.seed,
        # where the files land is not part of the result, so reruns into other directories stay byte-identical
        "config": {k: v for k, v in cfg.as_dict().items() if k != "output"},
    }
    try:
        DRIVERS[cfg.experiment](cfg, report, max(1, threads))
    except DomainError as exc:
        report.errors.append(str(exc))
    return report
