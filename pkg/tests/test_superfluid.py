import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qlg import algebra, dirac, lattice, sampling, superfluid
from qlg.algebra import NumberOperatorKind as K
from qlg.errors import DomainError, GapOverflowError
from qlg.superfluid import PairingMode, PairingParams


def test_real_gap_reduces_to_chiral_representation():
    alg = superfluid.nonlinear_algebra(0.7)
    assert_allclose(alg.sigma[0], algebra.SIGMA_X, atol=0)
    assert_allclose(alg.sigma[1], algebra.SIGMA_Y, atol=0)
    for mu in range(4):
        assert_allclose(alg.gamma[mu], dirac.DIRAC.gamma[mu], atol=0)


@pytest.mark.parametrize("phase", [0.0, 0.4, -2.9, math.pi])
def test_su2_closure_with_phase(phase):
    alg = superfluid.nonlinear_algebra(1.3 * np.exp(1j * phase))
    sx, sy, sz = alg.sigma
    assert_allclose(sx @ sy, 1j * sz, atol=1e-15)
    assert superfluid.su2_closure_residual(alg) <= 1e-12
    assert superfluid.gamma_reduction_residual(alg) <= 1e-12


def test_pairing_involution_is_classified():
    alg = superfluid.nonlinear_algebra(0.2 - 0.5j)
    assert algebra.classify_number_operator(alg.n_prime).kind is K.INVOLUTION_REGULAR


def test_zero_gap_has_no_phase():
    with pytest.raises(DomainError):
        superfluid.nonlinear_algebra(0.0)


def test_interaction_density_examples():
    assert superfluid.nl_interaction_density([1, 0, 0, 0], 0.9) == 0.0
    psi = np.array([1, 0, 1, 0]) / math.sqrt(2)
    assert superfluid.nl_interaction_density(psi, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_interaction_density_global_phase_invariance():
    rng = sampling.make_rng(3)
    psi = sampling.random_spinors(50, rng)
    delta = sampling.random_gap(rng)
    a = superfluid.nl_interaction_density(psi, delta)
    b = superfluid.nl_interaction_density(np.exp(0.8j) * psi, delta)
    assert_allclose(a, b, atol=1e-14)


def test_njl_examples():
    psi = np.array([1, 0, 1, 0]) / math.sqrt(2)
    assert superfluid.njl_interaction_density(psi, 1.0) == pytest.approx(0.25, abs=1e-15)
    assert superfluid.njl_interaction_density([0.3, 0.1j, 0, 0], 2.0) == 0.0


def test_njl_identity_sweep():
    rng = sampling.make_rng(17)
    psi = sampling.random_spinors(100_000, rng)
    lhs, rhs = superfluid.njl_forms(psi, 1.0)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + np.max(np.abs(rhs)))
    assert np.max(np.abs(rhs.imag)) <= 1e-12


def test_partially_contracted_density_real_and_uniform_limit():
    psi = superfluid.uniform_condensate(8)
    dens = superfluid.partially_contracted_density(psi, 2.0)
    assert dens.shape == (8,)
    assert_allclose(dens, dens[0], atol=1e-15)


def test_gap_from_unnormalized_uniform_field():
    psi = np.tile([0.6, 0.6, 0.8, 0.8], (5, 1))
    for mode in ("local", "global_mean"):
        gap = superfluid.pairing_update(psi, PairingParams(lam=1.0, mode=mode))
        assert_allclose(gap.delta, 0.48, atol=1e-15)
        assert gap.polarization == 0.0


def test_gap_scales_with_normalization():
    sites = 5
    psi = lattice.normalize(np.tile([0.6, 0.6, 0.8, 0.8], (sites, 1)))
    scale = 1 / (sites * 2.0)
    gap = superfluid.pairing_update(psi, PairingParams(lam=1.0, mode="local"))
    assert_allclose(gap.delta, 0.48 * scale, atol=1e-15)


def test_gap_vanishes_without_right_movers():
    psi = np.zeros((6, 4), complex)
    psi[:, :2] = 0.3
    gap = superfluid.pairing_update(psi, PairingParams(lam=3.0, mode="local"))
    assert_allclose(gap.delta, 0, atol=0)


def test_polarized_field_averages_spins_and_reports_asymmetry():
    psi = np.tile([1.0, 0.5, 1.0, 0.0], (4, 1))
    gap = superfluid.pairing_update(psi, PairingParams(lam=1.0, mode="local"))
    assert_allclose(gap.delta, 0.5, atol=0)
    assert gap.polarization == pytest.approx(1.0)
    gm = superfluid.pairing_update(psi, PairingParams(lam=1.0, mode="global_mean"))
    assert isinstance(gm.delta, complex)
    assert gm.delta == pytest.approx(0.5)


def test_uniform_mode_returns_stored_gap():
    psi = lattice.random_field(4, sampling.make_rng(0))
    gap = superfluid.pairing_update(psi, PairingParams(delta=0.3j, mode="uniform"))
    assert gap.delta == 0.3j


def test_gap_overflow_names_site():
    psi = np.zeros((4, 4), complex)
    psi[2] = [1, 1, 1, 1]
    with pytest.raises(GapOverflowError) as info:
        superfluid.pairing_update(psi, PairingParams(lam=4.0, mode="local"))
    assert info.value.site == 2
    with pytest.raises(GapOverflowError, match="global gap") as info:
        superfluid.pairing_update(psi, PairingParams(delta=1.5, mode="uniform"))
    assert info.value.site == -1


def test_zero_gap_step_is_pure_stream():
    psi = lattice.random_field(7, sampling.make_rng(2))
    assert_allclose(superfluid.apply_superfluid_step(psi, 0.0), lattice.stream_1d(psi), atol=0)
    assert_allclose(superfluid.apply_superfluid_step(psi, np.zeros(7)), lattice.stream_1d(psi), atol=0)


def test_gap_field_shape_checked():
    psi = lattice.random_field(7, sampling.make_rng(2))
    with pytest.raises(ValueError):
        superfluid.apply_superfluid_step(psi, np.zeros(6))


@pytest.mark.parametrize("k", [-2.8, -0.4, 0.0, 0.9, 2.2, math.pi])
def test_hamiltonian_form_matches_step_matrix(k):
    delta = 0.35 * np.exp(-0.6j)
    assert_allclose(superfluid.superfluid_hamiltonian_step(k, delta), superfluid.superfluid_step_matrix(k, delta), atol=1e-15)


@pytest.mark.parametrize("k", [-2.8, -0.4, 0.0, 0.9, 2.2])
def test_superfluid_dispersion_equals_dirac(k):
    delta = 0.6 * np.exp(1.3j)
    a = dirac.step_eigenphases(superfluid.superfluid_step_matrix(k, delta))
    b = dirac.step_eigenphases(dirac.dirac_step_matrix(k, abs(delta)))
    assert_allclose(a, b, atol=1e-12)


def test_plane_wave_step_matches_momentum_matrix():
    sites, j, delta = 16, 3, 0.4j
    spinor = sampling.random_spinors(1, sampling.make_rng(5)).ravel()
    psi = lattice.plane_wave_field(sites, j, spinor)
    u = superfluid.superfluid_step_matrix(lattice.lattice_k(sites, j), delta)
    expected = lattice.plane_wave_field(sites, j, u @ spinor)
    assert_allclose(superfluid.apply_superfluid_step(psi, delta), expected, atol=1e-14)


def test_split_step_is_unitary_and_close_to_collapsed():
    delta = 0.2 * np.exp(0.3j)
    for k in (0.05, 0.5, 2.0):
        s = superfluid.split_step_matrix(k, delta)
        assert algebra.is_unitary(s, 1e-14)
        assert algebra.max_norm(s - superfluid.superfluid_step_matrix(k, delta)) <= abs(delta) * abs(k) + 1e-15


def test_effective_mass():
    assert superfluid.effective_mass(0.0) == 0.0
    assert superfluid.effective_mass(0.3 - 0.4j) == pytest.approx(0.5)
    assert superfluid.effective_mass(0.5, algebra.GridUnits(ell=2.0, tau=1.0)) == pytest.approx(0.125)


def test_local_mode_norm_conservation():
    sites = 256
    psi = lattice.random_field(sites, sampling.make_rng(12))
    p = PairingParams(lam=0.25 * sites, mode="local")
    for _ in range(1000):
        psi = superfluid.step_superfluid(psi, p)
    assert abs(lattice.field_norm2(psi) - 1.0) <= 1e-10


@pytest.mark.parametrize("mode", ["local", "global_mean"])
def test_uniform_condensate_is_fixed_point_of_gap_modulus(mode):
    sites = 64
    psi = superfluid.uniform_condensate(sites)
    p = PairingParams(lam=0.25 * sites, mode=mode)
    d0 = abs(np.ravel(superfluid.pairing_update(psi, p).delta)[0])
    assert d0 > 0
    for _ in range(1000):
        gap = superfluid.pairing_update(psi, p)
        assert np.max(np.abs(np.abs(gap.delta) - d0)) <= 1e-10
        psi = superfluid.apply_superfluid_step(psi, gap.delta, p.tau)


def test_pairing_params_coerce_mode():
    assert PairingParams(mode="local").mode is PairingMode.LOCAL
    with pytest.raises(ValueError):
        PairingParams(mode="mean")
    with pytest.raises(DomainError):
        PairingParams(tau=0.0)
