import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qgt.derivatives import StepPolicy
from qgt.errors import NotFullRank, NotPure
from qgt.models import (DensityFamily, ModelConfig, PureFamily, bloch_family, bosonic_coherent_family,
                        diagonal_qubit_family, ground_state_family, random_smooth_family)
from qgt.suites import random_phase_field
from qgt.tensors import bures_metric, pure_qgt, qgt, sjoqvist_qgt


@pytest.mark.parametrize("route", ["density", "state"])
@pytest.mark.parametrize("theta", [0.4, 1.0, np.pi / 2, 2.5])
def test_pure_bloch_closed_form(route, theta):
    q = pure_qgt(bloch_family(pure=True), [theta, 0.3], route=route)
    assert np.allclose(q.g, oracles.bloch_pure_metric(theta), atol=1e-9)
    assert np.isclose(q.q[0, 1].imag, oracles.bloch_pure_im_q(theta), atol=1e-9)
    assert np.allclose(q.g_fr, 0.0)


def test_pure_bloch_lower_level_flips_curvature():
    q = pure_qgt(bloch_family(pure=True, level="lower"), [1.0, 0.3])
    assert np.isclose(q.q[0, 1].imag, -np.sin(1.0) / 4, atol=1e-9)


def test_pure_qgt_matches_overlap_oracles():
    fam = bloch_family(pure=True)
    R = np.array([1.2, -0.4])
    q = pure_qgt(fam, R)
    assert np.allclose(q.g, oracles.fubini_study_from_overlaps(fam.state, R), atol=1e-7)
    assert np.isclose(-2 * q.q[0, 1].imag, oracles.pure_curvature_from_loops(fam.state, R, 0, 1), atol=1e-7)


def test_pure_qgt_constant_family_is_zero():
    fam = PureFamily(lambda R: np.array([0.6, 0.8j]), 2, 2)
    assert np.abs(pure_qgt(fam, [0.1, 0.2]).q).max() == 0.0


@given(st.integers(0, 10**6))
def test_pure_qgt_global_phase_invariance(seed):
    rng = np.random.default_rng(seed)
    base = bloch_family(pure=True)
    chi = random_phase_field(rng, 1, 2)
    moved = PureFamily(lambda R: np.exp(1j * chi(R)[0]) * base.state(R), 2, 2, lower=base.lower, upper=base.upper)
    R = [rng.uniform(0.3, 2.8), rng.uniform(-3, 3)]
    for route in ("density", "state"):
        assert np.abs(pure_qgt(moved, R, route=route).q - pure_qgt(base, R).q).max() < 1e-8


def test_pure_qgt_requires_pure_family():
    with pytest.raises(NotPure):
        pure_qgt(diagonal_qubit_family(), [0.2])


def test_coherent_closed_form():
    fam = bosonic_coherent_family(ModelConfig(beta=1.0, n_cut=60))
    for z in ([0.0, 0.0], [0.5, 0.0], [0.3, -0.4]):
        q = sjoqvist_qgt(fam, z)
        assert np.allclose(q.g, oracles.coherent_metric(1.0), rtol=1e-3)
        assert np.isclose(q.omega[0, 1], oracles.COHERENT_OMEGA_XY, atol=1e-3)
        assert np.isclose(q.q[0, 1].imag, 1.0, atol=1e-3)


@pytest.mark.parametrize("beta", [0.5, 1.0, 3.0])
def test_thermal_bloch_closed_form(beta):
    theta = 1.1
    q = sjoqvist_qgt(bloch_family(pure=False, beta=beta), [theta, 0.2])
    lam0, lam1 = oracles.two_level_boltzmann(beta)
    assert np.abs(q.g_fr).max() < 1e-12
    assert np.allclose(q.g, oracles.bloch_pure_metric(theta), atol=1e-9)
    assert np.isclose(q.omega[0, 1], (lam0 - lam1) * np.sin(theta) / 4, atol=1e-9)


def test_diagonal_family_value():
    r = 0.3
    q = sjoqvist_qgt(diagonal_qubit_family(), [r])
    assert np.isclose(q.q[0, 0].real, oracles.diagonal_qubit_qgt(r), atol=1e-9)
    assert np.abs(q.g_fs).max() < 1e-12
    assert np.isclose(bures_metric(diagonal_qubit_family(), [r]).g_b[0, 0], oracles.diagonal_qubit_qgt(r), atol=1e-9)


def test_sjoqvist_matches_distance_oracle():
    fam = random_smooth_family(3, 4, 3)
    R = np.array([0.2, -0.4, 0.1])
    assert np.allclose(sjoqvist_qgt(fam, R).g, oracles.sjoqvist_metric(fam.evaluate, R), atol=2e-6)


def test_sjoqvist_routes_agree():
    fam = random_smooth_family(8, 5, 2)
    R = [0.4, 0.1]
    a = sjoqvist_qgt(fam, R).q
    b = sjoqvist_qgt(fam, R, StepPolicy(1e-4, "richardson"), route="frame_fd").q
    assert np.abs(a - b).max() < 1e-8


def test_density_family_uses_rho_route():
    fam = random_smooth_family(9, 3, 2)
    plain = DensityFamily(fam.evaluate, 3, 2)
    R = [0.3, -0.6]
    assert np.abs(sjoqvist_qgt(plain, R).q - sjoqvist_qgt(fam, R).q).max() < 1e-8


def test_zero_temperature_limit():
    fam = bloch_family(pure=False, beta=50.0)
    ground = ground_state_family(fam)
    R = [0.9, 0.4]
    assert np.abs(sjoqvist_qgt(fam, R).q - pure_qgt(ground, R).q).max() < 1e-6


def test_bures_matches_fidelity_oracle():
    fam = random_smooth_family(3, 4, 3)
    R = np.array([0.2, -0.4, 0.1])
    assert np.allclose(bures_metric(fam, R).g_b, oracles.bures_metric_from_fidelity(fam.evaluate, R), atol=1e-6)


def test_bures_forms_agree():
    fam = random_smooth_family(21, 3, 2)
    R = [0.1, 0.2]
    a = bures_metric(fam, R, form="direct").g_b
    b = bures_metric(fam, R, form="spectral").g_b
    assert np.abs(a - b).max() < 1e-8


def test_bures_low_temperature_limit():
    theta = 0.8
    g = bures_metric(bloch_family(pure=False, beta=30.0), [theta, 0.0], form="spectral").g_b
    assert np.allclose(g, oracles.bloch_pure_metric(theta), atol=1e-9)


def test_bures_requires_full_rank():
    fam = DensityFamily(lambda R: np.diag([1.0, 0.0]).astype(complex), 2, 1)
    with pytest.raises(NotFullRank):
        bures_metric(fam, [0.0])


def test_qgt_dispatch():
    assert qgt(bloch_family(pure=True), [1.0, 0.0]).per_level[0].q.shape == (2, 2)
    assert len(qgt(bloch_family(pure=False, beta=1.0), [1.0, 0.0]).per_level) == 2


@given(st.integers(0, 10**6), st.integers(2, 6), st.integers(1, 3))
def test_structural_invariants(seed, dim, k):
    rng = np.random.default_rng(seed)
    fam = random_smooth_family(seed, dim, k)
    R = rng.uniform(-1, 1, k)
    q = sjoqvist_qgt(fam, R)
    assert np.abs(q.q - q.q.conj().T).max() <= 1e-10
    assert np.abs(q.q - (q.g_fr + q.g_fs - 1j * q.omega)).max() <= 1e-10
    assert np.abs(q.omega + q.omega.T).max() <= 1e-12
    for part in (q.g_fr, q.g_fs):
        assert np.abs(part - part.T).max() <= 1e-12
        assert np.linalg.eigvalsh(part).min() >= -1e-10
    for lv in q.per_level:
        assert np.abs(lv.f + lv.f.T).max() <= 1e-12
    # Omega is half the weighted sum of the level curvatures
    assert np.allclose(q.omega, 0.5 * sum(l * lv.f for l, lv in zip(q.eigenvalues, q.per_level)), atol=1e-12)
    gb = bures_metric(fam, R).g_b
    assert np.abs(gb - gb.T).max() <= 1e-12 and np.linalg.eigvalsh(gb).min() >= -1e-10
    # term-wise dominance of the Bures metric
    assert np.all(np.diag(gb) <= np.diag(q.g) + 1e-10)


@given(st.integers(0, 10**6))
def test_gauge_invariance_under_phase_fields(seed):
    rng = np.random.default_rng(seed)
    fam = random_smooth_family(int(rng.integers(10**6)), 4, 2)
    R = rng.uniform(-1, 1, 2)
    policy = StepPolicy(1e-4, "richardson")
    ref = sjoqvist_qgt(fam, R, policy).q
    moved = sjoqvist_qgt(fam, R, policy, route="frame_fd", phase_field=random_phase_field(rng, 4, 2)).q
    assert np.abs(moved - ref).max() <= 1e-7
