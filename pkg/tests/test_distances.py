import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qgt.derivatives import spectral_tangent
from qgt.distances import (decomposition_residual, decomposition_terms, purify, raw_purification_distance,
                           sjoqvist_finite_distance)
from qgt.errors import DegenerateSpectrum, DimensionMismatch, DomainExceeded, NearDegenerateWarning
from qgt.models import bloch_family, random_smooth_family
from qgt.spectral import hermitian_eigendecompose, validate_density
from qgt.suites import decomposition_suite, random_phase_field
from qgt.tensors import sjoqvist_qgt


def _pair(seed, n):
    rng = np.random.default_rng(seed)
    return oracles.random_density(rng, n), oracles.random_density(rng, n), rng


def test_identity():
    rho, _, _ = _pair(0, 3)
    assert sjoqvist_finite_distance(rho, rho) < 1e-7


def test_commuting_swap_index_and_overlap_pairing():
    a, b = np.diag([0.7, 0.3]), np.diag([0.3, 0.7])
    # index pairing matches 0.7 with 0.7 across orthogonal eigenvectors
    assert np.isclose(sjoqvist_finite_distance(a, b) ** 2, 2.0)
    assert np.isclose(sjoqvist_finite_distance(a, b, pairing="overlap") ** 2, 2 - 4 * np.sqrt(0.21))
    assert np.isclose(2 - 4 * np.sqrt(0.21), 0.16697, atol=1e-5)


def test_diagonal_phase_unitary_leaves_distance_zero():
    rho, _, rng = _pair(1, 4)
    dec = hermitian_eigendecompose(rho)
    u = dec.frame @ np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 4))) @ dec.frame.conj().T
    assert sjoqvist_finite_distance(rho, u @ rho @ u.conj().T) < 1e-7


def test_fisher_rao_reduction_for_commuting_states():
    la, lb = np.array([0.5, 0.3, 0.2]), np.array([0.45, 0.35, 0.2 - 1e-3])
    lb /= lb.sum()
    u = oracles.random_unitary(np.random.default_rng(2), 3)
    a = (u * la) @ u.conj().T
    b = (u * np.sort(lb)[::-1]) @ u.conj().T
    d2 = sjoqvist_finite_distance(a, b) ** 2
    assert abs(d2 - np.sum((np.sqrt(la) - np.sqrt(np.sort(lb)[::-1])) ** 2)) < 1e-12


def test_errors():
    with pytest.raises(DimensionMismatch):
        sjoqvist_finite_distance(np.eye(2) / 2 + np.diag([0.1, -0.1]), np.diag([0.5, 0.3, 0.2]))
    with pytest.raises(DegenerateSpectrum):
        sjoqvist_finite_distance(np.eye(2) / 2, np.diag([0.6, 0.4]))
    near = np.diag([0.5 + 2.5e-8, 0.5 - 2.5e-8])
    with pytest.warns(NearDegenerateWarning):
        sjoqvist_finite_distance(near, np.diag([0.6, 0.4]))


def test_accepts_decompositions():
    rho, sigma, _ = _pair(3, 3)
    direct = sjoqvist_finite_distance(rho, sigma)
    via = sjoqvist_finite_distance(hermitian_eigendecompose(rho), validate_density(sigma))
    assert direct == via
    assert np.isclose(direct**2, oracles.sjoqvist_distance2(rho, sigma), atol=1e-12)


@given(st.integers(0, 10**6), st.integers(2, 6))
def test_metric_properties(seed, n):
    rho, sigma, rng = _pair(seed, n)
    d = sjoqvist_finite_distance(rho, sigma)
    assert d >= 0
    assert np.isclose(d, sjoqvist_finite_distance(sigma, rho), atol=1e-10)
    v = oracles.random_unitary(rng, n)
    moved = sjoqvist_finite_distance(v @ rho @ v.conj().T, v @ sigma @ v.conj().T)
    assert abs(moved - d) <= 1e-10


@given(st.integers(0, 10**6), st.integers(2, 5))
def test_purification_invariants(seed, n):
    rho, _, rng = _pair(seed, n)
    dec = hermitian_eigendecompose(rho)
    p = purify(dec, oracles.random_unitary(rng, n), rng.uniform(-np.pi, np.pi, n))
    assert abs(np.linalg.norm(p.w) - 1.0) <= 1e-10
    assert np.abs(p.density() - rho).max() <= 1e-10


def test_raw_distance_phase_shift():
    rho, _, _ = _pair(4, 3)
    dec = hermitian_eigendecompose(rho)
    delta = 0.9
    p = purify(dec)
    q = purify(dec, phases=np.array([0.0, delta, 0.0]))
    assert raw_purification_distance(p, p) == 0.0
    assert np.isclose(raw_purification_distance(p, q) ** 2, 2 * dec.eigenvalues[1] * (1 - np.cos(delta)))


@given(st.integers(0, 10**6), st.integers(2, 5))
def test_raw_distance_bounds_sjoqvist(seed, n):
    rho, sigma, rng = _pair(seed, n)
    a, b = hermitian_eigendecompose(rho), hermitian_eigendecompose(sigma)
    ref = np.eye(n)
    p = purify(a, ref, rng.uniform(-np.pi, np.pi, n))
    q = purify(b, ref, rng.uniform(-np.pi, np.pi, n))
    assert raw_purification_distance(p, q) >= sjoqvist_finite_distance(a, b) - 1e-10


def test_purification_shape_checks():
    dec = hermitian_eigendecompose(np.diag([0.6, 0.4]))
    with pytest.raises(DimensionMismatch):
        purify(dec, np.eye(3))
    other = purify(hermitian_eigendecompose(np.diag([0.5, 0.3, 0.2])))
    with pytest.raises(DimensionMismatch):
        raw_purification_distance(purify(dec), other)


def test_decomposition_horizontal_frame_kills_fiber_term():
    fam = bloch_family(pure=False, beta=1.0)
    R = np.array([1.0, 0.3])
    chi = random_phase_field(np.random.default_rng(5), 2, 2)
    t = spectral_tangent(fam, R, route="frame_fd", phase_field=chi)
    horizontal = (1j * t.berry_conn).real.T  # d theta_n = i A_n
    terms = decomposition_terms(fam, R, [6e-4, -8e-4], horizontal, phase_field=chi)
    assert terms.fiber < 1e-20
    assert terms.residual <= 1e-8
    assert abs(terms.raw - terms.base) <= 1e-8


def test_decomposition_zero_displacement():
    fam = bloch_family(pure=False, beta=1.0)
    assert decomposition_residual(fam, [1.0, 0.3], [0.0, 0.0], np.ones((2, 2))) < 1e-30


def test_decomposition_thermal_bloch_random_gradients():
    rng = np.random.default_rng(6)
    fam = bloch_family(pure=False, beta=1.0)
    for _ in range(10):
        R = np.array([rng.uniform(0.5, 2.5), rng.uniform(-3, 3)])
        d = rng.standard_normal(2)
        d *= 1e-3 / np.linalg.norm(d)
        chi = random_phase_field(rng, 2, 2)
        assert decomposition_residual(fam, R, d, rng.standard_normal((2, 2)), phase_field=chi) <= 1e-8


def test_decomposition_displacement_limit():
    with pytest.raises(DomainExceeded):
        decomposition_terms(bloch_family(pure=False, beta=1.0), [1.0, 0.3], [0.02, 0.0], np.zeros((2, 2)))


def test_infinitesimal_match():
    fam = random_smooth_family(12, 4, 2)
    R = np.array([0.2, 0.5])
    g = sjoqvist_qgt(fam, R).g
    u = np.array([0.6, -0.8])
    dev = []
    for s in (1e-2, 1e-3):
        d2 = sjoqvist_finite_distance(fam.spectrum(R), fam.spectrum(R + s * u)) ** 2
        dev.append(abs(d2 / (s * s * u @ g @ u) - 1))
    assert dev[1] < 1e-2 and dev[1] < dev[0] / 5


def test_decomposition_suite_options():
    scales = (1e-3, 1e-4)
    for ensemble, fields in (("thermal-bloch", True), ("random", False)):
        res = decomposition_suite(seed=1, draws=5, scales=scales, ensemble=ensemble, phase_fields=fields)
        assert np.allclose(np.log10(res.max(axis=0)[0] / res.max(axis=0)[1]), 3.0, atol=0.3)
    with pytest.raises(ValueError):
        decomposition_suite(draws=1, ensemble="nope")
