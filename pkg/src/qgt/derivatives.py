"""Finite differences of state families and spectral tangent data.

Two independent routes produce the eigen-derivatives needed by the
geometric tensors:

* ``perturbative``: first-order eigen-perturbation of the derivative of the
  generator (the Hamiltonian for thermal families, rho itself otherwise).
  Gauge free.
* ``frame_fd``: eigenframes at displaced points are aligned to the centre
  frame and differenced directly. Carries a gauge, hence also the Berry
  connection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateSpectrum, LevelCrossing
from .models import StateFamily, ThermalFamily
from .spectral import SpectralDecomposition, align_frames, hermitian_eigendecompose

DEFAULT_STEP = 1e-5
MIN_STEP = 1e-8
GAP_TOL = 1e-8
SCHEMES = ("central2", "central4", "richardson")

# offsets in units of h, weights in units of 1/h
_STENCILS = {
    "central2": (np.array([1.0, -1.0]), np.array([0.5, -0.5])),
    "central4": (np.array([2.0, 1.0, -1.0, -2.0]), np.array([-1.0, 8.0, -8.0, 1.0]) / 12.0),
    # (4 D(h/2) - D(h)) / 3 with D the central difference
    "richardson": (np.array([0.5, -0.5, 1.0, -1.0]), np.array([4.0 / 3.0, -4.0 / 3.0, -1.0 / 6.0, 1.0 / 6.0])),
}


@dataclass(frozen=True)
class StepPolicy:
    h: float = DEFAULT_STEP
    scheme: str = "central2"
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown finite-difference scheme {self.scheme!r}; choose from {SCHEMES}")
        for h in [self.h, *self.overrides.values()]:
            if not h >= MIN_STEP:
                raise ValueError(f"finite-difference step {h} below {MIN_STEP}")

    def step(self, axis: int) -> float:
        return float(self.overrides.get(axis, self.h))

    def stencil(self, axis: int):
        """Absolute offsets along ``axis`` and matching derivative weights."""
        h = self.step(axis)
        offs, wts = _STENCILS[self.scheme]
        return offs * h, wts / h


def _policy(policy):
    return StepPolicy() if policy is None else policy


def gradient(f: Callable, R, policy: StepPolicy | None = None) -> np.ndarray:
    """Stack of directional derivatives of an array-valued ``f``, shape (k, ...)."""
    policy = _policy(policy)
    r = np.asarray(R, dtype=float)
    out = []
    for mu in range(len(r)):
        offs, wts = policy.stencil(mu)
        acc = None
        for o, w in zip(offs, wts):
            p = r.copy()
            p[mu] += o
            term = w * np.asarray(f(p))
            acc = term if acc is None else acc + term
        out.append(acc)
    return np.array(out)


def matrix_fd(fam: StateFamily, R, policy: StepPolicy | None = None) -> np.ndarray:
    """Finite-difference derivatives d rho / dR^mu, shape (k, N, N)."""
    r = fam.check_domain(R)
    return gradient(fam.evaluate, r, policy)


@dataclass(frozen=True, eq=False)
class TangentData:
    """Per-direction eigen-derivatives at one parameter point.

    ``proj_vec_grad[mu, :, n]`` is (1 - P_n)|d_mu n> expressed in the gauge
    of ``frame``; ``berry_conn[mu, n]`` = <n|d_mu n> (frame_fd only).
    """

    eigenvalues: np.ndarray
    frame: np.ndarray
    rho_grad: np.ndarray
    eigval_grad: np.ndarray
    sqrt_eigval_grad: np.ndarray
    proj_vec_grad: np.ndarray
    berry_conn: np.ndarray | None = None
    route: str = "perturbative"

    @property
    def n_params(self) -> int:
        return self.eigval_grad.shape[0]


def check_gap(dec: SpectralDecomposition, R=None) -> None:
    gap = dec.level_gap()
    if gap < GAP_TOL:
        where = "" if R is None else f" at R={np.asarray(R).tolist()}"
        raise DegenerateSpectrum(f"spectral gap {gap:.3e} below {GAP_TOL}{where}")


def _offdiag_ratio(m: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """c[mu, m, n] = m[mu, m, n] / (levels[n] - levels[m]) off the diagonal, 0 on it."""
    diff = levels[None, :] - levels[:, None]
    np.fill_diagonal(diff, 1.0)
    c = m / diff
    idx = np.arange(len(levels))
    c[:, idx, idx] = 0.0
    return c


def _perturbative(fam: StateFamily, r: np.ndarray, policy: StepPolicy) -> TangentData:
    dec = fam.spectrum(r)
    check_gap(dec, r)
    lam = dec.eigenvalues
    v = dec.frame
    vh = v.conj().T
    if isinstance(fam, ThermalFamily):
        dh = gradient(fam.hamiltonian, r, policy)
        m = vh @ dh @ v
        de = np.real(np.diagonal(m, axis1=1, axis2=2))
        shifted = de - (de @ lam)[:, None]
        dlam = -fam.beta * lam * shifted
        dsqrt = -0.5 * fam.beta * np.sqrt(lam) * shifted
        c = _offdiag_ratio(m, dec.energies)
        inner = c * (lam[None, :] - lam[:, None])[None]
        idx = np.arange(len(lam))
        inner[:, idx, idx] = dlam
        drho = v @ inner @ vh
    else:
        drho = gradient(fam.evaluate, r, policy)
        m = vh @ drho @ v
        dlam = np.real(np.diagonal(m, axis1=1, axis2=2)).copy()
        dsqrt = dlam / (2.0 * np.sqrt(lam))
        c = _offdiag_ratio(m, lam)
    proj = v @ c
    return TangentData(eigenvalues=lam, frame=v, rho_grad=drho, eigval_grad=dlam, sqrt_eigval_grad=dsqrt,
                       proj_vec_grad=proj, berry_conn=None, route="perturbative")


def density_spectrum(fam: StateFamily, R) -> SpectralDecomposition:
    """Gauge-fixed eigendecomposition of the (validated) density matrix itself."""
    return hermitian_eigendecompose(fam.density(R).matrix)


def aligned_spectrum(center: SpectralDecomposition, fam: StateFamily, R) -> SpectralDecomposition:
    """Spectrum of rho(R) with its frame aligned to ``center`` level by level."""
    dec = density_spectrum(fam, R)
    al = align_frames(center, dec)
    if not np.array_equal(al.eigenvalues, dec.eigenvalues):
        raise LevelCrossing(f"eigenvalue order changes between the centre and R={np.asarray(R).tolist()}")
    return al


def _apply_phases(frame: np.ndarray, phase_field, R) -> np.ndarray:
    if phase_field is None:
        return frame
    return frame * np.exp(1j * np.asarray(phase_field(R), dtype=float))[None, :]


def _frame_fd(fam: StateFamily, r: np.ndarray, policy: StepPolicy, phase_field) -> TangentData:
    center = density_spectrum(fam, r)
    check_gap(center, r)
    lam = center.eigenvalues
    v = _apply_phases(center.frame, phase_field, r)
    k, n = len(r), len(lam)
    dlam = np.zeros((k, n))
    dframe = np.zeros((k, n, n), dtype=complex)
    for mu in range(k):
        offs, wts = policy.stencil(mu)
        for o, w in zip(offs, wts):
            p = r.copy()
            p[mu] += o
            al = aligned_spectrum(center, fam, p)
            dlam[mu] += w * al.eigenvalues
            dframe[mu] += w * _apply_phases(al.frame, phase_field, p)
    conn = np.einsum("in,kin->kn", v.conj(), dframe)
    proj = dframe - v[None, :, :] * conn[:, None, :]
    dsqrt = dlam / (2.0 * np.sqrt(lam))
    drho = gradient(fam.evaluate, r, policy)
    return TangentData(eigenvalues=lam, frame=v, rho_grad=drho, eigval_grad=dlam, sqrt_eigval_grad=dsqrt,
                       proj_vec_grad=proj, berry_conn=1j * conn.imag, route="frame_fd")


def spectral_tangent(fam: StateFamily, R, policy: StepPolicy | None = None, route: str = "perturbative",
                     phase_field: Callable | None = None) -> TangentData:
    """Eigenvalue and projected eigenvector derivatives at ``R``.

    ``phase_field`` (frame_fd only) maps a point to per-level phases chi_n
    that are applied to every evaluated frame, i.e. a local U^N(1) gauge
    transformation of the eigenvectors.
    """
    policy = _policy(policy)
    r = fam.check_domain(R)
    if route == "perturbative":
        return _perturbative(fam, r, policy)
    if route == "frame_fd":
        return _frame_fd(fam, r, policy, phase_field)
    raise ValueError(f"unknown derivative route {route!r}")
