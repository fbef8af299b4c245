"""Finite Sjoqvist distance, purifications and the raw (purification)
distance, and the fibre/base split of the raw distance."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .derivatives import GAP_TOL, StepPolicy, aligned_spectrum, density_spectrum, spectral_tangent
from .errors import DegenerateSpectrum, DimensionMismatch, DomainExceeded, NearDegenerateWarning
from .models import StateFamily
from .spectral import DensityMatrix, SpectralDecomposition, align_frames, hermitian_eigendecompose, validate_density
from .tensors import sjoqvist_qgt

MAX_DISPLACEMENT = 1e-2


@dataclass(frozen=True, eq=False)
class Purification:
    """W = sum_n sqrt(lam_n) e^{i theta_n} |n><n_0|."""

    w: np.ndarray
    frame: SpectralDecomposition
    phases: np.ndarray
    reference: np.ndarray

    def density(self) -> np.ndarray:
        return self.w @ self.w.conj().T


def purify(dec: SpectralDecomposition, reference: np.ndarray | None = None, phases=None) -> Purification:
    """Purification of ``dec`` with reference frame columns |n_0> (identity if omitted)."""
    n = dec.dim
    ref = np.eye(n, dtype=complex) if reference is None else np.asarray(reference, dtype=complex)
    th = np.zeros(n) if phases is None else np.asarray(phases, dtype=float)
    if ref.shape != (n, n) or th.shape != (n,):
        raise DimensionMismatch("reference frame and phases must match the state dimension")
    amp = np.sqrt(np.clip(dec.eigenvalues, 0.0, None)) * np.exp(1j * th)
    w = (dec.frame * amp[None, :]) @ ref.conj().T
    return Purification(w=w, frame=dec, phases=th, reference=ref)


def _spectrum_of(m) -> SpectralDecomposition:
    if isinstance(m, SpectralDecomposition):
        return m
    if not isinstance(m, DensityMatrix):
        m = validate_density(m)
    return hermitian_eigendecompose(m.matrix)


def _check_spacing(dec: SpectralDecomposition) -> None:
    gap = dec.level_gap()
    if gap < GAP_TOL:
        raise DegenerateSpectrum(f"spectral gap {gap:.3e} below {GAP_TOL}")
    if gap < 10 * GAP_TOL:
        warnings.warn(f"near-degenerate spectrum (gap {gap:.3e}); index pairing of levels is fragile",
                      NearDegenerateWarning, stacklevel=3)


def sjoqvist_finite_distance(a, b, pairing: str = "index") -> float:
    """d^2 = 2 - 2 sum_n sqrt(lam_n lam'_n) |<n|n'>|.

    Levels are paired by descending-eigenvalue index; ``pairing="overlap"``
    pairs them by maximum eigenvector overlap instead (what continuity along
    a path through a level crossing would give).
    Accepts density matrices (validated) or spectral decompositions.
    """
    da, db = _spectrum_of(a), _spectrum_of(b)
    if da.dim != db.dim:
        raise DimensionMismatch(f"dimensions {da.dim} and {db.dim} differ")
    _check_spacing(da)
    _check_spacing(db)
    if pairing == "overlap":
        db = align_frames(da, db)
    elif pairing != "index":
        raise ValueError(f"unknown pairing {pairing!r}")
    overlaps = np.abs(np.einsum("in,in->n", da.frame.conj(), db.frame))
    fid = np.sum(np.sqrt(np.clip(da.eigenvalues * db.eigenvalues, 0.0, None)) * overlaps)
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * fid)))


def raw_purification_distance(p: Purification, q: Purification) -> float:
    """Hilbert-Schmidt norm ||W_p - W_q||."""
    if p.w.shape != q.w.shape:
        raise DimensionMismatch(f"purification shapes {p.w.shape} and {q.w.shape} differ")
    return float(np.linalg.norm(p.w - q.w))


@dataclass(frozen=True)
class DecompositionTerms:
    raw: float
    base: float
    fiber: float
    residual: float


def decomposition_terms(fam: StateFamily, R, dR, theta_grad, policy: StepPolicy | None = None,
                        phase_field=None, theta0=None) -> DecompositionTerms:
    """Raw distance ||W(R+dR) - W(R)||^2 against base + fibre quadratic forms.

    The eigenvector section is the frame aligned to the gauge-fixed frame at
    ``R`` times the optional smooth ``phase_field``; the fibre coordinates are
    theta_n(R + dR) = theta0_n + theta_grad[n] . dR.
    """
    r = fam.check_domain(R)
    d = np.asarray(dR, dtype=float)
    if np.linalg.norm(d) > MAX_DISPLACEMENT * (1 + 1e-12):
        raise DomainExceeded(f"displacement norm {np.linalg.norm(d):.3e} exceeds {MAX_DISPLACEMENT}")
    tangent = spectral_tangent(fam, r, policy, route="frame_fd", phase_field=phase_field)
    base = float(d @ sjoqvist_qgt(fam, r, policy).g @ d)
    lam = tangent.eigenvalues
    grad = np.asarray(theta_grad, dtype=float).reshape(len(lam), len(r))
    dtheta = grad @ d
    fib = dtheta - 1j * (d @ tangent.berry_conn)
    fiber = float(np.sum(lam * fib.real ** 2))

    th0 = np.zeros(len(lam)) if theta0 is None else np.asarray(theta0, dtype=float)
    center = density_spectrum(fam, r)
    far = aligned_spectrum(center, fam, r + d)
    chi0 = np.zeros(len(lam)) if phase_field is None else np.asarray(phase_field(r), dtype=float)
    chi1 = np.zeros(len(lam)) if phase_field is None else np.asarray(phase_field(r + d), dtype=float)
    w0 = purify(center, center.frame, th0 + chi0)
    w1 = purify(far, center.frame, th0 + dtheta + chi1)
    raw = raw_purification_distance(w0, w1) ** 2
    return DecompositionTerms(raw=raw, base=base, fiber=fiber, residual=abs(raw - base - fiber))


def decomposition_residual(fam: StateFamily, R, dR, theta_grad, policy: StepPolicy | None = None,
                           phase_field=None) -> float:
    return decomposition_terms(fam, R, dR, theta_grad, policy, phase_field).residual
