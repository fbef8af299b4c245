"""Hermitian eigendecomposition with a deterministic gauge, density-matrix
validation, and alignment of eigenframes between neighbouring points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousMatching,
    ConvergenceFailure,
    DimensionMismatch,
    NotFullRank,
    NotHermitian,
    TraceNotOne,
)

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
RANK_TOL = 1e-12
ORTHO_TOL = 1e-10
EIG_TOL = 1e-9
MATCH_TOL = 0.5

# relative window inside which two entries count as "equally large" for the gauge rule
_GAUGE_TIE = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (descending) and eigenvectors (columns of ``frame``).

    ``energies`` is set when the decomposition comes from a generator
    Hamiltonian rather than from the density matrix itself; gap checks then
    use the energy spectrum, which stays well conditioned at low temperature.
    """

    eigenvalues: np.ndarray
    frame: np.ndarray
    min_gap: float = np.inf
    energies: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        v = self.frame
        return (v * self.eigenvalues) @ v.conj().T

    def level_gap(self) -> float:
        """Smallest spacing of the spectrum used for degeneracy checks."""
        if self.energies is not None:
            return _min_gap(np.sort(self.energies))
        return self.min_gap


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _min_gap(values: np.ndarray) -> float:
    if len(values) < 2:
        return np.inf
    return float(np.min(np.abs(np.diff(values))))


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitian("matrix has non-finite entries")
    return a


def hermiticity_error(m: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return float(np.max(np.abs(m - m.conj().T))) / scale if m.size else 0.0


def gauge_fix(frame: np.ndarray) -> np.ndarray:
    """Rotate each column so that its largest entry is real and positive.

    Among entries whose magnitude is within a relative 1e-12 of the
    maximum, the first one is used, so exact ties resolve by index.
    """
    out = np.array(frame, dtype=complex, copy=True)
    mags = np.abs(out)
    for j in range(out.shape[1]):
        col = mags[:, j]
        top = col.max()
        if top == 0.0:
            continue
        idx = int(np.flatnonzero(col >= top * (1.0 - _GAUGE_TIE))[0])
        phase = out[idx, j] / col[idx]
        out[:, j] *= np.conj(phase)
        out[idx, j] = col[idx]
    return out


def _tie_key(vec: np.ndarray) -> tuple:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    first = int(nz[0]) if len(nz) else len(vec)
    return (first, -float(vec[first].real) if len(nz) else 0.0)


def hermitian_eigendecompose(m) -> SpectralDecomposition:
    """Eigendecomposition with descending eigenvalues and gauge-fixed columns.

    Exactly tied eigenvalues are ordered by the position of the first
    nonzero component of their gauge-fixed eigenvectors.
    """
    a = _as_square(m)
    if hermiticity_error(a) > HERMITICITY_TOL:
        raise NotHermitian(f"hermiticity error {hermiticity_error(a):.3e} exceeds {HERMITICITY_TOL}")
    a = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    w = w[::-1].copy()
    v = gauge_fix(v[:, ::-1])

    # reorder within groups of tied eigenvalues
    scale = max(1.0, float(np.max(np.abs(w)))) if len(w) else 1.0
    order = list(range(len(w)))
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and abs(w[j] - w[i]) <= 1e-14 * scale:
            j += 1
        if j - i > 1:
            order[i:j] = sorted(order[i:j], key=lambda c: _tie_key(v[:, c]))
        i = j
    w = w[order]
    v = v[:, order]
    return SpectralDecomposition(eigenvalues=w, frame=v, min_gap=_min_gap(w))


def validate_density(m) -> DensityMatrix:
    a = _as_square(m)
    herr = hermiticity_error(a)
    if herr > HERMITICITY_TOL:
        raise NotHermitian(f"hermiticity error {herr:.3e} exceeds {HERMITICITY_TOL}")
    tr = np.trace(a)
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceNotOne(f"trace {tr.real:.12g}{tr.imag:+.3g}j differs from 1")
    lam_min = float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])
    if lam_min < RANK_TOL:
        raise NotFullRank(f"smallest eigenvalue {lam_min:.3e} below {RANK_TOL}")
    return DensityMatrix(matrix=a.copy())


def align_frames(prev: SpectralDecomposition, next: SpectralDecomposition) -> SpectralDecomposition:
    """Permute and rephase ``next`` so that each <n_prev|n_next> is real, >= 0.

    Levels are paired by maximum overlap. When any best overlap falls
    below ``MATCH_TOL`` the pairing is not trustworthy and index order is
    used instead.
    """
    if prev.dim != next.dim:
        raise DimensionMismatch(f"cannot align frames of dimension {prev.dim} and {next.dim}")
    ov = prev.frame.conj().T @ next.frame  # ov[n, m] = <n_prev|m_next>
    mag = np.abs(ov)
    best_prev = np.argmax(mag, axis=0)
    best_mag = mag[best_prev, np.arange(next.dim)]
    if np.min(best_mag) < MATCH_TOL:
        perm = np.arange(next.dim)
    else:
        if len(set(best_prev.tolist())) != next.dim:
            raise AmbiguousMatching("two levels of the next frame match the same previous level")
        perm = np.empty(next.dim, dtype=int)
        perm[best_prev] = np.arange(next.dim)  # perm[n] = next column paired with prev level n
    frame = next.frame[:, perm].copy()
    diag = ov[np.arange(next.dim), perm]
    for n, o in enumerate(diag):
        if abs(o) > 0.0:
            frame[:, n] *= np.conj(o) / abs(o)
    lam = next.eigenvalues[perm]
    energies = None if next.energies is None else next.energies[perm]
    return SpectralDecomposition(eigenvalues=lam, frame=frame, min_gap=next.min_gap, energies=energies)
