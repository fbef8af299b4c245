"""Geometric tensors: pure-state QGT, the U^N(1) (Sjoqvist) QGT with its
Fisher-Rao / weighted Fubini-Study / curvature split, and the Bures metric.

Sign convention: Q = g - i*Omega, so Omega = -Im Q. The per-level real
curvature is f_n = -2 Im Q^n, whose surface integral is the Berry phase of
the boundary loop (counter-clockwise in the parameter plane), and
Omega = (1/2) sum_n lambda_n f_n.

Every tensor is assembled as a Gram matrix of tangent vectors, which makes
Hermiticity and positive semi-definiteness hold to rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .derivatives import StepPolicy, TangentData, _policy, gradient, spectral_tangent
from .errors import NotPure
from .models import StateFamily


@dataclass(frozen=True, eq=False)
class LevelQgt:
    q: np.ndarray
    f: np.ndarray


@dataclass(frozen=True, eq=False)
class QgtResult:
    q: np.ndarray
    g_fr: np.ndarray
    g_fs: np.ndarray
    omega: np.ndarray
    per_level: tuple
    eigenvalues: np.ndarray

    @property
    def g(self) -> np.ndarray:
        return self.q.real

    @property
    def n_params(self) -> int:
        return self.q.shape[0]


@dataclass(frozen=True, eq=False)
class BuresResult:
    g_b: np.ndarray


def _gram(vectors: np.ndarray) -> np.ndarray:
    """G[mu, nu] = <v_mu|v_nu> for rows v_mu, made exactly Hermitian."""
    g = vectors.conj() @ vectors.T
    return 0.5 * (g + g.conj().T)


def qgt_from_tangent(t: TangentData) -> QgtResult:
    lam = t.eigenvalues
    k = t.n_params
    weighted = t.proj_vec_grad * np.sqrt(lam)[None, None, :]
    stacked = np.concatenate([t.sqrt_eigval_grad, weighted.reshape(k, -1)], axis=1)
    q = _gram(stacked)
    g_fr = t.sqrt_eigval_grad @ t.sqrt_eigval_grad.T
    levels = []
    g_fs = np.zeros((k, k))
    omega = np.zeros((k, k))
    for n in range(len(lam)):
        qn = _gram(t.proj_vec_grad[:, :, n])
        fn = -2.0 * qn.imag
        levels.append(LevelQgt(q=qn, f=fn))
        g_fs += lam[n] * qn.real
        omega += 0.5 * lam[n] * fn
    return QgtResult(q=q, g_fr=g_fr, g_fs=g_fs, omega=omega, per_level=tuple(levels), eigenvalues=lam.copy())


def sjoqvist_qgt(fam: StateFamily, R, policy: StepPolicy | None = None, route: str = "perturbative",
                 phase_field=None) -> QgtResult:
    """U^N(1) QGT Q^S_{mu nu} = sum_n [d lam_n d lam_n / 4 lam_n + lam_n <d n|(1-P_n)|d n>]."""
    return qgt_from_tangent(spectral_tangent(fam, R, policy, route=route, phase_field=phase_field))


def pure_qgt(fam: StateFamily, R, policy: StepPolicy | None = None, route: str = "density") -> QgtResult:
    """Pure-state QGT <d psi|(1 - |psi><psi|)|d psi>.

    ``density`` uses (1-P)|d psi> = (d rho)|psi>, which never touches the
    phase of psi; ``state`` differences psi directly and projects.
    """
    if not fam.is_pure:
        raise NotPure("pure_qgt needs a pure-state family")
    r = fam.check_domain(R)
    psi = fam.state(r)
    if route == "density":
        vecs = gradient(fam.evaluate, r, policy) @ psi
    elif route == "state":
        dpsi = gradient(fam.state, r, policy)
        vecs = dpsi - np.outer(dpsi @ psi.conj(), psi)
    else:
        raise ValueError(f"unknown pure QGT route {route!r}")
    q = _gram(vecs)
    k = len(r)
    f = -2.0 * q.imag
    return QgtResult(q=q, g_fr=np.zeros((k, k)), g_fs=q.real.copy(), omega=-q.imag.copy(),
                     per_level=(LevelQgt(q=q, f=f),), eigenvalues=np.ones(1))


def qgt(fam: StateFamily, R, policy: StepPolicy | None = None) -> QgtResult:
    """Pure QGT for pure families, U^N(1) QGT otherwise."""
    if fam.is_pure:
        return pure_qgt(fam, R, policy)
    return sjoqvist_qgt(fam, R, policy)


def bures_metric(fam: StateFamily, R, policy: StepPolicy | None = None, form: str = "direct") -> BuresResult:
    """Bures metric.

    ``direct``: (1/2) sum_ij <i|d_mu rho|j><j|d_nu rho|i> / (lam_i + lam_j)
    with d rho from finite differences of rho. ``spectral``: the
    Fisher-Rao term plus (1/2) sum_{n != m} (lam_n - lam_m)^2/(lam_n + lam_m)
    times the eigenvector overlaps, from the perturbative tangent.
    """
    policy = _policy(policy)
    r = fam.check_domain(R)
    if form == "direct":
        fam.density(r)  # full-rank check
        dec = fam.spectrum(r)
        lam = dec.eigenvalues
        v = dec.frame
        m = v.conj().T @ gradient(fam.evaluate, r, policy) @ v
        denom = np.sqrt(2.0 * (lam[:, None] + lam[None, :]))
        b = (m / denom[None]).reshape(len(r), -1)
        g = (b @ b.conj().T).real
    elif form == "spectral":
        t = spectral_tangent(fam, r, policy)
        lam = t.eigenvalues
        ov = t.frame.conj().T @ t.proj_vec_grad  # ov[mu, m, n] = <m|d_mu n>, zero for m == n
        w = (lam[:, None] - lam[None, :]) ** 2 / (lam[:, None] + lam[None, :])
        b = (ov * np.sqrt(0.5 * w)[None]).reshape(len(r), -1)
        g = t.sqrt_eigval_grad @ t.sqrt_eigval_grad.T + (b @ b.conj().T).real
    else:
        raise ValueError(f"unknown Bures form {form!r}")
    return BuresResult(g_b=0.5 * (g + g.T))
