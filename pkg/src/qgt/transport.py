"""Parallel transport along curves, Berry phases, and the surface phase
theta_g from discrete Wilson-loop plaquettes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .derivatives import StepPolicy, check_gap
from .errors import LevelCrossing, NotPure, QgtError
from .models import StateFamily
from .spectral import MATCH_TOL


@dataclass(frozen=True)
class Curve:
    """Parametrized curve t in [0, 1] -> R(t).

    A closed curve is sampled periodically (t_j = j / n_steps, the last link
    returning to t_0), so loops that close only in state space, such as a
    full turn in an angle coordinate, are handled exactly.
    """

    func: Callable
    n_steps: int = 1024
    closed: bool = False

    def __post_init__(self):
        if self.n_steps < 8:
            raise QgtError(f"a curve needs at least 8 steps, got {self.n_steps}")

    def sample(self, t: float) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.func(t), dtype=float))

    def samples(self) -> np.ndarray:
        n = self.n_steps if self.closed else self.n_steps + 1
        return np.array([self.sample(j / self.n_steps) for j in range(n)])

    def reversed(self) -> "Curve":
        f = self.func
        return Curve(lambda t: f(1.0 - t), self.n_steps, self.closed)


def circle(center, radius: float, n_steps: int = 1024) -> Curve:
    c = np.asarray(center, dtype=float)

    def f(t):
        a = 2 * np.pi * (t % 1.0)
        return c + radius * np.array([np.cos(a), np.sin(a)])

    return Curve(f, n_steps, closed=True)


def axis_loop(start, axis: int, period: float, n_steps: int = 1024) -> Curve:
    """Loop advancing coordinate ``axis`` by one ``period`` (closed in state space)."""
    s = np.asarray(start, dtype=float)

    def f(t):
        p = s.copy()
        p[axis] += period * t
        return p

    return Curve(f, n_steps, closed=True)


def polyline(points, n_steps: int = 1024, closed: bool = False) -> Curve:
    """Piecewise-linear curve through ``points``, uniform in arclength."""
    pts = np.asarray(points, dtype=float)
    if closed and not np.array_equal(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[:1]])
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0.0:
        return Curve(lambda t: pts[0].copy(), n_steps, closed)

    def f(t):
        s = (t % 1.0 if closed else t) * total
        i = min(int(np.searchsorted(cum, s, side="right")) - 1, len(seg) - 1)
        frac = 0.0 if seg[i] == 0 else (s - cum[i]) / seg[i]
        return pts[i] + frac * (pts[i + 1] - pts[i])

    return Curve(f, n_steps, closed)


def rectangle(u0: float, u1: float, v0: float, v1: float, n_steps: int = 1024) -> Curve:
    """Counter-clockwise boundary of [u0, u1] x [v0, v1]."""
    return polyline([[u0, v0], [u1, v0], [u1, v1], [u0, v1]], n_steps, closed=True)


@dataclass(frozen=True)
class SurfacePatch:
    """Uniform lattice of n_u x n_v points over [u0, u1] x [v0, v1]."""

    u0: float
    u1: float
    v0: float
    v1: float
    n_u: int = 32
    n_v: int = 32

    def __post_init__(self):
        if self.n_u < 4 or self.n_v < 4:
            raise QgtError("a patch needs at least 4 lattice points per axis")

    @property
    def du(self) -> float:
        return (self.u1 - self.u0) / (self.n_u - 1)

    @property
    def dv(self) -> float:
        return (self.v1 - self.v0) / (self.n_v - 1)

    def lattice(self) -> np.ndarray:
        u = np.linspace(self.u0, self.u1, self.n_u)
        v = np.linspace(self.v0, self.v1, self.n_v)
        return np.stack(np.meshgrid(u, v, indexing="ij"), axis=-1)

    def centers(self) -> np.ndarray:
        u = self.u0 + (np.arange(self.n_u - 1) + 0.5) * self.du
        v = self.v0 + (np.arange(self.n_v - 1) + 0.5) * self.dv
        return np.stack(np.meshgrid(u, v, indexing="ij"), axis=-1)

    def boundary(self, n_steps: int = 1024) -> Curve:
        return rectangle(self.u0, self.u1, self.v0, self.v1, n_steps)

    def refined(self) -> "SurfacePatch":
        return SurfacePatch(self.u0, self.u1, self.v0, self.v1, 2 * self.n_u - 1, 2 * self.n_v - 1)


@dataclass(frozen=True, eq=False)
class TransportResult:
    phase_history: np.ndarray
    berry_phases: np.ndarray
    windings: np.ndarray
    accumulated: np.ndarray
    connection_residuals: np.ndarray
    connection_residual_max: float
    theta_total: float
    eigenvalues: np.ndarray


def levels(fam: StateFamily, R):
    """Weights and eigenvector columns at R (a pure family is one level of weight 1)."""
    if fam.is_pure:
        return np.ones(1), fam.state(R)[:, None]
    dec = fam.spectrum(R)
    check_gap(dec, R)
    return dec.eigenvalues, dec.frame


def principal(phase):
    """Wrap to (-pi, pi]."""
    p = np.mod(np.asarray(phase, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(p == -np.pi, np.pi, p)


def _link(va: np.ndarray, vb: np.ndarray, where) -> np.ndarray:
    ov = va.conj().T @ vb
    mag = np.abs(ov)
    if np.any(np.argmax(mag, axis=0) != np.arange(ov.shape[1])) or np.any(np.diagonal(mag) < MATCH_TOL):
        raise LevelCrossing(f"level matching fails between consecutive samples near R={np.asarray(where).tolist()}")
    return np.diagonal(ov).copy()


def horizontal_lift(fam: StateFamily, curve: Curve, policy: StepPolicy | None = None) -> TransportResult:
    """Discrete parallel transport: theta_n(t_{j+1}) = theta_n(t_j) - arg <n(t_j)|n(t_{j+1})>."""
    pts = curve.samples()
    data = [levels(fam, p) for p in pts]
    n_links = curve.n_steps
    dt = 1.0 / curve.n_steps
    n_lev = len(data[0][0])
    theta = np.zeros((n_links + 1, n_lev))
    residuals = np.zeros(n_links)
    for j in range(n_links):
        a = j
        b = (j + 1) % len(pts)
        lam_a, va = data[a]
        lam_b, vb = data[b]
        diag = _link(va, vb, pts[b])
        theta[j + 1] = theta[j] - np.angle(diag)
        wa = va * (np.sqrt(lam_a) * np.exp(1j * theta[j]))[None, :]
        wb = vb * (np.sqrt(lam_b) * np.exp(1j * theta[j + 1]))[None, :]
        residuals[j] = abs(np.trace(wa.conj().T @ wb).imag) / dt
    total = theta[-1]
    if curve.closed:
        berry = principal(total)
        winding = np.rint((total - berry) / (2 * np.pi)).astype(int)
    else:
        berry = total.copy()
        winding = np.zeros(n_lev, dtype=int)
    lam0 = data[0][0]
    return TransportResult(phase_history=theta, berry_phases=berry, windings=winding, accumulated=total,
                           connection_residuals=residuals, connection_residual_max=float(residuals.max()),
                           theta_total=float(lam0 @ total), eigenvalues=lam0.copy())


def pure_berry_phase(fam: StateFamily, curve: Curve) -> float:
    """Berry phase of a closed loop from the product of overlaps (discrete Wilson loop)."""
    if not fam.is_pure:
        raise NotPure("pure_berry_phase needs a pure-state family")
    if not curve.closed:
        raise QgtError("pure_berry_phase needs a closed curve")
    states = np.array([fam.state(p) for p in curve.samples()])
    ov = np.einsum("ji,ji->j", states.conj(), np.roll(states, -1, axis=0))
    return float(principal(-np.angle(np.prod(ov))))


def plaquette_fluxes(fam: StateFamily, patch: SurfacePatch):
    """Per-level Wilson-loop flux of each plaquette and eigenvalues at plaquette centres.

    Returns ``(flux, lam)`` with shapes (n_u-1, n_v-1, N); plaquettes are
    traversed counter-clockwise in the (u, v) plane.
    """
    grid = patch.lattice()
    vecs = np.array([[levels(fam, grid[i, j])[1] for j in range(patch.n_v)] for i in range(patch.n_u)])
    link_u = np.einsum("ijan,ijan->ijn", vecs[:-1].conj(), vecs[1:])
    link_v = np.einsum("ijan,ijan->ijn", vecs[:, :-1].conj(), vecs[:, 1:])
    if np.min(np.abs(link_u)) < MATCH_TOL or np.min(np.abs(link_v)) < MATCH_TOL:
        raise LevelCrossing("eigenvector overlap between neighbouring lattice points below the matching threshold")
    loop = link_u[:, :-1] * link_v[1:, :] * link_u[:, 1:].conj() * link_v[:-1, :].conj()
    flux = -np.angle(loop)
    centers = patch.centers()
    lam = np.array([[levels(fam, centers[i, j])[0] for j in range(patch.n_v - 1)] for i in range(patch.n_u - 1)])
    return flux, lam


def theta_g(fam: StateFamily, patch: SurfacePatch, policy: StepPolicy | None = None) -> float:
    """theta_g = (1/2) sum over plaquettes of sum_n lam_n(centre) * flux_n."""
    flux, lam = plaquette_fluxes(fam, patch)
    return float(0.5 * np.sum(lam * flux))
