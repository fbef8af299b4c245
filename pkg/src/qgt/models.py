"""Parametrized state families.

Every family maps a parameter point ``R`` (a length-``n_params`` real
vector) to a density matrix. Thermal families additionally expose their
generator Hamiltonian; their spectrum is built from the Boltzmann weights of
that Hamiltonian so that nearly pure (low temperature) states keep full
relative precision in the small eigenvalues.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .errors import ConfigError, DomainExceeded, NotFullRank, TruncationTooSmall, TruncationWarning, UnknownModel
from .spectral import SpectralDecomposition, gauge_fix, hermitian_eigendecompose, validate_density, _min_gap

TRUNC_TOL = 1e-8

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class ModelConfig:
    beta: float = 1.0
    omega: float = 1.0
    n_cut: int = 40
    seed: int = 0
    dim: int = 3
    n_params: int = 2

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if not self.omega > 0:
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if self.n_cut < 2:
            raise ConfigError(f"n_cut must be at least 2, got {self.n_cut}")
        if self.dim < 2 or self.n_params < 1:
            raise ConfigError("random family needs dim >= 2 and n_params >= 1")


class StateFamily:
    """Base class: a smooth map R -> density matrix over an open box domain."""

    is_pure = False

    def __init__(self, dim: int, n_params: int, lower=None, upper=None, param_names=None):
        self.dim = int(dim)
        self.n_params = int(n_params)
        self.lower = np.full(n_params, -np.inf) if lower is None else np.asarray(lower, dtype=float)
        self.upper = np.full(n_params, np.inf) if upper is None else np.asarray(upper, dtype=float)
        self.param_names = tuple(param_names) if param_names else tuple(f"R{i + 1}" for i in range(n_params))

    def check_domain(self, R) -> np.ndarray:
        r = np.atleast_1d(np.asarray(R, dtype=float))
        if r.shape != (self.n_params,):
            raise DomainExceeded(f"expected {self.n_params} parameters, got {r.shape[0]}")
        if not np.all(np.isfinite(r)):
            raise DomainExceeded(f"non-finite parameter point {r.tolist()}")
        if np.any(r <= self.lower) or np.any(r >= self.upper):
            raise DomainExceeded(f"point {r.tolist()} outside the open domain "
                                 f"{self.lower.tolist()}..{self.upper.tolist()}")
        return r

    def evaluate(self, R) -> np.ndarray:
        raise NotImplementedError

    def density(self, R):
        return validate_density(self.evaluate(R))

    def spectrum(self, R) -> SpectralDecomposition:
        return hermitian_eigendecompose(self.density(R).matrix)


class DensityFamily(StateFamily):
    """Family given directly by a callable returning rho(R)."""

    def __init__(self, rho: Callable, dim: int, n_params: int, **kw):
        super().__init__(dim, n_params, **kw)
        self._rho = rho

    def evaluate(self, R) -> np.ndarray:
        return np.asarray(self._rho(self.check_domain(R)), dtype=complex)


class PureFamily(StateFamily):
    is_pure = True

    def __init__(self, psi: Callable, dim: int, n_params: int, **kw):
        super().__init__(dim, n_params, **kw)
        self._psi = psi

    def state(self, R) -> np.ndarray:
        v = np.asarray(self._psi(self.check_domain(R)), dtype=complex)
        return v / np.linalg.norm(v)

    def evaluate(self, R) -> np.ndarray:
        v = self.state(R)
        return np.outer(v, v.conj())

    def spectrum(self, R) -> SpectralDecomposition:
        raise NotFullRank("pure states are rank one; use the pure-state routines")


def boltzmann_weights(energies: np.ndarray, beta: float) -> np.ndarray:
    w = np.exp(-beta * (energies - energies.min()))
    return w / w.sum()


class ThermalFamily(StateFamily):
    """rho(R) = exp(-beta H(R)) / Z, evaluated through the spectrum of H."""

    def __init__(self, hamiltonian: Callable, beta: float, dim: int, n_params: int, **kw):
        if not beta > 0:
            raise ConfigError(f"beta must be positive, got {beta}")
        super().__init__(dim, n_params, **kw)
        self._h = hamiltonian
        self.beta = float(beta)

    def hamiltonian(self, R) -> np.ndarray:
        return np.asarray(self._h(self.check_domain(R)), dtype=complex)

    def energy_spectrum(self, R):
        """Energies ascending with gauge-fixed eigenvectors as columns."""
        dec = hermitian_eigendecompose(self.hamiltonian(R))
        return dec.eigenvalues[::-1].copy(), dec.frame[:, ::-1].copy()

    def spectrum(self, R) -> SpectralDecomposition:
        e, v = self.energy_spectrum(R)
        lam = boltzmann_weights(e, self.beta)
        return SpectralDecomposition(eigenvalues=lam, frame=v, min_gap=_min_gap(lam), energies=e)

    def evaluate(self, R) -> np.ndarray:
        dec = self.spectrum(R)
        rho = dec.reconstruct()
        return 0.5 * (rho + rho.conj().T)


def thermal_family(hamiltonian: Callable, beta: float, dim: int, n_params: int, **kw) -> ThermalFamily:
    return ThermalFamily(hamiltonian, beta, dim, n_params, **kw)


def ladder(n_cut: int) -> np.ndarray:
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, n_cut, dtype=float)), k=1).astype(complex)


class CoherentFamily(ThermalFamily):
    """Displaced thermal oscillator rho(z) = D(z) rho(0) D(z)^dagger, z = x + iy.

    The displacement is the matrix exponential of the truncated generator,
    which is exactly unitary, so the spectrum is z-independent and the
    eigenvectors are the columns of D(z).
    """

    def __init__(self, cfg: ModelConfig, on_truncation: str = "raise"):
        n = cfg.n_cut
        self.cfg = cfg
        self.omega = cfg.omega
        self.on_truncation = on_truncation
        self._a = ladder(n)
        self._energies = cfg.omega * (np.arange(n) + 0.5)
        self._h0 = np.diag(self._energies).astype(complex)
        super().__init__(self._hamiltonian, cfg.beta, n, 2, param_names=("x", "y"))
        self._lam = boltzmann_weights(self._energies, self.beta)

    def displacement(self, R) -> np.ndarray:
        x, y = self.check_domain(R)
        z = complex(x, y)
        gen = z * self._a.conj().T - np.conj(z) * self._a
        return expm(gen)

    def _hamiltonian(self, R):
        d = self.displacement(R)
        return d @ self._h0 @ d.conj().T

    def _check_truncation(self, d: np.ndarray, R) -> None:
        top = float(np.sum(self._lam * np.abs(d[-1, :]) ** 2))
        if top > TRUNC_TOL:
            msg = (f"top Fock weight {top:.3e} exceeds {TRUNC_TOL} at z={R[0]}+{R[1]}i "
                   f"(beta*omega={self.beta * self.omega}, n_cut={self.dim}); increase n_cut")
            if self.on_truncation == "raise":
                raise TruncationTooSmall(msg)
            warnings.warn(msg, TruncationWarning, stacklevel=3)

    def spectrum(self, R) -> SpectralDecomposition:
        r = self.check_domain(R)
        d = self.displacement(r)
        self._check_truncation(d, r)
        return SpectralDecomposition(eigenvalues=self._lam.copy(), frame=gauge_fix(d),
                                     min_gap=_min_gap(self._lam), energies=self._energies.copy())


def bosonic_coherent_family(cfg: ModelConfig, on_truncation: str = "raise") -> CoherentFamily:
    return CoherentFamily(cfg, on_truncation=on_truncation)


def _bloch_axis(theta, phi):
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def bloch_hamiltonian(omega: float = 1.0):
    def h(R):
        n = _bloch_axis(R[0], R[1])
        return 0.5 * omega * sum(c * s for c, s in zip(n, PAULI))
    return h


def bloch_family(pure: bool = True, beta: float | None = None, omega: float = 1.0, level: str = "upper") -> StateFamily:
    """Two-level family over (theta, phi) with 0 < theta < pi.

    The pure variant is (cos theta/2, e^{i phi} sin theta/2), the +n
    eigenstate of n.sigma; ``level="lower"`` gives the -n eigenstate.
    The mixed variant is the thermal state of (omega/2) n.sigma.
    """
    dom = dict(lower=[0.0, -np.inf], upper=[np.pi, np.inf], param_names=("theta", "phi"))
    if pure:
        if level == "upper":
            def psi(R):
                return np.array([np.cos(R[0] / 2), np.exp(1j * R[1]) * np.sin(R[0] / 2)])
        elif level == "lower":
            def psi(R):
                return np.array([np.sin(R[0] / 2), -np.exp(1j * R[1]) * np.cos(R[0] / 2)])
        else:
            raise ConfigError(f"unknown Bloch level {level!r}")
        return PureFamily(psi, 2, 2, **dom)
    if beta is None:
        raise ConfigError("the mixed Bloch family needs beta")
    return ThermalFamily(bloch_hamiltonian(omega), beta, 2, 2, **dom)


def ground_state_family(fam: ThermalFamily) -> PureFamily:
    """Pure family of the lowest eigenvector of a thermal family's Hamiltonian."""

    def psi(R):
        return fam.energy_spectrum(R)[1][:, 0]

    return PureFamily(psi, fam.dim, fam.n_params, lower=fam.lower, upper=fam.upper, param_names=fam.param_names)


def _random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / (2.0 * np.sqrt(dim))


def random_smooth_family(seed: int, dim: int, n_params: int, beta: float = 1.0,
                         coupling: float = 1.0) -> ThermalFamily:
    """Thermal family of H(R) = H0 + sum_mu R^mu V_mu with seeded random H0, V_mu."""
    if dim < 2 or n_params < 1:
        raise ConfigError("random family needs dim >= 2 and n_params >= 1")
    rng = np.random.default_rng(seed)
    h0 = _random_hermitian(rng, dim)
    vs = np.array([coupling * _random_hermitian(rng, dim) for _ in range(n_params)])

    def h(R):
        return h0 + np.tensordot(R, vs, axes=1)

    return ThermalFamily(h, beta, dim, n_params)


def diagonal_qubit_family() -> DensityFamily:
    """rho(R) = diag((1+R)/2, (1-R)/2) for -1 < R < 1 (fixed eigenframe)."""

    def rho(R):
        return np.diag([(1 + R[0]) / 2, (1 - R[0]) / 2]).astype(complex)

    return DensityFamily(rho, 2, 1, lower=[-1.0], upper=[1.0], param_names=("R",))


MODELS = {
    "thermal-bloch": "thermal qubit of (omega/2) n(theta,phi).sigma at inverse temperature beta; params theta, phi",
    "bloch": "pure qubit (cos theta/2, e^{i phi} sin theta/2); params theta, phi",
    "bosonic-coherent": "displaced thermal oscillator truncated to ncut Fock levels; params x, y (z = x + iy)",
    "random": "thermal state (beta) of H0 + sum R^mu V_mu with seeded random Hermitian H0, V_mu; params R1..Rk",
    "diagonal-qubit": "diag((1+R)/2, (1-R)/2); param R",
}


def build_model(name: str, cfg: ModelConfig) -> StateFamily:
    if name == "thermal-bloch":
        return bloch_family(pure=False, beta=cfg.beta, omega=cfg.omega)
    if name == "bloch":
        return bloch_family(pure=True)
    if name == "bosonic-coherent":
        return bosonic_coherent_family(cfg)
    if name == "random":
        return random_smooth_family(cfg.seed, cfg.dim, cfg.n_params, beta=cfg.beta)
    if name == "diagonal-qubit":
        return diagonal_qubit_family()
    raise UnknownModel(f"unknown model {name!r}; choose from {', '.join(MODELS)}")
