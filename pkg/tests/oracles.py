"""Independent reference values.

Nothing here imports the package: closed forms are written out by hand and
the numerical oracles work from overlaps, fidelities and raw eigh calls,
never from eigenvector derivatives.
"""

import numpy as np
from scipy.linalg import sqrtm

# --- closed forms ----------------------------------------------------------


def coth(x):
    return 1.0 / np.tanh(x)


def coherent_metric(beta_omega):
    """Thermal coherent-state metric: coth(beta*omega/2) * I."""
    return coth(beta_omega / 2.0) * np.eye(2)


COHERENT_OMEGA_XY = -1.0


def two_level_boltzmann(beta_omega):
    """(ground, excited) weights of H = diag(-w/2, w/2)."""
    t = np.tanh(beta_omega / 2.0)
    return (1 + t) / 2, (1 - t) / 2


def bloch_pure_metric(theta):
    return np.diag([0.25, np.sin(theta) ** 2 / 4])


def bloch_pure_im_q(theta):
    """Im Q_{theta phi} of (cos theta/2, e^{i phi} sin theta/2)."""
    return np.sin(theta) / 4


def bloch_latitude_phase(theta0):
    """Berry phase of (cos theta/2, e^{i phi} sin theta/2) around a full phi loop."""
    return -np.pi * (1 - np.cos(theta0))


def diagonal_qubit_qgt(r):
    """sum_n (d lam_n)^2 / (4 lam_n) for lam = ((1+r)/2, (1-r)/2)."""
    return 1.0 / (4 * (1 - r * r))


def wrap(phase):
    return (phase + np.pi) % (2 * np.pi) - np.pi


# --- numerical oracles -----------------------------------------------------


def second_moment(dist2, k, delta=1e-4):
    """Symmetric matrix G with dist2(v) = v.G.v + O(|v|^3), by symmetric second differences."""
    e = np.eye(k)
    g = np.zeros((k, k))
    for a in range(k):
        g[a, a] = (dist2(delta * e[a]) + dist2(-delta * e[a])) / (2 * delta**2)
        for b in range(a + 1, k):
            p, m = e[a] + e[b], e[a] - e[b]
            val = (dist2(delta * p) + dist2(-delta * p) - dist2(delta * m) - dist2(-delta * m)) / (8 * delta**2)
            g[a, b] = g[b, a] = val
    return g


def fubini_study_from_overlaps(psi, R, delta=1e-4):
    """Pure-state metric from 1 - |<psi(R)|psi(R+v)>|^2."""
    R = np.asarray(R, dtype=float)
    p0 = psi(R)

    def d2(v):
        return 1.0 - abs(np.vdot(p0, psi(R + v))) ** 2

    return second_moment(d2, len(R), delta)


def loop_phase(psi, R, a, b, eps=1e-4, n=64):
    """-arg of the overlap product around a small counter-clockwise circle in the (a, b) plane."""
    R = np.asarray(R, dtype=float)
    states = []
    for j in range(n):
        p = R.copy()
        p[a] += eps * np.cos(2 * np.pi * j / n)
        p[b] += eps * np.sin(2 * np.pi * j / n)
        states.append(psi(p))
    prod = np.prod([np.vdot(states[j], states[(j + 1) % n]) for j in range(n)])
    return -np.angle(prod), 0.5 * n * eps**2 * np.sin(2 * np.pi / n)  # area of the inscribed polygon


def pure_curvature_from_loops(psi, R, a, b, eps=1e-4, n=64):
    """f_ab = Berry phase / area of a small loop (= -2 Im Q_ab)."""
    phase, area = loop_phase(psi, R, a, b, eps, n)
    return phase / area


def _eig_desc(rho):
    w, v = np.linalg.eigh(rho)
    return w[::-1], v[:, ::-1]


def sjoqvist_distance2(rho, sigma):
    """2 - 2 sum_n sqrt(lam_n lam'_n) |<n|n'>| with levels paired by eigenvalue order."""
    la, va = _eig_desc(rho)
    lb, vb = _eig_desc(sigma)
    ov = np.abs(np.einsum("in,in->n", va.conj(), vb))
    return 2.0 - 2.0 * np.sum(np.sqrt(la * lb) * ov)


def sjoqvist_metric(rho_fn, R, delta=1e-4):
    R = np.asarray(R, dtype=float)
    r0 = rho_fn(R)
    return second_moment(lambda v: sjoqvist_distance2(r0, rho_fn(R + v)), len(R), delta)


def root_fidelity(rho, sigma):
    s = sqrtm(rho)
    return float(np.real(np.trace(sqrtm(s @ sigma @ s))))


def bures_metric_from_fidelity(rho_fn, R, delta=1e-3):
    """Bures metric from d_B^2 = 2 (1 - sqrt F)."""
    R = np.asarray(R, dtype=float)
    r0 = rho_fn(R)
    return second_moment(lambda v: 2.0 * (1.0 - root_fidelity(r0, rho_fn(R + v))), len(R), delta)


def thermal_state(h, beta):
    w, v = np.linalg.eigh(h)
    p = np.exp(-beta * (w - w.min()))
    p /= p.sum()
    return (v * p) @ v.conj().T


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))[None, :]


def random_density(rng, n, min_weight=0.05):
    """Full-rank density matrix with a well-separated random spectrum."""
    lam = np.sort(rng.dirichlet(np.ones(n)) * (1 - n * min_weight) + min_weight)[::-1]
    u = random_unitary(rng, n)
    return (u * lam) @ u.conj().T
