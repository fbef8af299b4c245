"""Numerical witnesses for the QGT inequalities, quantum volume, and the
volume / surface-phase relation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .derivatives import StepPolicy
from .errors import AxisOutOfRange, NotTwoParameter
from .models import StateFamily
from .tensors import BuresResult, QgtResult, qgt
from .transport import SurfacePatch, plaquette_fluxes

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    passed: bool
    context: dict = field(default_factory=dict)


def make_report(name: str, lhs: float, rhs: float, **context) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    tol = RESIDUAL_TOL * max(1.0, abs(lhs), abs(rhs))
    residual = lhs - rhs
    return InequalityReport(name, lhs, rhs, residual, tol, bool(residual >= -tol), dict(context))


def _check_axes(k: int, mu: int, nu: int) -> None:
    for a in (mu, nu):
        if not 0 <= a < k:
            raise AxisOutOfRange(f"axis {a} outside 0..{k - 1}")


def _pair(name: str, m: np.ndarray, mu: int, nu: int, **ctx) -> InequalityReport:
    return make_report(name, (m[mu, mu] * m[nu, nu]).real, abs(m[mu, nu]) ** 2, mu=mu, nu=nu, **ctx)


def qgt_pair_reports(q: QgtResult, mu: int, nu: int) -> list:
    """Flat list: full Q^S, each Q^n, the Fisher-Rao part, and sum_n lam_n Q^n."""
    _check_axes(q.n_params, mu, nu)
    reports = [_pair("qgt_pair", q.q, mu, nu)]
    for n, lv in enumerate(q.per_level):
        reports.append(_pair("level_pair", lv.q, mu, nu, level=n))
    reports.append(_pair("fisher_rao_pair", q.g_fr, mu, nu))
    reports.append(_pair("weighted_fs_pair", q.g_fs - 1j * q.omega, mu, nu))
    return reports


def qgt_pair_inequality(q: QgtResult, mu: int, nu: int) -> InequalityReport:
    """Q_mm Q_nn >= |Q_mn|^2 for Q^S; companion reports sit in ``context["companions"]``.

    mu == nu is allowed and gives an equality.
    """
    full, *rest = qgt_pair_reports(q, mu, nu)
    ctx = dict(full.context, companions=rest)
    return InequalityReport(full.name, full.lhs, full.rhs, full.residual, full.tolerance,
                            full.passed and all(r.passed for r in rest), ctx)


def bures_pair_inequality(g: BuresResult, mu: int, nu: int) -> InequalityReport:
    _check_axes(g.g_b.shape[0], mu, nu)
    return _pair("bures_pair", g.g_b, mu, nu)


def det_curvature_bound_2d(q: QgtResult) -> InequalityReport:
    """sqrt(det g^S) >= |F_12| / 2 with F_12 = -2 Im Q^S_12."""
    if q.n_params != 2:
        raise NotTwoParameter(f"the determinant bound needs 2 parameters, got {q.n_params}")
    g = q.g
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    f12 = -2.0 * q.q[0, 1].imag
    return make_report("det_curvature_bound", np.sqrt(max(det, 0.0)), abs(f12) / 2.0, det=float(det))


def _require_2d(fam: StateFamily) -> None:
    if fam.n_params != 2:
        raise NotTwoParameter(f"needs a two-parameter family, got {fam.n_params}")


def _center_tensors(fam: StateFamily, patch: SurfacePatch, policy):
    centers = patch.centers()
    sqrt_det = np.zeros(centers.shape[:2])
    omega = np.zeros(centers.shape[:2])
    for i in range(centers.shape[0]):
        for j in range(centers.shape[1]):
            g = qgt(fam, centers[i, j], policy)
            m = g.g
            sqrt_det[i, j] = np.sqrt(max(m[0, 0] * m[1, 1] - m[0, 1] ** 2, 0.0))
            omega[i, j] = g.omega[0, 1]
    return sqrt_det, omega


def quantum_volume(fam: StateFamily, patch: SurfacePatch, policy: StepPolicy | None = None) -> float:
    """Midpoint-rule integral of sqrt(det Re Q) over the patch."""
    _require_2d(fam)
    sqrt_det, _ = _center_tensors(fam, patch, policy)
    return float(np.sum(sqrt_det) * patch.du * patch.dv)


def volume_phase_relation(fam: StateFamily, patch: SurfacePatch, policy: StepPolicy | None = None) -> InequalityReport:
    """V >= int |F_12|/2 >= |theta_g|, each link checked within one discretization.

    The first link compares midpoint quadratures of sqrt(det g) and |Omega_12|
    built from the same tensors; the second compares the per-plaquette
    |weighted Wilson flux| / 2 with |theta_g| from the same plaquettes.
    The report's residual is the smaller of the two link residuals.
    """
    _require_2d(fam)
    area = patch.du * patch.dv
    sqrt_det, omega = _center_tensors(fam, patch, policy)
    volume = float(np.sum(sqrt_det) * area)
    curv_mid = float(np.sum(np.abs(omega)) * area)
    flux, lam = plaquette_fluxes(fam, patch)
    cell = 0.5 * np.sum(lam * flux, axis=-1)
    curv_wilson = float(np.sum(np.abs(cell)))
    th = float(np.sum(cell))
    first = make_report("volume_vs_curvature", volume, curv_mid)
    second = make_report("curvature_vs_theta_g", curv_wilson, abs(th))
    residual = min(first.residual, second.residual)
    return InequalityReport(
        name="volume_phase_relation", lhs=volume, rhs=abs(th), residual=residual,
        tolerance=max(first.tolerance, second.tolerance), passed=first.passed and second.passed,
        context={"curvature_integral": curv_mid, "curvature_integral_wilson": curv_wilson, "theta_g": th,
                 "volume_vs_curvature": first.residual, "curvature_vs_theta_g": second.residual},
    )


@dataclass(frozen=True)
class SuiteSummary:
    n_reports: int
    n_failed: int
    min_residual: float
    argmin: InequalityReport | None
    passed: bool


def summarize(reports) -> SuiteSummary:
    reports = list(reports)
    if not reports:
        return SuiteSummary(0, 0, float("inf"), None, True)
    # scaled residual decides the worst case
    worst = min(reports, key=lambda r: r.residual / max(1.0, abs(r.lhs), abs(r.rhs)))
    failed = sum(not r.passed for r in reports)
    return SuiteSummary(len(reports), failed, worst.residual / max(1.0, abs(worst.lhs), abs(worst.rhs)),
                        worst, failed == 0)
