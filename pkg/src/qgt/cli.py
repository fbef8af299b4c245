"""Command-line front end.

Exit codes: 0 success, 1 a verification suite failed, 2 invalid input,
3 numerical failure (the offending parameter point is logged).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import RunConfig, parse_config
from .derivatives import StepPolicy
from .distances import sjoqvist_finite_distance
from .errors import ConfigError, NumericalError, QgtError
from .inequalities import volume_phase_relation
from .models import MODELS, ModelConfig, StateFamily, build_model
from .suites import SUITES, run_suite
from .tensors import QgtResult, qgt
from .transport import Curve, SurfacePatch, axis_loop, circle, horizontal_lift, polyline, pure_berry_phase, \
    rectangle, theta_g

log = logging.getLogger("qgt")

# --- region specs ----------------------------------------------------------


def parse_number(text: str) -> float:
    """Float, also accepting multiples of pi such as ``pi``, ``2pi``, ``-0.5pi``."""
    t = text.strip().lower()
    try:
        if t.endswith("pi"):
            coef = t[:-2].rstrip("*")
            return (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * np.pi
        return float(t)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def parse_point(text: str) -> np.ndarray:
    return np.array([parse_number(x) for x in text.split(",")])


def parse_grid(text: str):
    """``x:0:1:20,y:0:1:20`` -> (axis names, list of points in row-major order)."""
    names, axes = [], []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 4:
            raise ConfigError(f"grid axis {part!r} is not name:start:stop:count")
        n = int(bits[3])
        if n < 1:
            raise ConfigError(f"grid axis {part!r} needs a positive count")
        names.append(bits[0])
        axes.append(np.linspace(parse_number(bits[1]), parse_number(bits[2]), n))
    mesh = np.meshgrid(*axes, indexing="ij")
    return names, np.stack([m.ravel() for m in mesh], axis=1)


def parse_curve(text: str, n_steps: int = 1024) -> Curve:
    """``circle:cx,cy,r`` | ``loop:R1,R2:axis:period`` | ``rect:u0,u1,v0,v1`` | ``points:a,b;c,d``.

    A ``points`` curve is closed when its first and last points coincide.
    """
    kind, _, body = text.partition(":")
    try:
        if kind == "circle":
            cx, cy, r = (parse_number(x) for x in body.split(","))
            return circle([cx, cy], r, n_steps)
        if kind == "loop":
            start, axis, period = body.split(":")
            return axis_loop(parse_point(start), int(axis), parse_number(period), n_steps)
        if kind == "rect":
            u0, u1, v0, v1 = (parse_number(x) for x in body.split(","))
            return rectangle(u0, u1, v0, v1, n_steps)
        if kind == "points":
            pts = [parse_point(p) for p in body.split(";")]
            closed = len(pts) > 2 and np.array_equal(pts[0], pts[-1])
            return polyline(pts, n_steps, closed=closed)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad curve spec {text!r}: {exc}") from None
    raise ConfigError(f"unknown curve kind {kind!r}; use circle, loop, rect or points")


def parse_patch(text: str) -> SurfacePatch:
    """``u0:u1:nu,v0:v1:nv``."""
    try:
        (u0, u1, nu), (v0, v1, nv) = (p.split(":") for p in text.split(","))
        return SurfacePatch(parse_number(u0), parse_number(u1), parse_number(v0), parse_number(v1), int(nu), int(nv))
    except ValueError:
        raise ConfigError(f"bad patch spec {text!r}; expected u0:u1:nu,v0:v1:nv") from None


# --- tensor rows -----------------------------------------------------------


def tensor_columns(k: int) -> list[str]:
    """Fixed CSV column order for a k-parameter tensor row."""
    upper = [(i, j) for i in range(k) for j in range(i, k)]
    strict = [(i, j) for i in range(k) for j in range(i + 1, k)]
    cols = [f"R{i + 1}" for i in range(k)]
    cols += [f"reQ_{i + 1}{j + 1}" for i, j in upper]
    cols += [f"imQ_{i + 1}{j + 1}" for i, j in strict]
    cols += [f"gFR_{i + 1}{j + 1}" for i, j in upper]
    cols += [f"gFS_{i + 1}{j + 1}" for i, j in upper]
    cols += [f"omega_{i + 1}{j + 1}" for i, j in strict]
    return cols


def tensor_row(R, res: QgtResult) -> list[float]:
    k = res.n_params
    upper = [(i, j) for i in range(k) for j in range(i, k)]
    strict = [(i, j) for i in range(k) for j in range(i + 1, k)]
    row = [float(x) for x in R]
    row += [float(res.q[i, j].real) for i, j in upper]
    row += [float(res.q[i, j].imag) for i, j in strict]
    row += [float(res.g_fr[i, j]) for i, j in upper]
    row += [float(res.g_fs[i, j]) for i, j in upper]
    row += [float(res.omega[i, j]) for i, j in strict]
    return row


def _fmt(x) -> str:
    return format(x, ".17g") if isinstance(x, float) else str(x)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _matrix(m) -> list:
    return np.asarray(m).tolist()


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory and rename over ``path``."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".qgt-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- sweep workers ---------------------------------------------------------

_worker: dict = {}


def _init_worker(model: str, mcfg: ModelConfig, policy: StepPolicy) -> None:
    _worker["fam"] = build_model(model, mcfg)
    _worker["policy"] = policy


def _sweep_point(R):
    """Tensor row at ``R``, or the error (type name, message) to report."""
    try:
        return tensor_row(R, qgt(_worker["fam"], R, _worker["policy"])), None
    except QgtError as exc:
        return None, (isinstance(exc, NumericalError), type(exc).__name__, str(exc))


def resolve_threads(value) -> int:
    """Explicit value, else QGT_THREADS, else the CPU count."""
    v = value if value not in (None, "auto") else os.environ.get("QGT_THREADS", "auto")
    if v in (None, "", "auto"):
        return os.cpu_count() or 1
    try:
        n = int(v)
    except ValueError:
        raise ConfigError(f"threads must be an integer or 'auto', got {v!r}") from None
    if n < 1:
        raise ConfigError(f"threads must be positive, got {n}")
    return n


def sweep_rows(model: str, mcfg: ModelConfig, policy: StepPolicy, points, threads: int = 1) -> list:
    """Tensor rows in input order; raises the first failing point's error."""
    if threads <= 1 or len(points) < 2:
        _init_worker(model, mcfg, policy)
        results = [_sweep_point(p) for p in points]
    else:
        chunk = max(1, len(points) // (4 * threads))
        with ProcessPoolExecutor(threads, initializer=_init_worker, initargs=(model, mcfg, policy)) as ex:
            results = list(ex.map(_sweep_point, points, chunksize=chunk))
    rows = []
    for p, (row, err) in zip(points, results):
        if err is not None:
            numerical, name, msg = err
            cls = NumericalError if numerical else QgtError
            raise cls(f"{name} at R={np.asarray(p).tolist()}: {msg}")
        rows.append(row)
    return rows


# --- tasks -----------------------------------------------------------------


def _family(cfg: RunConfig) -> StateFamily:
    return build_model(cfg.model, cfg.model_config)


def task_tensor(cfg: RunConfig):
    fam = _family(cfg)
    R = parse_point(cfg.at)
    res = qgt(fam, R, cfg.policy)
    cols = tensor_columns(len(R))
    row = tensor_row(R, res)
    doc = {"model": cfg.model, "point": R.tolist(), **dict(zip(cols, row)),
           "q": {"re": _matrix(res.q.real), "im": _matrix(res.q.imag)}, "g_fr": _matrix(res.g_fr),
           "g_fs": _matrix(res.g_fs), "omega": _matrix(res.omega), "eigenvalues": res.eigenvalues.tolist()}
    return doc, (cols, [row])


def task_sweep(cfg: RunConfig):
    names, points = parse_grid(cfg.grid)
    rows = sweep_rows(cfg.model, cfg.model_config, cfg.policy, points, resolve_threads(cfg.threads))
    cols = tensor_columns(points.shape[1])
    doc = {"model": cfg.model, "axes": names, "columns": cols, "rows": [dict(zip(cols, r)) for r in rows]}
    return doc, (cols, rows)


def task_transport(cfg: RunConfig):
    fam = _family(cfg)
    curve = parse_curve(cfg.curve, cfg.steps)
    res = horizontal_lift(fam, curve, cfg.policy)
    doc = {"model": cfg.model, "curve": cfg.curve, "n_steps": curve.n_steps, "closed": curve.closed,
           "eigenvalues": res.eigenvalues.tolist(), "berry_phases": res.berry_phases.tolist(),
           "windings": res.windings.tolist(), "accumulated": res.accumulated.tolist(),
           "theta_total": res.theta_total, "connection_residual_max": res.connection_residual_max}
    if fam.is_pure and curve.closed:
        doc["wilson_berry_phase"] = pure_berry_phase(fam, curve)
    pts = curve.samples()
    if curve.closed:
        pts = np.vstack([pts, curve.sample(1.0)])
    n_lev = res.phase_history.shape[1]
    cols = ["t", *[f"R{i + 1}" for i in range(pts.shape[1])], *[f"theta_{n + 1}" for n in range(n_lev)]]
    rows = [[j / curve.n_steps, *map(float, pts[j]), *map(float, res.phase_history[j])]
            for j in range(len(res.phase_history))]
    return doc, (cols, rows)


def task_theta_g(cfg: RunConfig):
    fam = _family(cfg)
    patch = parse_patch(cfg.patch)
    th = theta_g(fam, patch, cfg.policy)
    doc = {"model": cfg.model, "patch": cfg.patch, "theta_g": th}
    return doc, (["theta_g"], [[th]])


def task_volume(cfg: RunConfig):
    fam = _family(cfg)
    patch = parse_patch(cfg.patch)
    rep = volume_phase_relation(fam, patch, cfg.policy)
    doc = {"model": cfg.model, "patch": cfg.patch, "volume": rep.lhs,
           "curvature_integral": rep.context["curvature_integral"],
           "curvature_integral_wilson": rep.context["curvature_integral_wilson"],
           "theta_g": rep.context["theta_g"], "residual_volume_curvature": rep.context["volume_vs_curvature"],
           "residual_curvature_theta_g": rep.context["curvature_vs_theta_g"], "passed": rep.passed}
    cols = list(doc)[2:]
    return doc, (cols, [[doc[c] for c in cols]])


def task_distance(cfg: RunConfig):
    fam = _family(cfg)
    parts = cfg.at.split(";")
    if len(parts) != 2:
        raise ConfigError(f"distance needs two points 'p1;p2', got {cfg.at!r}")
    p, q = (fam.check_domain(parse_point(x)) for x in parts)
    if fam.is_pure:
        ov = abs(np.vdot(fam.state(p), fam.state(q)))
        d = float(np.sqrt(max(0.0, 2.0 - 2.0 * ov)))
    else:
        d = sjoqvist_finite_distance(fam.spectrum(p), fam.spectrum(q))
    doc = {"model": cfg.model, "p": p.tolist(), "q": q.tolist(), "distance": d, "distance_squared": d * d}
    cols = [*[f"P{i + 1}" for i in range(len(p))], *[f"Q{i + 1}" for i in range(len(q))],
            "distance", "distance_squared"]
    return doc, (cols, [[*map(float, p), *map(float, q), d, d * d]])


def task_verify(cfg: RunConfig):
    if cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    doc = run_suite(cfg.suite, cfg.seed, cfg.draws, cfg.policy)
    cols = [k for k, v in doc.items() if not isinstance(v, (dict, list))]
    return doc, (cols, [[doc[c] for c in cols]])


def task_models(cfg: RunConfig):
    doc = {"models": [{"name": k, "description": v} for k, v in MODELS.items()]}
    return doc, (["name", "description"], [[k, v] for k, v in MODELS.items()])


TASKS = {"tensor": task_tensor, "sweep": task_sweep, "transport": task_transport, "theta-g": task_theta_g,
         "volume": task_volume, "distance": task_distance, "verify": task_verify, "models": task_models}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute a validated config; returns the process exit code."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        doc, (cols, rows) = TASKS[cfg.task](cfg)
    except NumericalError as exc:
        log.error("qgt %s: numerical failure (%s): %s", cfg.task, type(exc).__name__, exc)
        return 3
    except QgtError as exc:
        log.error("qgt %s: invalid input (%s): %s", cfg.task, type(exc).__name__, exc)
        return 2
    text = to_csv(cols, rows) if cfg.output_format == "csv" else json.dumps(doc, indent=2) + "\n"
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        stdout.write(text)
    if cfg.task == "verify" and not doc["passed"]:
        return 1
    return 0


# --- argument parsing ------------------------------------------------------

# flag -> RunConfig field
FLAGS = {
    "model": "model", "beta": "beta", "omega": "omega", "ncut": "n_cut", "seed": "seed", "dim": "dim",
    "params": "n_params", "at": "at", "grid": "grid", "curve": "curve", "patch": "patch", "fd_step": "fd_step",
    "fd_scheme": "fd_scheme", "threads": "threads", "output": "output", "format": "format", "suite": "suite",
    "draws": "draws", "steps": "steps",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override its values")
    common.add_argument("--model", help="model name (see 'qgt models')")
    common.add_argument("--beta", type=float, help="inverse temperature")
    common.add_argument("--omega", type=float, help="level spacing / frequency")
    common.add_argument("--ncut", type=int, help="Fock truncation for bosonic-coherent")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--dim", type=int, help="state dimension for the random model")
    common.add_argument("--params", type=int, help="parameter count for the random model")
    common.add_argument("--at", help="point 'a,b' (or 'p1;p2' for distance)")
    common.add_argument("--grid", help="grid 'x:0:1:20,y:0:1:20'")
    common.add_argument("--curve", help="circle:cx,cy,r | loop:R1,R2:axis:period | rect:u0,u1,v0,v1 | points:a,b;c,d")
    common.add_argument("--steps", type=int, help="curve discretization steps (default 1024)")
    common.add_argument("--patch", help="patch 'u0:u1:nu,v0:v1:nv'")
    common.add_argument("--fd-step", type=float, help="finite-difference step (default 1e-5)")
    common.add_argument("--fd-scheme", help="central2 | central4 | richardson")
    common.add_argument("--threads", help="worker processes for sweeps, or 'auto' (env QGT_THREADS)")
    common.add_argument("--output", help="output file (written atomically); stdout if omitted")
    common.add_argument("--format", help="csv | json")
    common.add_argument("--suite", help=f"verification suite: {' | '.join(SUITES)}")
    common.add_argument("--draws", type=int, help="number of randomized draws for verify")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    p = argparse.ArgumentParser(prog="qgt", description="Quantum geometric tensors of mixed-state families.")
    sub = p.add_subparsers(dest="task", required=True)
    helps = {"tensor": "QGT at one point", "sweep": "QGT over a grid (CSV rows)",
             "transport": "parallel transport and Berry phases along a curve", "theta-g": "surface phase on a patch",
             "volume": "quantum volume and the volume/phase relation on a patch",
             "verify": "run a randomized verification suite", "distance": "finite Sjoqvist distance between two points",
             "models": "list available models"}
    for name, h in helps.items():
        sub.add_parser(name, parents=[common], help=h, description=h)
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    text = ""
    if args.config:
        try:
            with open(args.config) as f:
                text = f.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
    overrides = {FLAGS[k]: v for k, v in vars(args).items() if k in FLAGS and v is not None}
    overrides["task"] = args.task
    return parse_config(text, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s",
                        stream=sys.stderr)
    try:
        cfg = config_from_args(args)
    except QgtError as exc:
        log.error("qgt %s: invalid configuration (%s): %s", args.task, type(exc).__name__, exc)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
