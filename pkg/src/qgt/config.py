"""Run configuration: a flat ``key = value`` text format with section headers.

Example::

    [model]
    name = thermal-bloch
    beta = 1.0

    [task]
    name = tensor

    [region]
    at = 1.0471,0.0

    [fd]
    step = 1e-5
    scheme = central2

    [output]
    path = out.json
    format = json

Section headers are optional: every key may also be written flat under its
CLI flag name (``model = bloch``, ``fd-step = 1e-4``, ``region = patch``).
Blank lines and ``#`` comments are ignored; unknown keys are rejected.
Flags given on the command line override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .derivatives import DEFAULT_STEP, SCHEMES, StepPolicy
from .errors import ConfigError, IncompatibleTaskRegion, ParseError, UnknownModel
from .models import MODELS, ModelConfig

TASKS = ("tensor", "sweep", "transport", "theta-g", "volume", "verify", "distance", "models")
REGION_KINDS = ("point", "grid", "curve", "patch", "pair", "none")
FORMATS = ("csv", "json")

# region kind each task accepts
TASK_REGIONS = {
    "tensor": ("point",),
    "sweep": ("grid",),
    "transport": ("curve",),
    "theta-g": ("patch",),
    "volume": ("patch",),
    "distance": ("pair",),
    "verify": ("none",),
    "models": ("none",),
}

# key (the CLI flag name) -> (RunConfig field, converter)
KEYS = {
    "model": ("model", str), "beta": ("beta", float), "omega": ("omega", float), "ncut": ("n_cut", int),
    "seed": ("seed", int), "dim": ("dim", int), "params": ("n_params", int),
    "task": ("task", str), "suite": ("suite", str), "draws": ("draws", int), "steps": ("steps", int),
    "region": ("region", str), "at": ("at", str), "grid": ("grid", str), "curve": ("curve", str),
    "patch": ("patch", str),
    "fd-step": ("fd_step", float), "fd-scheme": ("fd_scheme", str),
    "output": ("output", str), "format": ("format", str), "threads": ("threads", str),
}

# keys allowed under each section header, with short aliases
SECTIONS = {
    "model": {"name": "model", **{k: k for k in ("model", "beta", "omega", "ncut", "seed", "dim", "params")}},
    "task": {"name": "task", **{k: k for k in ("task", "suite", "draws", "steps")}},
    "region": {"kind": "region", **{k: k for k in ("region", "at", "grid", "curve", "patch")}},
    "fd": {"step": "fd-step", "scheme": "fd-scheme", "fd-step": "fd-step", "fd-scheme": "fd-scheme"},
    "output": {"path": "output", **{k: k for k in ("output", "format", "threads")}},
}


@dataclass(frozen=True)
class RunConfig:
    model: str | None = None
    task: str = "tensor"
    beta: float = 1.0
    omega: float = 1.0
    n_cut: int = 40
    seed: int = 0
    dim: int = 3
    n_params: int = 2
    at: str | None = None
    grid: str | None = None
    curve: str | None = None
    patch: str | None = None
    region: str | None = None
    fd_step: float = DEFAULT_STEP
    fd_scheme: str = "central2"
    output: str | None = None
    format: str | None = None
    threads: str = "auto"
    suite: str = "inequalities"
    draws: int | None = None
    steps: int = 1024

    @property
    def model_config(self) -> ModelConfig:
        return ModelConfig(beta=self.beta, omega=self.omega, n_cut=self.n_cut, seed=self.seed, dim=self.dim,
                           n_params=self.n_params)

    @property
    def policy(self) -> StepPolicy:
        return StepPolicy(h=self.fd_step, scheme=self.fd_scheme)

    @property
    def output_format(self) -> str:
        """Explicit format, else the output suffix, else csv for sweeps and json otherwise."""
        if self.format is not None:
            return self.format
        if self.output is not None and self.output.lower().endswith(".csv"):
            return "csv"
        return "csv" if self.task == "sweep" else "json"

    @property
    def region_kind(self) -> str:
        given = [k for k in ("grid", "curve", "patch") if getattr(self, k) is not None]
        if self.at is not None:
            given.append("pair" if ";" in self.at else "point")
        if len(given) > 1:
            raise IncompatibleTaskRegion(f"more than one region given: {', '.join(given)}")
        if self.region is not None:
            if self.region not in REGION_KINDS:
                raise ConfigError(f"unknown region kind {self.region!r}; choose from {', '.join(REGION_KINDS)}")
            if given and given[0] != self.region:
                raise ConfigError(f"region declared as {self.region} but a {given[0]} was given")
            return self.region
        return given[0] if given else "none"


def validate(cfg: RunConfig) -> RunConfig:
    """Check names and task/region compatibility; returns ``cfg`` unchanged."""
    if cfg.task not in TASKS:
        raise ConfigError(f"unknown task {cfg.task!r}; choose from {', '.join(TASKS)}")
    if cfg.task not in ("verify", "models"):
        if cfg.model is None:
            raise ConfigError("a model is required")
        if cfg.model not in MODELS:
            raise UnknownModel(f"unknown model {cfg.model!r}; choose from {', '.join(MODELS)}")
    kind = cfg.region_kind
    if kind not in TASK_REGIONS[cfg.task]:
        raise IncompatibleTaskRegion(f"task {cfg.task!r} needs a {' or '.join(TASK_REGIONS[cfg.task])} region, "
                                     f"got {kind}")
    if cfg.fd_scheme not in SCHEMES:
        raise ConfigError(f"unknown fd scheme {cfg.fd_scheme!r}; choose from {', '.join(SCHEMES)}")
    if cfg.format is not None and cfg.format not in FORMATS:
        raise ConfigError(f"unknown output format {cfg.format!r}; choose from {', '.join(FORMATS)}")
    try:
        cfg.policy
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.model_config
    return cfg


def parse_config_values(text: str) -> dict:
    """Parse the text format into RunConfig field values, without validation."""
    values: dict = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        col = len(line) - len(stripped) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, col)
            section = stripped[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", lineno, col + 1)
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", lineno, col)
        key, value = (t.strip() for t in stripped.split("=", 1))
        if section is not None:
            if key not in SECTIONS[section]:
                raise ParseError(f"unknown key {key!r} in [{section}]", lineno, col)
            key = SECTIONS[section][key]
        elif key not in KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, col)
        name, conv = KEYS[key]
        vcol = len(line) - len(line.split("=", 1)[1].lstrip()) + 1
        if not value:
            raise ParseError(f"missing value for {key!r}", lineno, vcol)
        try:
            values[name] = conv(value)
        except ValueError:
            raise ParseError(f"bad value {value!r} for {key!r}", lineno, vcol) from None
    return values


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a config; ``overrides`` (e.g. from CLI flags) win over file values."""
    values = parse_config_values(text)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return validate(replace(RunConfig(), **values))
