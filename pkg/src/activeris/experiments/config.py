"""Experiment configuration: TOML files with unit-suffixed quantities.

A configuration file looks like::

    [experiment]
    id = "rate-vs-rho"
    trials = 50
    seed = 7

    [scenario]
    N = 32
    P_RIS = "1.2 W"

    [sweep]
    rho = ["-10 dB", "0 dB"]

Every dimensioned value (power, distance, frequency, ratio, circuit
element) must be a string carrying its unit; bare numbers are accepted
only for counts and dimensionless model constants.  Unknown keys are
rejected.
"""

import sys
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..units import parse_quantity

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

__all__ = ["ExperimentSpec", "Param", "load_config", "parse_config", "parse_value", "SECTIONS"]

SECTIONS = ("experiment", "scenario", "sweep")


@dataclass(frozen=True)
class Param:
    """A configurable key.

    Attributes
    ----------
    kind : str
        ``"int"``, ``"number"``, ``"bool"``, ``"text"``, ``"texts"`` or a
        unit kind understood by :func:`parse_quantity`.
    scale : float
        Factor applied after conversion to SI (e.g. ``1e-9`` for GHz fields).
    """

    kind: str
    scale: float = 1.0
    doc: str = ""


def parse_value(key, value, param):
    """Convert one raw TOML value according to ``param``."""
    kind = param.kind
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    if kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true or false, got {value!r}")
        return value
    if kind == "text":
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    if kind == "texts":
        if not (isinstance(value, list) and all(isinstance(v, str) for v in value)):
            raise ConfigError(f"{key}: expected a list of strings, got {value!r}")
        return tuple(value)
    try:
        return parse_quantity(value, kind) * param.scale
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


@dataclass
class ExperimentSpec:
    """Fully resolved experiment request.

    Attributes
    ----------
    id : str
    overrides : dict
        Scenario keys in SI units (after any scale factor).
    sweep : dict
        Sweep axes overriding the experiment defaults, in SI units.
    trials : int
    seed : int
    out : str or None
    full_scale : bool
    workers : int
    record_time : bool
    """

    id: str
    overrides: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    trials: int = None
    seed: int = 0
    out: str = None
    full_scale: bool = False
    workers: int = 1
    record_time: bool = False

    def __post_init__(self):
        from .runners import EXPERIMENTS

        if self.id not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.id!r}; choose from {', '.join(EXPERIMENTS)}")
        exp = EXPERIMENTS[self.id]
        if self.trials is None:
            self.trials = exp.full_trials if self.full_scale else exp.desk_trials
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        self.trials = int(self.trials)
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        self.seed = int(self.seed)
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        for key in self.overrides:
            if key not in exp.params:
                raise ConfigError(f"unknown scenario key {key!r} for {self.id}; known: {', '.join(sorted(exp.params))}")
        for key, values in self.sweep.items():
            if key not in exp.axes:
                raise ConfigError(f"unknown sweep axis {key!r} for {self.id}; known: {', '.join(exp.axes)}")
            if len(values) == 0:
                raise ConfigError(f"sweep axis {key!r} is empty")
        exp.validate(self)

    @property
    def experiment(self):
        from .runners import EXPERIMENTS

        return EXPERIMENTS[self.id]

    def axis(self, name):
        """Values of a sweep axis: the override if given, else the default."""
        if name in self.sweep:
            return list(self.sweep[name])
        return list(self.experiment.axes[name].values(self.full_scale))


def _parse_scenario(exp, table):
    out = {}
    for key, value in table.items():
        if key not in exp.params:
            raise ConfigError(f"unknown scenario key {key!r} for {exp.id}; known: {', '.join(sorted(exp.params))}")
        out[key] = parse_value(f"scenario.{key}", value, exp.params[key])
    return out


def _parse_sweep(exp, table):
    out = {}
    for key, values in table.items():
        if key not in exp.axes:
            raise ConfigError(f"unknown sweep axis {key!r} for {exp.id}; known: {', '.join(exp.axes)}")
        if not isinstance(values, list):
            raise ConfigError(f"sweep.{key}: expected a list")
        param = exp.axes[key].param
        out[key] = [parse_value(f"sweep.{key}", v, param) for v in values]
    return out


def parse_config(data, experiment=None, **cli):
    """Build an :class:`ExperimentSpec` from a parsed TOML mapping.

    Parameters
    ----------
    data : dict
    experiment : str, optional
        Experiment id; overrides ``experiment.id`` in the file.
    **cli
        ``trials``, ``seed``, ``out``, ``full_scale``, ``workers``,
        ``record_time``; values that are None are ignored.
    """
    from .runners import EXPERIMENTS

    for section in data:
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]; allowed: {', '.join(SECTIONS)}")
        if not isinstance(data[section], dict):
            raise ConfigError(f"[{section}] must be a table")
    head = dict(data.get("experiment", {}))
    allowed = {"id", "trials", "seed", "full_scale", "workers", "out"}
    for key in head:
        if key not in allowed:
            raise ConfigError(f"unknown key experiment.{key}; allowed: {', '.join(sorted(allowed))}")
    exp_id = experiment or head.get("id")
    if exp_id is None:
        raise ConfigError("no experiment id given (experiment.id or --experiment)")
    if exp_id not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp_id!r}; choose from {', '.join(EXPERIMENTS)}")
    exp = EXPERIMENTS[exp_id]
    kw = {k: head[k] for k in ("trials", "seed", "full_scale", "workers", "out") if k in head}
    if "full_scale" in kw and not isinstance(kw["full_scale"], bool):
        raise ConfigError("experiment.full_scale must be true or false")
    kw.update({k: v for k, v in cli.items() if v is not None})
    return ExperimentSpec(
        id=exp_id,
        overrides=_parse_scenario(exp, data.get("scenario", {})),
        sweep=_parse_sweep(exp, data.get("sweep", {})),
        **kw,
    )


def load_config(path=None, experiment=None, **cli):
    """Read and validate a configuration file.

    Parameters
    ----------
    path : str or Path, optional
        TOML file; without it the experiment runs on its defaults.
    experiment : str, optional
    **cli
        See :func:`parse_config`.

    Returns
    -------
    ExperimentSpec

    Raises
    ------
    ConfigError
        On syntax errors (with line and column), unknown keys, missing
        unit suffixes or invalid values.
    OSError
        If the file cannot be read.
    """
    data = {}
    if path is not None:
        with open(path, "rb") as fh:
            raw = fh.read()
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, experiment, **cli)
