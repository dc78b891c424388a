"""Run configuration files.

A config is a YAML (or JSON) mapping::

    bath:
      kind: rtn            # rtn | band | multiband
      j_c: 1.0
      tau0: 1.0
    physical: {g: 0.01, delta: 0.0}
    grid: {dt: 0.01, t_max: 20.0}
    initial: [1, 0, 0, 0]  # s_tr, s_pm, s_mp, s_z; entries may be [re, im]
    sweep: {parameter: tau0, values: [0.5, 1, 2, 4, 8]}
    assembly: spin_diagonal
    output: out
    oracle: {tolerance: 0.05, initial_qubit: up}

Band baths take ``statistics, n_sites, mu, temperature, delta_b, n_bands,
n_spins, site_separation`` instead of ``j_c, tau0``.  :meth:`RunConfig.to_dict`
returns the fully resolved mapping written to ``manifest.json``; loading
that manifest (the resolved mapping sits under its ``config`` key) gives
back an identical config.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .exceptions import BosePoleError, ConfigError
from .kernels import BAND_BOTTOM, BandParams, RtnParams, Statistics
from .oracle import InitialQubit
from .states import PhysicalParams
from .volterra import ASSEMBLIES, SPIN_DIAGONAL

log = logging.getLogger(__name__)

BATH_KINDS = ("rtn", "band", "multiband")
SWEEP_PARAMETERS = ("tau0", "mu", "delta_b", "temperature")
_RTN_KEYS = {f.name for f in dataclasses.fields(RtnParams)}
_BAND_KEYS = {f.name for f in dataclasses.fields(BandParams)}


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class OracleSettings:
    tolerance: float = 0.05
    initial_qubit: InitialQubit = InitialQubit.UP


@dataclass(frozen=True)
class RunConfig:
    bath_kind: str
    bath: object
    physical: PhysicalParams
    dt: float
    t_max: float
    initial: tuple
    sweep: Sweep = None
    assembly: str = SPIN_DIAGONAL
    output: str = None
    oracle: OracleSettings = field(default_factory=OracleSettings)

    @property
    def initial_state(self):
        return np.array(self.initial, dtype=complex)

    def bath_at(self, value):
        """Bath parameters with the sweep parameter set to ``value``."""
        if self.sweep is None:
            return self.bath
        return dataclasses.replace(self.bath, **{self.sweep.parameter: value})

    def sweep_values(self):
        return (None,) if self.sweep is None else self.sweep.values

    def to_dict(self):
        bath = {"kind": self.bath_kind}
        for k, v in dataclasses.asdict(self.bath).items():
            bath[k] = v.value if isinstance(v, Statistics) else v
        return {
            "bath": bath,
            "physical": {"g": self.physical.g, "delta": self.physical.delta},
            "grid": {"dt": self.dt, "t_max": self.t_max},
            "initial": [[z.real, z.imag] for z in self.initial],
            "sweep": None if self.sweep is None else {
                "parameter": self.sweep.parameter, "values": list(self.sweep.values)},
            "assembly": self.assembly,
            "output": self.output,
            "oracle": {"tolerance": self.oracle.tolerance,
                       "initial_qubit": self.oracle.initial_qubit.value},
        }


def _number(value, what):
    # PyYAML reads "1e-3" (no dot) as a string
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"{what} must be a number, got {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number, got {value!r}")
    if not np.isfinite(value):
        raise ConfigError(f"{what} must be finite, got {value!r}")
    return float(value)


def _complex(value, what):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_number(value[0], what), _number(value[1], what))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"{what}: cannot parse {value!r} as complex") from None
    return complex(_number(value, what))


def _section(raw, name, required=True):
    sec = raw.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section {name!r}")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return sec


def _build_bath(sec):
    sec = dict(sec)
    kind = sec.pop("kind", None)
    if kind not in BATH_KINDS:
        raise ConfigError(f"bath.kind must be one of {BATH_KINDS}, got {kind!r}")
    allowed = _RTN_KEYS if kind == "rtn" else _BAND_KEYS
    unknown = set(sec) - allowed
    if unknown:
        raise ConfigError(f"unknown bath keys for {kind}: {sorted(unknown)}")
    try:
        bath = RtnParams(**sec) if kind == "rtn" else BandParams(**sec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid bath: {exc}") from None
    if kind == "band" and (bath.n_bands != 1 or bath.n_spins != 1):
        raise ConfigError("bath.kind 'band' takes n_bands = n_spins = 1; use 'multiband'")
    return kind, bath


def validate_bath(kind, bath, t_max):
    """Physical checks shared by every sweep point."""
    if kind == "rtn":
        return
    if bath.statistics is Statistics.BOSON:
        bottom = BAND_BOTTOM - (abs(bath.delta_b) if kind == "multiband" and bath.n_bands == 2
                                else 0.0)
        if bath.mu >= bottom:
            raise ConfigError(
                f"boson bath needs mu < {bottom} (band bottom), got mu={bath.mu}")
    if t_max >= bath.horizon:
        log.warning("t_max=%g reaches the finite-size horizon N/4=%g of the %d-site bath; "
                    "expect spurious revivals", t_max, bath.horizon, bath.n_sites)


def parse_config(raw):
    """Validate a raw mapping and return a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(raw) - {"bath", "physical", "grid", "initial", "sweep", "assembly",
                          "output", "oracle"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    kind, bath = _build_bath(_section(raw, "bath"))

    phys = _section(raw, "physical", required=False)
    try:
        physical = PhysicalParams(g=_number(phys.get("g", 0.01), "physical.g"),
                                  delta=_number(phys.get("delta", 0.0), "physical.delta"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    grid = _section(raw, "grid")
    dt = _number(grid.get("dt"), "grid.dt")
    t_max = _number(grid.get("t_max"), "grid.t_max")
    if dt <= 0:
        raise ConfigError(f"grid.dt must be positive, got {dt}")
    if t_max <= dt:
        raise ConfigError(f"grid.t_max must exceed dt, got t_max={t_max}, dt={dt}")

    initial = raw.get("initial", [1, 0, 0, 0])
    if not isinstance(initial, (list, tuple)) or len(initial) != 4:
        raise ConfigError("initial must be a list of 4 entries (s_tr, s_pm, s_mp, s_z)")
    initial = tuple(_complex(v, "initial") for v in initial)

    sweep = None
    if raw.get("sweep") is not None:
        sec = _section(raw, "sweep")
        name = sec.get("parameter")
        if name not in SWEEP_PARAMETERS:
            raise ConfigError(
                f"sweep.parameter must be one of {SWEEP_PARAMETERS}, got {name!r}")
        allowed = _RTN_KEYS if kind == "rtn" else _BAND_KEYS
        if name not in allowed:
            raise ConfigError(f"sweep parameter {name!r} does not apply to a {kind} bath")
        values = sec.get("values")
        if not isinstance(values, (list, tuple)) or not values:
            raise ConfigError("sweep.values must be a non-empty list")
        values = tuple(sorted(_number(v, "sweep.values") for v in values))
        if len(set(values)) != len(values):
            raise ConfigError("sweep.values must be distinct")
        sweep = Sweep(name, values)

    assembly = raw.get("assembly", SPIN_DIAGONAL)
    if assembly not in ASSEMBLIES:
        raise ConfigError(f"assembly must be one of {ASSEMBLIES}, got {assembly!r}")

    osec = _section(raw, "oracle", required=False)
    try:
        oracle = OracleSettings(
            tolerance=_number(osec.get("tolerance", 0.05), "oracle.tolerance"),
            initial_qubit=InitialQubit(osec.get("initial_qubit", "up")))
    except ValueError as exc:
        raise ConfigError(f"invalid oracle section: {exc}") from None

    output = raw.get("output")
    if output is not None:
        output = str(output)

    config = RunConfig(kind, bath, physical, dt, t_max, initial, sweep, assembly, output, oracle)
    for value in config.sweep_values():
        try:
            b = config.bath_at(value)
        except ValueError as exc:
            raise ConfigError(f"sweep value {value!r} invalid: {exc}") from None
        validate_bath(kind, b, t_max)
    return config


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    # a manifest.json wraps the resolved config
    if isinstance(raw, dict) and "nmqubit_version" in raw and "config" in raw:
        raw = raw["config"]
    try:
        return parse_config(raw)
    except BosePoleError as exc:
        raise ConfigError(str(exc)) from None
