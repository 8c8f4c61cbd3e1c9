"""Run configuration: command-line flags, config files and the environment.

Precedence is flag > config file > environment > built-in default. Config
files are YAML (``.yaml``/``.yml``, a flat mapping) or ``key=value`` lines
with ``#`` comments. Keys are the long flag names with ``_`` for ``-``.
"""
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional

import yaml

from .errors import ConfigError, ParameterError
from .model import DEFAULT_POLICY, Kind, StateSpec, SystemSpec, TruncationPolicy, parse_real

logger = logging.getLogger(__name__)

ENV_GRID_N = "CONFINIUM_GRID_N"
COMMANDS = ("solve", "table", "sweep", "selftest", "diff")
OUTPUT_FORMATS = ("text", "json", "csv")
DEFAULT_DIGITS = 10

# Flag name -> SystemSpec field.
SYSTEM_FLAGS = {"omega": "omega", "xc": "x_c", "rc": "r_c", "ra": "r_a", "rb": "r_b",
                "k": "k", "V0": "V0", "U0": "U0", "w": "w"}


def _flag(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(value)


def _text(value: Any) -> str:
    return str(value).strip()


def _int(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError(value)
    return int(str(value).strip())


def _list(value: Any) -> List[str]:
    if isinstance(value, (list, tuple)):
        return [str(v).strip() for v in value]
    return [part.strip() for part in str(value).split(",") if part.strip()]


CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    "system": _text,
    "state": _text,
    "count": _int,
    "grid_n": _int,
    "energy_tol": float,
    "rtol": float,
    "output": _text,
    "out": _text,
    "digits": _int,
    "jobs": _int,
    "trace": _text,
    "id": _text,
    "literature": _flag,
    "param": _text,
    "values": _list,
    "states": _list,
    "energies_only": _flag,
    **{name: parse_real for name in SYSTEM_FLAGS},
}


def _convert(key: str, value: Any, origin: str) -> Any:
    if key not in CONVERTERS:
        raise ConfigError(f"{origin}: unknown key {key!r}")
    try:
        return CONVERTERS[key](value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{origin}: bad value {value!r} for {key}") from exc


def read_config_file(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")

    if path.endswith((".yaml", ".yml")):
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as exc:
                raise ConfigError(f"{path}: invalid YAML: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a mapping at top level")
        items = [(str(k).replace("-", "_"), v, f"{path}") for k, v in data.items()]
    else:
        items = []
        with open(path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{number}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                items.append((key.strip().replace("-", "_"), value.strip(), f"{path}:{number}"))

    return {key: _convert(key, value, origin) for key, value, origin in items}


def env_grid_n(environ: Optional[Mapping[str, str]] = None) -> Optional[int]:
    environ = os.environ if environ is None else environ
    raw = environ.get(ENV_GRID_N)
    if raw is None or not raw.strip():
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_GRID_N} must be an integer, got {raw!r}") from None
    if value < 16:
        raise ConfigError(f"{ENV_GRID_N} must be at least 16, got {value}")
    return value


@dataclass
class RunConfig:
    command: str
    system: Optional[str] = None
    params: Dict[str, float] = field(default_factory=dict)
    state: Optional[str] = None
    count: int = 1
    grid_n: int = DEFAULT_POLICY.grid_n
    energy_tol: float = DEFAULT_POLICY.energy_tol
    rtol: float = 1e-9
    output: str = "text"
    out_path: Optional[str] = None
    digits: int = DEFAULT_DIGITS
    jobs: int = 1
    trace_path: Optional[str] = None
    table_id: Optional[str] = None
    include_literature: bool = False
    param: Optional[str] = None
    values: List[str] = field(default_factory=list)
    states: List[str] = field(default_factory=list)
    energies_only: bool = False

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.output not in OUTPUT_FORMATS:
            raise ConfigError(f"output must be one of {', '.join(OUTPUT_FORMATS)}, got {self.output!r}")
        if not 1 <= self.digits <= 17:
            raise ConfigError(f"digits must lie in 1..17, got {self.digits}")
        if self.grid_n < 16:
            raise ConfigError(f"grid_n must be at least 16, got {self.grid_n}")
        if self.jobs < 1 or self.count < 1:
            raise ConfigError("jobs and count must be at least 1")
        if not (self.energy_tol > 0 and self.rtol >= 0):
            raise ConfigError("energy_tol must be positive and rtol non-negative")

        if self.command in ("solve", "sweep") and not self.system:
            raise ConfigError(f"{self.command} requires --system")
        if self.command == "solve" and not self.state:
            raise ConfigError("solve requires --state")
        if self.command == "table" and not self.table_id:
            raise ConfigError("table requires --id")
        if self.command == "sweep" and not (self.param and self.values and self.states):
            raise ConfigError("sweep requires --param, --values and --states")
        if self.system:
            try:
                Kind(self.system)
            except ValueError:
                raise ConfigError(f"unknown system {self.system!r}; "
                                  f"expected one of {', '.join(k.value for k in Kind)}") from None
        return self

    def policy(self) -> TruncationPolicy:
        try:
            return TruncationPolicy(grid_n=self.grid_n, energy_tol=self.energy_tol)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None

    def system_spec(self, ell: int = 0) -> SystemSpec:
        return SystemSpec.make(Kind(self.system), ell=ell, **self.params)

    def parsed_state(self, text: Optional[str] = None) -> StateSpec:
        return StateSpec.parse(Kind(self.system), text or self.state)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["params"] = {k: ("inf" if v == float("inf") else v) for k, v in self.params.items()}
        return data


# RunConfig field per configurable key.
FIELD_FOR_KEY = {
    "system": "system", "state": "state", "count": "count", "grid_n": "grid_n",
    "energy_tol": "energy_tol", "rtol": "rtol", "output": "output", "out": "out_path",
    "digits": "digits", "jobs": "jobs", "trace": "trace_path", "id": "table_id",
    "literature": "include_literature", "param": "param", "values": "values",
    "states": "states", "energies_only": "energies_only",
}


def resolve(command: str, flags: Mapping[str, Any], config_path: Optional[str] = None,
            environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Merge flags (``None`` meaning unset), a config file and the environment."""
    from_file = read_config_file(config_path) if config_path else {}
    config = RunConfig(command=command)

    env_n = env_grid_n(environ)
    if env_n is not None:
        config.grid_n = env_n

    for source in (from_file, {k: v for k, v in flags.items() if v is not None}):
        for key, value in source.items():
            if key in SYSTEM_FLAGS:
                config.params[SYSTEM_FLAGS[key]] = parse_real(value)
            elif key in FIELD_FOR_KEY:
                setattr(config, FIELD_FOR_KEY[key], value)
            else:
                raise ConfigError(f"unknown key {key!r}")

    logger.debug("resolved %s config: %s", command, config.to_dict())
    return config.validate()
