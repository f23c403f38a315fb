"""JSON scenario files (``schema: 1``) and their validated in-memory form."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .channel import Geometry
from .chebyshev import DEFAULT_ORDER, ChebyshevModel, build_model
from .noma import PowerAllocation, RateTargets, default_allocation, feasibility
from .numerics import DomainError

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source:
            where = f"{source}:{line}: " if line else f"{source}: "
        elif line:
            where = f"line {line}: "
        super().__init__(where + message)
        self.line = line


@dataclass
class ScenarioConfig:
    users: int
    radius_m: float
    alpha: float
    snr_db: list[float]
    alloc: list[float] | str = "default"
    targets_bpcu: list[float] | None = None
    quadrature_n: int = DEFAULT_ORDER
    trials: int = 100_000
    seed: int = 0
    oma_split: bool = False
    normalize_quadrature: bool = True
    users_grid: list[int] = field(default_factory=list)
    alpha_grid: list[float] = field(default_factory=list)
    schema: int = SCHEMA_VERSION

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.schema != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema {self.schema!r}; expected {SCHEMA_VERSION}")
        if not isinstance(self.snr_db, list) or not self.snr_db:
            raise ConfigError("snr_db must be a nonempty list")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        try:
            geometry = self.geometry()
            self.allocation()
            if self.targets_bpcu is not None:
                self.rate_targets()
            if self.quadrature_n < 1:
                raise DomainError("quadrature_n must be >= 1")
            for m in self.users_grid:
                Geometry(self.radius_m, geometry.alpha, m)
            for a in self.alpha_grid:
                Geometry(self.radius_m, a, 1)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def geometry(self, users: int | None = None, alpha: float | None = None) -> Geometry:
        return Geometry(
            float(self.radius_m),
            float(self.alpha if alpha is None else alpha),
            int(self.users if users is None else users),
        )

    def allocation(self, users: int | None = None) -> PowerAllocation:
        m = self.users if users is None else users
        if self.alloc == "default" or users is not None and users != self.users:
            return default_allocation(m)
        if isinstance(self.alloc, str):
            raise DomainError(f"alloc must be 'default' or a list, got {self.alloc!r}")
        if len(self.alloc) != self.users:
            raise DomainError(f"alloc has {len(self.alloc)} entries for {self.users} users")
        return PowerAllocation(self.alloc)

    def rate_targets(self) -> RateTargets:
        if self.targets_bpcu is None:
            raise DomainError("this scenario has no rate targets")
        if len(self.targets_bpcu) != self.users:
            raise DomainError(f"targets_bpcu has {len(self.targets_bpcu)} entries for {self.users} users")
        return RateTargets(self.targets_bpcu)

    def model(self, alpha: float | None = None) -> ChebyshevModel:
        return build_model(self.geometry(alpha=alpha), self.quadrature_n, self.normalize_quadrature)

    def feasible(self) -> list[bool]:
        return [bool(x) for x in feasibility(self.allocation(), self.rate_targets())]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


_TYPES = {
    "users": int,
    "radius_m": (int, float),
    "alpha": (int, float),
    "snr_db": list,
    "alloc": (list, str),
    "targets_bpcu": (list, type(None)),
    "quadrature_n": int,
    "trials": int,
    "seed": int,
    "oma_split": bool,
    "normalize_quadrature": bool,
    "users_grid": list,
    "alpha_grid": list,
    "schema": int,
}
_REQUIRED = ("schema", "users", "radius_m", "alpha", "snr_db")


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def config_from_dict(data: dict, text: str | None = None, source: str | None = None) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("top-level JSON value must be an object", 1, source)
    for key in data:
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}", _line_of(text, key), source)
    for key in _REQUIRED:
        if key not in data:
            raise ConfigError(f"missing required key {key!r}", None, source)
    for key, val in data.items():
        expected = _TYPES[key]
        # bool is an int subclass; keep it out of numeric fields
        if (isinstance(val, bool) and expected is not bool) or not isinstance(val, expected):
            raise ConfigError(f"{key!r} has the wrong type ({type(val).__name__})", _line_of(text, key), source)
    for key in ("snr_db", "alloc", "targets_bpcu", "alpha_grid", "users_grid"):
        val = data.get(key)
        if isinstance(val, list):
            kind = int if key == "users_grid" else (int, float)
            if not all(isinstance(v, kind) and not isinstance(v, bool) for v in val):
                raise ConfigError(f"{key!r} must hold numbers", _line_of(text, key), source)
    try:
        return ScenarioConfig(**data)
    except ConfigError as exc:
        key = _guess_key(str(exc))
        raise ConfigError(str(exc), _line_of(text, key) if key else None, source) from None


def _guess_key(message: str) -> str | None:
    for key in sorted(_TYPES, key=len, reverse=True):
        if key in message:
            return key
    for word, key in (("radius", "radius_m"), ("power", "alloc"), ("target", "targets_bpcu"), ("user", "users")):
        if word in message:
            return key
    return None


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno, str(path)) from None
    return config_from_dict(data, text, str(path))
