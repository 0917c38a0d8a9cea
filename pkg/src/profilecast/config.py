"""Run configuration: defaults, TOML/JSON files, environment and overrides."""

import json
import os
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .features import ALL_MODULES, FeatureModule

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

SEED_ENV = "PROFILECAST_SEED"
FORMATS = ("json", "csv", "markdown")


@dataclass(frozen=True)
class Config:
    input: Optional[str] = None
    seed: int = 42
    k: object = 4  # int, or {module: int}
    auto_k: bool = False
    k_min: int = 1
    k_max: int = 10
    corr_threshold: float = 0.9
    pca_components: int = 3
    standardize: bool = True
    modules: tuple = tuple(m.value for m in ALL_MODULES)
    format: str = "json"
    output: Optional[str] = None
    dump_features: Optional[str] = None
    dump_profiles: Optional[str] = None
    drop_bad_rows: bool = False
    max_iter: int = 300
    tol: float = 1e-6
    n_init: int = 10

    def __post_init__(self):
        mods = self.modules
        if isinstance(mods, str):
            mods = [m for m in mods.split(",") if m.strip()]
        try:
            parsed = {FeatureModule.parse(m) for m in mods}
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not parsed:
            raise ConfigError("at least one feature module is required")
        object.__setattr__(self, "modules", tuple(m.value for m in ALL_MODULES if m in parsed))
        if isinstance(self.k, dict):
            try:
                k = {FeatureModule.parse(m).value: int(v) for m, v in self.k.items()}
            except ValueError as exc:
                raise ConfigError(f"invalid per-module k: {exc}") from None
            object.__setattr__(self, "k", dict(sorted(k.items())))
        self.validate()

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        ks = self.k.values() if isinstance(self.k, dict) else [self.k]
        need(all(isinstance(k, int) and not isinstance(k, bool) and k >= 1 for k in ks), f"k must be a positive integer, got {self.k!r}")
        need(isinstance(self.seed, int) and not isinstance(self.seed, bool) and self.seed >= 0, f"seed must be a non-negative integer, got {self.seed!r}")
        need(1 <= self.k_min and self.k_max - self.k_min >= 2, f"k range {self.k_min}..{self.k_max} needs at least 3 values")
        need(0.0 < self.corr_threshold <= 1.0, f"corr_threshold must be in (0, 1], got {self.corr_threshold}")
        need(self.pca_components >= 1, f"pca_components must be >= 1, got {self.pca_components}")
        need(self.format in FORMATS, f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        need(self.max_iter >= 1 and self.n_init >= 1 and self.tol > 0, "max_iter, n_init and tol must be positive")

    def k_for(self, module) -> int:
        module = FeatureModule.parse(module).value
        if isinstance(self.k, dict):
            return self.k.get(module, 4)
        return self.k

    def to_dict(self) -> dict:
        d = asdict(self)
        d["modules"] = list(self.modules)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration key(s): {', '.join(unknown)}")
        data = dict(data)
        if "modules" in data and isinstance(data["modules"], list):
            data["modules"] = tuple(data["modules"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def with_overrides(self, **overrides) -> "Config":
        overrides = {k: v for k, v in overrides.items() if v is not None}
        try:
            return replace(self, **overrides)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def load_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text.decode("utf-8"))
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a table/object")
    # accept either a flat table or one nested under [run]
    if set(data) == {"run"} and isinstance(data["run"], dict):
        data = data["run"]
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve_config(config_path=None, env=None, **overrides) -> Config:
    """Defaults < config file < ``PROFILECAST_SEED`` < explicit overrides."""
    data = load_config_file(config_path) if config_path else {}
    env = os.environ if env is None else env
    if env.get(SEED_ENV):
        try:
            data["seed"] = int(env[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env[SEED_ENV]!r}") from None
    cfg = Config.from_dict(data)
    return cfg.with_overrides(**overrides)
