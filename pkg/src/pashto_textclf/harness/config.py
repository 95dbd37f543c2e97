"""Experiment grid definition and its TOML configuration file."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..classifiers import ALGORITHMS, DEFAULT_HYPERPARAMETERS
from ..corpus import MULTI, SINGLE
from ..errors import ConfigError
from ..features import FEATURE_MODES
from ..textnorm import NormalizationConfig

_SECTIONS = {"seed", "corpus", "normalization", "features", "grid", "hyperparameters"}


@dataclass(frozen=True)
class ExperimentGrid:
    algorithms: tuple[str, ...] = ALGORITHMS
    feature_modes: tuple[str, ...] = FEATURE_MODES
    mode: str = SINGLE
    seed: int = 42
    train_fraction: float = 0.8
    stratified: bool = False
    min_df: int = 1
    max_features: int | None = None
    threshold: float = 0.5
    repeats: int = 1
    hyperparameters: dict = field(default_factory=dict)
    normalization: NormalizationConfig = field(default_factory=NormalizationConfig)
    schema_path: str | None = None

    def __post_init__(self):
        if not self.algorithms or not self.feature_modes:
            raise ConfigError("grid needs at least one algorithm and one feature mode")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithms {bad}; choose from {list(ALGORITHMS)}")
        bad = [f for f in self.feature_modes if f not in FEATURE_MODES]
        if bad:
            raise ConfigError(f"unknown feature modes {bad}; choose from {list(FEATURE_MODES)}")
        # canonical order, so the same selection always yields the same cell indices
        object.__setattr__(self, "algorithms",
                           tuple(a for a in ALGORITHMS if a in set(self.algorithms)))
        object.__setattr__(self, "feature_modes",
                           tuple(f for f in FEATURE_MODES if f in set(self.feature_modes)))
        if self.mode not in (SINGLE, MULTI):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie in (0, 1)")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        for alg, hp in self.hyperparameters.items():
            if alg not in ALGORITHMS:
                raise ConfigError(f"hyperparameters given for unknown algorithm {alg!r}")
            unknown = set(hp) - set(DEFAULT_HYPERPARAMETERS[alg])
            if unknown:
                raise ConfigError(f"unknown {alg} hyperparameters: {sorted(unknown)}")

    @property
    def size(self) -> int:
        return len(self.algorithms) * len(self.feature_modes)

    def cells(self) -> list[tuple[str, str]]:
        return [(a, f) for a in self.algorithms for f in self.feature_modes]

    def override(self, **changes) -> "ExperimentGrid":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "algorithms": list(self.algorithms),
            "feature_modes": list(self.feature_modes),
            "mode": self.mode,
            "seed": self.seed,
            "train_fraction": self.train_fraction,
            "stratified": self.stratified,
            "min_df": self.min_df,
            "max_features": self.max_features,
            "threshold": self.threshold,
            "repeats": self.repeats,
            "hyperparameters": {k: dict(v) for k, v in sorted(self.hyperparameters.items())},
            "normalization": self.normalization.to_dict(),
        }


def load_config(path: str | Path) -> ExperimentGrid:
    """Read a sectioned TOML file into an :class:`ExperimentGrid`.

    Recognised tables: ``[corpus]``, ``[normalization]``, ``[features]``,
    ``[grid]`` and ``[hyperparameters.<ALG>]``; ``seed`` is top level.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return grid_from_dict(data, base_dir=path.parent)


def grid_from_dict(data: dict, base_dir: Path | None = None) -> ExperimentGrid:
    unknown = set(data) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    kw: dict = {}
    if "seed" in data:
        kw["seed"] = int(data["seed"])
    corpus = dict(data.get("corpus", {}))
    if "schema" in corpus:
        schema = Path(corpus.pop("schema"))
        if base_dir is not None and not schema.is_absolute():
            schema = base_dir / schema
        kw["schema_path"] = str(schema)
    for key in ("train_fraction", "stratified"):
        if key in corpus:
            kw[key] = corpus.pop(key)
    if corpus:
        raise ConfigError(f"unknown [corpus] keys: {sorted(corpus)}")
    if "normalization" in data:
        try:
            kw["normalization"] = NormalizationConfig.from_dict(data["normalization"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    feats = dict(data.get("features", {}))
    for key in ("min_df", "max_features"):
        if key in feats:
            kw[key] = feats.pop(key)
    if feats:
        raise ConfigError(f"unknown [features] keys: {sorted(feats)}")
    grid = dict(data.get("grid", {}))
    for key in ("algorithms", "feature_modes"):
        if key in grid:
            kw[key] = tuple(grid.pop(key))
    for key in ("mode", "threshold", "repeats"):
        if key in grid:
            kw[key] = grid.pop(key)
    if grid:
        raise ConfigError(f"unknown [grid] keys: {sorted(grid)}")
    if "hyperparameters" in data:
        kw["hyperparameters"] = {k: dict(v) for k, v in data["hyperparameters"].items()}
    return ExperimentGrid(**kw)
